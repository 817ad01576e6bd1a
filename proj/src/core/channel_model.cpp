#include "core/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace doflab {

BcConfig normalize_config(int M, int N1, int N2, const Rat& beta1, const Rat& beta2) {
    if (M <= 0 || N1 <= 0 || N2 <= 0)
        throw std::invalid_argument("normalize_config: antenna counts must be positive");
    if (beta1 < 0 || beta1 > 1 || beta2 < 0 || beta2 > 1)
        throw std::invalid_argument("normalize_config: beta values must lie in [0,1]");

    BcConfig cfg;
    cfg.M_original = M;
    cfg.N1 = N1;
    cfg.N2 = N2;
    cfg.beta1 = beta1;
    cfg.beta2 = beta2;
    if (cfg.N1 > cfg.N2) {
        std::swap(cfg.N1, cfg.N2);
        std::swap(cfg.beta1, cfg.beta2);
        cfg.swapped = true;
    }
    cfg.n2_gt_m = (cfg.N2 > M);
    cfg.M = std::min(M, cfg.N1 + cfg.N2);
    return cfg;
}

namespace {

// Appends one term per entry of an input block. gamma/delta give the trim
// window applied to every entry of the block.
void add_block(LinearFormSpec& spec, size_t first, int count, const Rat& gamma,
               const Rat& delta) {
    for (int i = 0; i < count; ++i) {
        FormTerm t;
        t.input = first + static_cast<size_t>(i);
        t.gamma = gamma;
        t.delta_trim = delta;
        t.eta = 1;
        spec.terms.push_back(t);
    }
}

enum Block { kXa, kXb, kXc };

LinearFormSpec family_row(const BcConfig& cfg, std::initializer_list<std::pair<Block, std::pair<Rat, Rat>>> blocks) {
    LinearFormSpec spec;
    for (auto& [block, trim] : blocks) {
        size_t first = 0;
        int count = 0;
        switch (block) {
            case kXa: first = 0; count = cfg.len_xa(); break;
            case kXb: first = static_cast<size_t>(cfg.len_xa()); count = cfg.len_xb(); break;
            case kXc: first = static_cast<size_t>(cfg.len_xa() + cfg.len_xb()); count = cfg.len_xc(); break;
        }
        add_block(spec, first, count, trim.first, trim.second);
    }
    return spec;
}

std::vector<LinearFormSpec> family_rows(const BcConfig& cfg, Family f) {
    const Rat one = 1, zero = 0;
    const Rat b1 = cfg.beta1, b2 = cfg.beta2;
    int rows = 0;
    LinearFormSpec proto;
    switch (f) {
        case Family::y1:  // L(X_a, X_b, (X_c)^1_{b1})
            rows = cfg.N1;
            proto = family_row(cfg, {{kXa, {one, zero}}, {kXb, {one, zero}}, {kXc, {one, b1}}});
            break;
        case Family::y2:  // L((X_a)^1_{b2}, X_b, X_c)
            rows = cfg.N2;
            proto = family_row(cfg, {{kXa, {one, b2}}, {kXb, {one, zero}}, {kXc, {one, zero}}});
            break;
        case Family::y1_tilde_a:  // no X_a
            rows = cfg.len_xb();
            proto = family_row(cfg, {{kXb, {one, zero}}, {kXc, {one, b1}}});
            break;
        case Family::y1_a:
            rows = cfg.len_xa();
            proto = family_row(cfg, {{kXa, {one, zero}}, {kXb, {one, zero}}, {kXc, {one, b1}}});
            break;
        case Family::y1c:
            rows = cfg.len_xb();
            proto = family_row(cfg, {{kXa, {one, b2}}, {kXb, {one, zero}}, {kXc, {one, b1}}});
            break;
        case Family::y1d:  // no X_b
            rows = cfg.len_xa();
            proto = family_row(cfg, {{kXa, {one, zero}}, {kXc, {one, b1}}});
            break;
        case Family::y2a:
            rows = cfg.len_xb();
            proto = family_row(cfg, {{kXa, {one, b2}}, {kXb, {one, zero}}});
            break;
        case Family::y2b:
            rows = cfg.M - cfg.N1;
            proto = family_row(cfg, {{kXa, {one, b2}}, {kXc, {one, zero}}});
            break;
    }
    return std::vector<LinearFormSpec>(static_cast<size_t>(rows), proto);
}

double det_abs(std::vector<std::vector<double>> m) {
    const size_t n = m.size();
    double det = 1.0;
    for (size_t col = 0; col < n; ++col) {
        size_t pivot = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::fabs(m[r][col]) > std::fabs(m[pivot][col])) pivot = r;
        if (m[pivot][col] == 0.0) return 0.0;
        if (pivot != col) std::swap(m[pivot], m[col]);
        det *= m[col][col];
        for (size_t r = col + 1; r < n; ++r) {
            const double f = m[r][col] / m[col][col];
            for (size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
        }
    }
    return std::fabs(det);
}

bool next_combination(std::vector<size_t>& sel, size_t n) {
    const size_t k = sel.size();
    for (size_t i = k; i-- > 0;) {
        if (sel[i] < n - (k - i)) {
            ++sel[i];
            for (size_t j = i + 1; j < k; ++j) sel[j] = sel[j - 1] + 1;
            return true;
        }
    }
    return false;
}

// Every square submatrix of `mat` must clear the determinant floor.
bool all_square_blocks_ok(const std::vector<std::vector<double>>& mat, double eps) {
    const size_t rows = mat.size();
    if (rows == 0) return true;
    const size_t cols = mat[0].size();
    for (size_t k = 1; k <= std::min(rows, cols); ++k) {
        std::vector<size_t> rsel(k);
        std::iota(rsel.begin(), rsel.end(), 0);
        do {
            std::vector<size_t> csel(k);
            std::iota(csel.begin(), csel.end(), 0);
            do {
                std::vector<std::vector<double>> sub(k, std::vector<double>(k));
                for (size_t i = 0; i < k; ++i)
                    for (size_t j = 0; j < k; ++j) sub[i][j] = mat[rsel[i]][csel[j]];
                if (det_abs(std::move(sub)) < eps) return false;
            } while (next_combination(csel, cols));
        } while (next_combination(rsel, rows));
    }
    return true;
}

// Coefficient matrix over the full M-column input layout (zeros where a
// family does not engage a column).
std::vector<std::vector<double>> full_matrix(const BcConfig& cfg, const FormFamily& fam) {
    std::vector<std::vector<double>> m(fam.size(), std::vector<double>(static_cast<size_t>(cfg.M), 0.0));
    for (size_t r = 0; r < fam.size(); ++r)
        for (size_t i = 0; i < fam.rows[r].terms.size(); ++i)
            m[r][fam.rows[r].terms[i].input] = fam.coeffs[r][i];
    return m;
}

// Rows of two families stacked, restricted to the first `cols` columns
// (the X_a then X_b part of the layout).
std::vector<std::vector<double>> stacked_block(const BcConfig& cfg, const FormFamily& a,
                                               const FormFamily& b, size_t cols) {
    std::vector<std::vector<double>> out;
    auto push = [&](const FormFamily& fam) {
        auto m = full_matrix(cfg, fam);
        for (auto& row : m) {
            row.resize(cols);
            out.push_back(row);
        }
    };
    push(a);
    push(b);
    return out;
}

}  // namespace

ChannelDraw draw_channel(const BcConfig& cfg, int t, uint64_t draw_index, uint64_t retry) {
    if (cfg.epsilon > std::pow(cfg.delta, cfg.N2) * std::tgamma(cfg.N2 + 1.0))
        throw std::invalid_argument("draw_channel: epsilon exceeds the attainable determinant bound");

    SplitRng root = SplitRng(cfg.seed).fork(0xc4a7, static_cast<uint64_t>(t), draw_index);
    constexpr uint64_t kBudget = 1000;
    for (uint64_t attempt = 0;; ++attempt) {
        if (attempt >= kBudget)
            throw std::runtime_error("draw_channel: rejection budget exhausted; epsilon too demanding");
        SplitRng rng = root.fork(0xd4a0, retry, attempt);

        ChannelDraw d;
        uint64_t family_tag = 0;
        for (Family f : kAllFamilies) {
            FormFamily fam;
            fam.rows = family_rows(cfg, f);
            fam.coeffs.reserve(fam.rows.size());
            for (size_t r = 0; r < fam.rows.size(); ++r) {
                CoefficientDraw cd = sample_coefficients(
                    fam.rows[r].arity(), cfg.delta, cfg.f_max, rng.fork(family_tag, r));
                fam.coeffs.push_back(std::move(cd.values));
            }
            d[f] = std::move(fam);
            ++family_tag;
        }

        bool ok = true;
        for (Family f : kAllFamilies) {
            if (d[f].size() == 0) continue;
            // The dense coefficient matrix of the family (rows x engaged terms).
            if (!all_square_blocks_ok(d[f].coeffs, cfg.epsilon)) {
                ok = false;
                break;
            }
        }
        // Recombination sanity: the stacked split families must be invertible
        // over the (X_a, X_b) columns so one is a change of basis of the other.
        const size_t n1cols = static_cast<size_t>(cfg.len_xa() + cfg.len_xb());
        if (ok && n1cols > 0) {
            auto c1 = stacked_block(cfg, d[Family::y1c], d[Family::y1d], n1cols);
            auto c2 = stacked_block(cfg, d[Family::y1_tilde_a], d[Family::y1_a], n1cols);
            if (det_abs(c1) < cfg.epsilon || det_abs(c2) < cfg.epsilon) ok = false;
        }
        if (ok) return d;
    }
}

std::vector<int64_t> eval_family(const FormFamily& fam, const CanonicalInput& in) {
    SymbolVector x = concat(concat(in.xa, in.xb), in.xc);
    std::vector<int64_t> out;
    out.reserve(fam.size());
    for (size_t r = 0; r < fam.size(); ++r) {
        CoefficientDraw cd;
        cd.values = fam.coeffs[r];
        out.push_back(eval_form(fam.rows[r], cd, x));
    }
    return out;
}

namespace {

void check_shapes(const BcConfig& cfg, const CanonicalInput& in) {
    if (static_cast<int>(in.xa.size()) != cfg.len_xa() ||
        static_cast<int>(in.xb.size()) != cfg.len_xb() ||
        static_cast<int>(in.xc.size()) != cfg.len_xc())
        throw std::invalid_argument("input block lengths do not match the configuration");
}

}  // namespace

std::vector<int64_t> output_y1(const BcConfig& cfg, const ChannelDraw& d, const CanonicalInput& in) {
    check_shapes(cfg, in);
    return eval_family(d[Family::y1], in);
}

std::vector<int64_t> output_y2(const BcConfig& cfg, const ChannelDraw& d, const CanonicalInput& in) {
    check_shapes(cfg, in);
    return eval_family(d[Family::y2], in);
}

std::pair<std::vector<int64_t>, std::vector<int64_t>> split_y1(const BcConfig& cfg,
                                                               const ChannelDraw& d,
                                                               const CanonicalInput& in) {
    check_shapes(cfg, in);
    return {eval_family(d[Family::y1_tilde_a], in), eval_family(d[Family::y1_a], in)};
}

DerivedOutputs derived_outputs(const BcConfig& cfg, const ChannelDraw& d,
                               const CanonicalInput& in) {
    check_shapes(cfg, in);
    DerivedOutputs out;
    out.y1c = eval_family(d[Family::y1c], in);
    out.y1d = eval_family(d[Family::y1d], in);
    out.y2a = eval_family(d[Family::y2a], in);
    out.y2b = eval_family(d[Family::y2b], in);
    out.y2c.assign(out.y2b.begin(), out.y2b.begin() + cfg.len_xa());
    out.y2d.assign(out.y2b.begin() + cfg.len_xa(), out.y2b.end());
    return out;
}

namespace {

std::pair<long long, long long> beta_fractions(const BcConfig& cfg, unsigned q) {
    const BigInt qq(q);
    if (q == 0 || qq % denominator(cfg.beta1) != 0 || qq % denominator(cfg.beta2) != 0)
        throw std::invalid_argument("c_bar_partitions: betas do not share denominator q");
    const BigInt m = numerator(cfg.beta1) * (qq / denominator(cfg.beta1));
    const BigInt e = numerator(cfg.beta2) * (qq / denominator(cfg.beta2));
    return {m.convert_to<long long>(), e.convert_to<long long>()};
}

}  // namespace

std::vector<CBarSlice> c_bar_partitions(const BcConfig& cfg, unsigned q) {
    auto [m, e] = beta_fractions(cfg, q);
    std::vector<CBarSlice> out;
    // e slices of width 1/q per y2c stream, starting at m/q.
    for (int s = 0; s < cfg.len_xa(); ++s)
        for (long long j = 0; j < e; ++j)
            out.push_back({true, s, Rat(m + j, q), Rat(m + j + 1, q)});
    // q-m slices per y2d stream, covering (m/q, 1].
    for (int s = 0; s < cfg.N2 - cfg.N1; ++s)
        for (long long j = 0; j < static_cast<long long>(q) - m; ++j)
            out.push_back({false, s, Rat(m + j, q), Rat(m + j + 1, q)});
    return out;
}

CBarSlice c_bar_slice(const BcConfig& cfg, unsigned q, long long index) {
    auto slices = c_bar_partitions(cfg, q);
    if (slices.empty()) throw std::invalid_argument("c_bar_slice: no slices for this configuration");
    if (index < 1) throw std::out_of_range("c_bar_slice: indices are 1-based");
    const long long n = static_cast<long long>(slices.size());
    return slices[static_cast<size_t>((index - 1) % n)];
}

int64_t eval_c_bar(const CBarSlice& s, const DerivedOutputs& out, const PowerScale& scale) {
    const auto& src = s.from_y2c ? out.y2c : out.y2d;
    if (s.stream < 0 || s.stream >= static_cast<int>(src.size()))
        throw std::out_of_range("eval_c_bar: stream index out of range");
    return window_i64(src[static_cast<size_t>(s.stream)],
                      static_cast<int64_t>(scale.pbar_u64(s.hi)),
                      static_cast<int64_t>(scale.pbar_u64(s.lo)));
}

std::vector<CTableEntry> example2_c_table() {
    const Rat q1(1, 4), q2(1, 2), q3(3, 4), one(1);
    std::vector<CTableEntry> t(7);
    t[0] = {false, {{4, q3, one}}};
    t[1] = {false, {{4, q2, q3}}};
    t[2] = {true, {{0, q3, one}, {1, q3, one}, {2, q3, one}, {3, q1, q2}, {4, q1, q2}}};
    t[3] = {false, {{3, q3, one}}};
    t[4] = {false, {{3, q2, q3}}};
    t[5] = {true, {{0, q3, one}, {1, q3, one}, {2, q3, one}, {3, q1, q2}, {4, q1, q2}}};
    t[6] = t[0];
    return t;
}

}  // namespace doflab
