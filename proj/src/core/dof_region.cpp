#include "core/dof_region.hpp"

#include <algorithm>
#include <array>

#include <nlohmann/json.hpp>

namespace doflab {

namespace {
using ordered_json = nlohmann::ordered_json;
}

Rat beta_o(int M, int N1, int N2, const Rat& beta1, const Rat& beta2, bool* flagged) {
    if (flagged) *flagged = false;
    const Rat m(M), n1(N1), n2(N2);
    if (beta1 + beta2 >= 1) {
        // (N1 - N2 + (N2-N1) b2 + (M-N1) b1) / (M - N1)
        if (M == N1) return 1;  // degenerate M == N1 == N2: full cooperation already
        return (n1 - n2 + (n2 - n1) * beta2 + (m - n1) * beta1) / (m - n1);
    }
    const Rat den = (n2 - n1) * (Rat(1) - beta1) + (m - n2) * beta2;
    if (den == 0) {
        // Only reachable with N1 == N2 and beta2 == 0; the numerator is also
        // zero, so resolve to 0 by continuity and flag the configuration.
        if (flagged) *flagged = true;
        return 0;
    }
    return beta1 * beta2 * (m - n2) / den;
}

std::vector<Vertex> enumerate_vertices(const std::vector<Halfspace>& halfspaces) {
    // Bounding guard: a huge box detects unbounded inputs.
    static const Rat kBig(1000000000);
    std::vector<Halfspace> hs = halfspaces;
    hs.push_back({1, 0, kBig, "guard"});
    hs.push_back({0, 1, kBig, "guard"});
    hs.push_back({-1, 0, kBig, "guard"});
    hs.push_back({0, -1, kBig, "guard"});

    auto satisfies_all = [&](const Rat& x, const Rat& y) {
        for (const auto& h : hs)
            if (h.a1 * x + h.a2 * y > h.b) return false;
        return true;
    };

    // All pairwise boundary intersections, filtered by feasibility.
    std::vector<Vertex> pts;
    for (size_t i = 0; i < hs.size(); ++i) {
        for (size_t j = i + 1; j < hs.size(); ++j) {
            const Rat det = hs[i].a1 * hs[j].a2 - hs[j].a1 * hs[i].a2;
            if (det == 0) continue;
            const Rat x = (hs[i].b * hs[j].a2 - hs[j].b * hs[i].a2) / det;
            const Rat y = (hs[i].a1 * hs[j].b - hs[j].a1 * hs[i].b) / det;
            if (satisfies_all(x, y)) pts.emplace_back(x, y);
        }
    }
    if (pts.empty()) throw std::runtime_error("enumerate_vertices: empty region");

    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    for (const auto& [x, y] : pts)
        if (abs(numerator(x)) >= numerator(kBig) * denominator(x) ||
            abs(numerator(y)) >= numerator(kBig) * denominator(y))
            throw std::runtime_error("enumerate_vertices: unbounded region");

    if (pts.size() <= 2) return pts;

    // Monotone-chain hull with exact cross products; collinear points are
    // dropped so only extreme points remain.
    auto cross = [](const Vertex& o, const Vertex& a, const Vertex& b) {
        return (a.first - o.first) * (b.second - o.second) -
               (a.second - o.second) * (b.first - o.first);
    };
    std::vector<Vertex> hull;
    for (const auto& p : pts) {  // lower
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0)
            hull.pop_back();
        hull.push_back(p);
    }
    const size_t lower = hull.size() + 1;
    for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {  // upper
        while (hull.size() >= lower && cross(hull[hull.size() - 2], hull.back(), *it) <= 0)
            hull.pop_back();
        hull.push_back(*it);
    }
    hull.pop_back();  // first point repeated
    // Counterclockwise, starting at the lexicographically smallest vertex.
    return hull;
}

RegionPolytope region(const BcConfig& cfg) {
    RegionPolytope r;
    r.cfg = cfg;
    const Rat n1(cfg.N1), n2(cfg.N2);
    // The N2 > M regime keeps the requested antenna count.
    const int m_eff = cfg.n2_gt_m ? cfg.M_original : cfg.M;
    const Rat m(m_eff);

    r.halfspaces.push_back({-1, 0, 0, "nonneg_d1"});
    r.halfspaces.push_back({0, -1, 0, "nonneg_d2"});
    if (!cfg.n2_gt_m) {
        r.regime = "N2<=M";
        r.branch = (cfg.beta1 + cfg.beta2 >= 1) ? "b1+b2>=1" : "b1+b2<1";
        r.beta_o = beta_o(m_eff, cfg.N1, cfg.N2, cfg.beta1, cfg.beta2, &r.beta_o_flagged);
        r.halfspaces.push_back({1, 0, n1, "B1"});
        r.halfspaces.push_back({0, 1, n2, "B2"});
        r.halfspaces.push_back(
            {Rat(1) / n1, Rat(1) / n2, Rat(1) + (m - n1) * cfg.beta1 / n2, "B4"});
        r.halfspaces.push_back({1, 1, n2 + (m - n2) * cfg.beta2, "B3"});
        r.halfspaces.push_back({1, 1, n2 + (m - n2) * r.beta_o, "B33"});
    } else {
        r.regime = "N2>M";
        r.halfspaces.push_back({1, 0, n1, "B7"});
        r.halfspaces.push_back({1, 1, m, "B8"});
        r.halfspaces.push_back(
            {Rat(1) / n1, Rat(1) / m, Rat(1) + (m - n1) * cfg.beta1 / m, "B9"});
    }
    r.vertices = enumerate_vertices(r.halfspaces);
    return r;
}

bool contains(const RegionPolytope& r, const Rat& d1, const Rat& d2) {
    for (const auto& h : r.halfspaces)
        if (h.a1 * d1 + h.a2 * d2 > h.b) return false;
    return true;
}

Rat sum_dof(const RegionPolytope& r) {
    Rat best = 0;
    for (const auto& [x, y] : r.vertices) best = std::max(best, Rat(x + y));
    return best;
}

namespace {

// A subset of B iff every vertex of A satisfies B's halfspaces.
bool region_subset(const RegionPolytope& a, const RegionPolytope& b) {
    for (const auto& [x, y] : a.vertices)
        if (!contains(b, x, y)) return false;
    return true;
}

}  // namespace

MonotonicityReport cross_check_monotonicity(const std::vector<std::array<int, 3>>& triples,
                                            int grid_points) {
    MonotonicityReport rep;
    const int g = std::max(grid_points, 2);
    for (const auto& [M, N1, N2] : triples) {
        std::vector<Rat> betas;
        for (int i = 0; i < g; ++i) betas.emplace_back(i, g - 1);
        std::vector<std::vector<RegionPolytope>> grid(g);
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j)
                grid[i].push_back(region(normalize_config(M, N1, N2, betas[i], betas[j])));
        ++rep.configs_checked;

        auto tag = [&](int i, int j) {
            return "(" + std::to_string(M) + "," + std::to_string(N1) + "," +
                   std::to_string(N2) + ") b1=" + rat_string(betas[i]) +
                   " b2=" + rat_string(betas[j]);
        };
        for (int i = 0; i < g; ++i) {
            for (int j = 0; j < g; ++j) {
                if (i + 1 < g && !region_subset(grid[i][j], grid[i + 1][j]))
                    rep.findings.push_back("region not monotone in beta1 at " + tag(i, j));
                if (j + 1 < g && !region_subset(grid[i][j], grid[i][j + 1]))
                    rep.findings.push_back("region not monotone in beta2 at " + tag(i, j));
            }
        }
        // Branch agreement along beta1 + beta2 = 1 (skipping the degenerate
        // endpoint where the < 1 formula is 0/0).
        for (int i = 0; i < g; ++i) {
            const Rat b1 = betas[i], b2 = Rat(1) - betas[i];
            const Rat den = (N2 - N1) * (Rat(1) - b1) + Rat(M - N2) * b2;
            if (den == 0 || M == N1) continue;
            const Rat lt = b1 * b2 * Rat(M - N2) / den;
            const Rat ge =
                (Rat(N1 - N2) + Rat(N2 - N1) * b2 + Rat(M - N1) * b1) / Rat(M - N1);
            if (lt != ge)
                rep.findings.push_back("beta_o branch mismatch at " + tag(i, 0) +
                                       " on the boundary line");
        }
    }
    return rep;
}

namespace {

ordered_json config_json(const BcConfig& cfg) {
    ordered_json j;
    j["M"] = cfg.M_original;
    j["M_effective"] = cfg.M;
    j["N1"] = cfg.N1;
    j["N2"] = cfg.N2;
    j["beta1"] = rat_string(cfg.beta1);
    j["beta2"] = rat_string(cfg.beta2);
    j["swapped"] = cfg.swapped;
    return j;
}

}  // namespace

std::string region_json(const RegionPolytope& r) {
    ordered_json j;
    j["config"] = config_json(r.cfg);
    j["regime"] = r.regime;
    if (!r.branch.empty()) j["branch"] = r.branch;
    j["beta_o"] = rat_string(r.beta_o);
    if (r.beta_o_flagged) j["beta_o_degenerate"] = true;
    j["halfspaces"] = ordered_json::array();
    for (const auto& h : r.halfspaces) {
        ordered_json hj;
        hj["a1"] = rat_string(h.a1);
        hj["a2"] = rat_string(h.a2);
        hj["b"] = rat_string(h.b);
        hj["tag"] = h.tag;
        j["halfspaces"].push_back(hj);
    }
    j["vertices"] = ordered_json::array();
    for (const auto& [x, y] : r.vertices)
        j["vertices"].push_back(ordered_json::array({rat_string(x), rat_string(y)}));
    j["sum_dof"] = rat_string(sum_dof(r));
    return j.dump();
}

std::string region_csv(const RegionPolytope& r) {
    std::string out = "d1,d2\n";
    for (const auto& [x, y] : r.vertices) out += rat_string(x) + "," + rat_string(y) + "\n";
    return out;
}

}  // namespace doflab
