#include "core/power_levels.hpp"

#include <limits>

namespace doflab {

PowerScale::PowerScale(Rat power) : power_(std::move(power)) {
    if (power_ < 1) throw std::domain_error("PowerScale: power must be >= 1");
}

BigInt PowerScale::pbar(const Rat& lambda) const {
    if (lambda < 0) throw std::domain_error("pbar: negative exponent");
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(lambda);
        if (it != cache_.end()) return it->second;
    }

    // pbar(p/q) = floor((P^p)^(1/(2q))), evaluated on exact integers. For
    // rational P = a/b this is the largest r with r^(2q) * b^p <= a^p.
    const BigInt pnum = numerator(lambda);
    const BigInt pden = denominator(lambda);
    if (pnum > 1024 || pden > 1024)
        throw std::domain_error("pbar: exponent " + rat_string(lambda) + " out of range");
    const unsigned p = pnum.convert_to<unsigned>();
    const unsigned q = pden.convert_to<unsigned>();

    const BigInt a = pow(numerator(power_), p);
    const BigInt b = pow(denominator(power_), p);
    const unsigned k = 2 * q;
    BigInt r = iroot_floor(a / b, k);
    while (pow(r + 1, k) * b <= a) ++r;
    while (r > 0 && pow(r, k) * b > a) --r;
    if (!(pow(r, k) * b <= a && a < pow(r + 1, k) * b))
        throw std::logic_error("pbar: root post-check failed");

    std::lock_guard<std::mutex> lock(mutex_);
    cache_.emplace(lambda, r);
    return r;
}

uint64_t PowerScale::pbar_u64(const Rat& lambda) const {
    BigInt v = pbar(lambda);
    if (v > BigInt(std::numeric_limits<int64_t>::max() / 4))
        throw std::overflow_error("pbar_u64: value too large for kernel arithmetic");
    return v.convert_to<uint64_t>();
}

DiscreteSymbol::DiscreteSymbol(BigInt v, Rat lambda, const PowerScale& s)
    : value(std::move(v)), level(std::move(lambda)), scale(&s) {
    if (value < 0 || value >= s.pbar(level))
        throw std::domain_error("DiscreteSymbol: value outside alphabet at level " +
                                rat_string(level));
}

BigInt part_low(const BigInt& x, const PowerScale& s, const Rat& l1) {
    if (l1 < 0) throw std::domain_error("part_low: negative level");
    const BigInt m = s.pbar(l1);
    return x - m * (x / m);
}

BigInt part_low(const DiscreteSymbol& x, const Rat& l1) {
    return part_low(x.value, *x.scale, l1);
}

BigInt part_mid(const BigInt& x, const PowerScale& s, const Rat& l1, const Rat& l2) {
    if (l1 < 0) throw std::domain_error("part_mid: negative level");
    if (l1 > l2) throw std::domain_error("part_mid: lower level exceeds upper level");
    const BigInt hi = s.pbar(l2);
    const BigInt lo = s.pbar(l1);
    const BigInt kept = x - hi * (x / hi);
    return kept / lo;
}

BigInt part_mid(const DiscreteSymbol& x, const Rat& l1, const Rat& l2) {
    return part_mid(x.value, *x.scale, l1, l2);
}

BigInt top_fraction(const BigInt& x, const PowerScale& s, const Rat& lam) {
    if (lam < 0 || lam > 1) throw std::domain_error("top_fraction: fraction outside [0,1]");
    if (x < 0 || x >= s.pbar(1))
        throw std::domain_error("top_fraction: symbol outside the unit-level alphabet");
    return part_mid(x, s, Rat(1) - lam, Rat(1));
}

BigInt top_fraction(const DiscreteSymbol& x, const Rat& lam) {
    return top_fraction(x.value, *x.scale, lam);
}

SymbolVector concat(const SymbolVector& v, const SymbolVector& w) {
    if (v.scale() && w.scale() && !(*v.scale() == *w.scale()))
        throw std::invalid_argument("concat: symbol vectors use different power scales");
    SymbolVector out = v;
    out.entries.insert(out.entries.end(), w.entries.begin(), w.entries.end());
    return out;
}

SymbolVector rotate_slice(const SymbolVector& v, size_t m, size_t n) {
    const size_t k = v.size();
    if (m >= k || n >= k) throw std::out_of_range("rotate_slice: index out of range");
    SymbolVector out;
    out.entries.reserve(n);
    for (size_t i = 0; i < n; ++i) out.entries.push_back(v.entries[(m + i) % k]);
    return out;
}

IntMatrix submatrix(const IntMatrix& mat, size_t a, size_t b, size_t c, size_t d) {
    if (a + b > mat.rows || c + d > mat.cols)
        throw std::out_of_range("submatrix: block exceeds matrix bounds");
    IntMatrix out(b, d);
    for (size_t r = 0; r < b; ++r)
        for (size_t j = 0; j < d; ++j) out.at(r, j) = mat.at(a + r, c + j);
    return out;
}

}  // namespace doflab
