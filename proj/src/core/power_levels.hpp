// Integer power-level alphabets and the floor-based partition operators.
//
// A signal symbol at level lambda lives in X_lambda = {0, ..., pbar(lambda)-1}
// where pbar(lambda) = floor(sqrt(P^lambda)). All partition arithmetic is done
// with exact integers; floors of negative quantities truncate toward zero,
// which is what C++ integer division does natively.
#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <vector>

#include "core/rational.hpp"

namespace doflab {

class PowerScale {
  public:
    // P >= 1. Exponents are exact rationals; pbar values are computed by
    // integer k-th roots with a post-check, never by floating point.
    explicit PowerScale(Rat power);
    explicit PowerScale(long long power) : PowerScale(Rat(power)) {}

    const Rat& power() const { return power_; }

    // pbar(lambda) = floor(sqrt(P^lambda)). lambda < 0 is a domain error.
    BigInt pbar(const Rat& lambda) const;

    // Same, narrowed to uint64 for the enumeration kernels.
    uint64_t pbar_u64(const Rat& lambda) const;

    bool operator==(const PowerScale& o) const { return power_ == o.power_; }

  private:
    Rat power_;
    mutable std::mutex mutex_;
    mutable std::map<Rat, BigInt> cache_;
};

struct DiscreteSymbol {
    BigInt value;
    Rat level;
    const PowerScale* scale = nullptr;

    DiscreteSymbol(BigInt v, Rat lambda, const PowerScale& s);
};

struct SymbolVector {
    std::vector<DiscreteSymbol> entries;

    size_t size() const { return entries.size(); }
    const PowerScale* scale() const { return entries.empty() ? nullptr : entries.front().scale; }
};

// (X)_{l1}: bottom l1 levels, i.e. x mod pbar(l1).
BigInt part_low(const BigInt& x, const PowerScale& s, const Rat& l1);
BigInt part_low(const DiscreteSymbol& x, const Rat& l1);

// (X)^{l2}_{l1}: the window between levels l1 and l2. Requires l1 <= l2.
BigInt part_mid(const BigInt& x, const PowerScale& s, const Rat& l1, const Rat& l2);
BigInt part_mid(const DiscreteSymbol& x, const Rat& l1, const Rat& l2);

// (X)^{lam} = (X)^{1}_{1-lam} for x in X_1 and 0 <= lam <= 1.
BigInt top_fraction(const BigInt& x, const PowerScale& s, const Rat& lam);
BigInt top_fraction(const DiscreteSymbol& x, const Rat& lam);

SymbolVector concat(const SymbolVector& v, const SymbolVector& w);

// Cyclic slice: entries m+1..m+n in 1-based terms, wrapping past the end.
// Requires m < len(v) and n < len(v).
SymbolVector rotate_slice(const SymbolVector& v, size_t m, size_t n);

struct IntMatrix {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<BigInt> data;  // row-major

    IntMatrix() = default;
    IntMatrix(size_t r, size_t c) : rows(r), cols(c), data(r * c) {}
    BigInt& at(size_t r, size_t c) { return data[r * cols + c]; }
    const BigInt& at(size_t r, size_t c) const { return data[r * cols + c]; }
    bool operator==(const IntMatrix& o) const {
        return rows == o.rows && cols == o.cols && data == o.data;
    }
};

// Rows a+1..a+b, columns c+1..c+d (1-based block selection, no wrap).
IntMatrix submatrix(const IntMatrix& m, size_t a, size_t b, size_t c, size_t d);

// Kernel helper: apply an optional mod then an optional divide, both with
// truncation toward zero. mod_hi == 0 skips the mod; div_lo <= 1 skips the
// divide. Safe for negative v.
inline int64_t window_i64(int64_t v, int64_t mod_hi, int64_t div_lo) {
    if (mod_hi > 0) v -= mod_hi * (v / mod_hi);
    if (div_lo > 1) v /= div_lo;
    return v;
}

}  // namespace doflab
