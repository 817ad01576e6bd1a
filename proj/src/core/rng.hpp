// Splittable counter-style RNG. Every random quantity in the library is
// derived from (seed, stream tags...) so results are reproducible for a
// given seed regardless of evaluation order or thread count.
#pragma once

#include <cstdint>

namespace doflab {

class SplitRng {
  public:
    explicit SplitRng(uint64_t seed) : state_(mix(seed + kSalt)) {}

    // Derives an independent substream. Tags identify the consumer
    // (draw index, antenna, retry counter, ...).
    SplitRng fork(uint64_t a, uint64_t b = 0, uint64_t c = 0) const {
        uint64_t s = state_;
        s = mix(s ^ mix(a + 0x9e3779b97f4a7c15ull));
        s = mix(s ^ mix(b + 0xbf58476d1ce4e5b9ull));
        s = mix(s ^ mix(c + 0x94d049bb133111ebull));
        return SplitRng(FromState{}, s);
    }

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    // Unbiased uniform integer in [0, n).
    uint64_t next_below(uint64_t n) {
        if (n == 0) return 0;
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

  private:
    struct FromState {};
    SplitRng(FromState, uint64_t s) : state_(s) {}

    static uint64_t mix(uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    static constexpr uint64_t kSalt = 0x5dec0de5eedull;
    uint64_t state_;
};

}  // namespace doflab
