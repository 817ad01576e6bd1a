// Sweep reports shared by the verification suites: per-power entropy sides,
// gaps, normalized slack, and the trend-based pass rule.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace doflab {

// Verdicts double as process exit codes.
enum Verdict : int { kPass = 0, kFail = 1, kInconclusive = 3 };

struct LabConfig {
    std::vector<long long> p_sweep = {16, 64, 256, 1024};
    int draws = 200;
    uint64_t seed = 0;
    double tau = 0.15;      // final normalized-slack threshold
    int budget_bits = 20;   // cap on per-slot input-space bits
    int labels = 2;         // conditioning labels (message bits + 1)
    int threads = 1;
};

struct SweepPoint {
    long long P = 0;
    uint64_t pbar = 0;
    double log2_pbar = 0;
    double lhs = 0;      // bounded side
    double rhs = 0;      // bounding side (without the vanishing term)
    double gap = 0;      // lhs - rhs; the theorem drives gap/log2(pbar) to <= 0
    double std_error = 0;
    double slack = 0;    // gap / log2(pbar)
};

struct SweepReport {
    std::string suite;
    std::string instance;
    uint64_t seed = 0;
    int draws = 0;
    std::vector<SweepPoint> points;
    int verdict = kInconclusive;
    nlohmann::ordered_json details;  // suite-specific extras

    std::string to_json() const;
    std::string to_csv() const;
};

// PASS iff the normalized slack is nonincreasing (up to twice the combined
// standard error) across the top half of the sweep and the noise-adjusted
// final slack is <= tau. Fewer than two points is INCONCLUSIVE.
int trend_verdict(const std::vector<SweepPoint>& points, double tau);

}  // namespace doflab
