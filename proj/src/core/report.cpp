#include "core/report.hpp"

#include <cmath>

namespace doflab {

namespace {
using ordered_json = nlohmann::ordered_json;
}

std::string SweepReport::to_json() const {
    ordered_json j;
    j["suite"] = suite;
    j["instance"] = instance;
    j["seed"] = seed;
    j["draws"] = draws;
    j["P_sweep"] = ordered_json::array();
    j["pbar"] = ordered_json::array();
    j["lhs"] = ordered_json::array();
    j["rhs"] = ordered_json::array();
    j["gap"] = ordered_json::array();
    j["stderr"] = ordered_json::array();
    j["normalized_slack"] = ordered_json::array();
    for (const auto& p : points) {
        j["P_sweep"].push_back(p.P);
        j["pbar"].push_back(p.pbar);
        j["lhs"].push_back(p.lhs);
        j["rhs"].push_back(p.rhs);
        j["gap"].push_back(p.gap);
        j["stderr"].push_back(p.std_error);
        j["normalized_slack"].push_back(p.slack);
    }
    j["pass"] = (verdict == kPass);
    j["verdict"] = verdict == kPass ? "PASS" : (verdict == kFail ? "FAIL" : "INCONCLUSIVE");
    if (!details.is_null()) j["details"] = details;
    return j.dump();
}

std::string SweepReport::to_csv() const {
    std::string out = "P,pbar,log2_pbar,lhs,rhs,gap,stderr,normalized_slack\n";
    for (const auto& p : points) {
        out += std::to_string(p.P) + "," + std::to_string(p.pbar) + ",";
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", p.log2_pbar,
                      p.lhs, p.rhs, p.gap, p.std_error, p.slack);
        out += buf;
    }
    return out;
}

int trend_verdict(const std::vector<SweepPoint>& points, double tau) {
    const size_t n = points.size();
    if (n < 2) return kInconclusive;

    const auto& last = points.back();
    const double final_slack = (last.gap - 2.0 * last.std_error) / last.log2_pbar;
    if (final_slack > tau) return kFail;

    // Nonincreasing over the top half, with a 2-sigma allowance for the
    // Monte-Carlo noise of both points.
    const size_t tail_start = n - (n + 1) / 2;
    for (size_t i = tail_start; i + 1 < n; ++i) {
        const double cushion = 2.0 * (points[i].std_error / points[i].log2_pbar +
                                      points[i + 1].std_error / points[i + 1].log2_pbar);
        if (points[i + 1].slack > points[i].slack + cushion) return kFail;
    }
    return kPass;
}

}  // namespace doflab
