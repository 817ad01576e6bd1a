// Exact-rational computation of the achievable degrees-of-freedom region of
// the two-user MIMO broadcast channel with partial CSIT: the effective CSIT
// exponent beta_o, the bounding halfspaces, exact vertex enumeration,
// membership, and sweep-based cross checks.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "core/channel_model.hpp"
#include "core/rational.hpp"

namespace doflab {

struct Halfspace {
    Rat a1, a2, b;    // a1*d1 + a2*d2 <= b
    std::string tag;  // constraint identifier (B1..B9, B33, nonneg)
};

using Vertex = std::pair<Rat, Rat>;

struct RegionPolytope {
    BcConfig cfg;
    std::string regime;  // "N2<=M" or "N2>M"
    std::string branch;  // "b1+b2>=1" or "b1+b2<1" (empty when N2 > M)
    Rat beta_o;
    bool beta_o_flagged = false;  // degenerate 0/0 resolved to 0
    std::vector<Halfspace> halfspaces;
    std::vector<Vertex> vertices;  // extreme points, counterclockwise
};

// The effective CSIT exponent of the binding sum-DoF constraint. The
// degenerate 0/0 case (N1 == N2, beta2 == 0 on the < 1 branch) resolves to 0
// and sets *flagged.
Rat beta_o(int M, int N1, int N2, const Rat& beta1, const Rat& beta2, bool* flagged = nullptr);

RegionPolytope region(const BcConfig& cfg);

// Extreme points of the (bounded, nonempty) intersection, exact rationals in
// counterclockwise order starting from the lexicographically smallest.
// Throws std::runtime_error on an empty or unbounded intersection.
std::vector<Vertex> enumerate_vertices(const std::vector<Halfspace>& halfspaces);

bool contains(const RegionPolytope& r, const Rat& d1, const Rat& d2);

// max d1+d2 over the region.
Rat sum_dof(const RegionPolytope& r);

struct MonotonicityReport {
    int configs_checked = 0;
    std::vector<std::string> findings;  // empty when every check holds
    bool clean() const { return findings.empty(); }
};

// Sweeps a rational beta grid for each antenna triple: region inclusion must
// be monotone in beta1 and beta2, and the two beta_o branch formulas must
// agree on the boundary beta1+beta2 = 1. Violations are reported, not thrown.
MonotonicityReport cross_check_monotonicity(const std::vector<std::array<int, 3>>& triples,
                                            int grid_points);

std::string region_json(const RegionPolytope& r);
std::string region_csv(const RegionPolytope& r);

}  // namespace doflab
