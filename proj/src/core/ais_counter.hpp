// Brute-force and Monte-Carlo study of aligned image sets: the partition of
// part-image values by whole-image values, alignment probabilities against
// the analytic bound, and logarithmic growth of expected set sizes.
#pragma once

#include <nlohmann/json.hpp>

#include "core/entropy_lab.hpp"

namespace doflab {

struct AisConfig {
    enum class Kind { toy, general } kind = Kind::toy;

    // Toy instance: two unit-level inputs, whole Z = L1(X1,X2), helper
    // Z' = L2(X1,X2); parts are (Z)^1_cut and (Z')_cut.
    Rat cut{4, 5};
    bool drop_whole = false;              // negative control: Z has no terms
    bool reuse_whole_coefficients = false;  // Z' reuses Z's coefficients

    // General instance: the X_a-bearing derived family over a BC config with
    // beta1 = m/q, beta2 = e/q.
    BcConfig instance;
    unsigned q = 0;

    int pairs = 0;  // alignment batch size (0 disables)
    int alignment_draws = 200;
    long long alignment_P = 256;
    double delta = 1.0, f_max = 1.0;

    static AisConfig from_json(const nlohmann::json& j);
};

struct CodewordPair {
    std::vector<uint32_t> e, f;  // same shape, values in X_1
};

// Difference profiles of a codeword pair for the general instance:
// a[j] is the raw (X_a block) or windowed (X_c block) image difference,
// delta_breve[j] the corresponding top-window difference.
struct PairDiffs {
    std::vector<int64_t> a;
    std::vector<int64_t> delta_breve;
};
PairDiffs codeword_diffs(const BcConfig& cfg, unsigned q, const CodewordPair& pair,
                         const PowerScale& scale);

// Per-draw enumeration of the whole input space: distinct part-image values
// are grouped by the whole-image value of their first occurrence (the
// canonical functional-dependence representative), which makes the grouping
// a true partition of the part-image values.
struct ImageMapStats {
    uint64_t num_images = 0;  // distinct part-image values
    uint64_t num_cells = 0;   // distinct canonical whole-image values
    uint64_t max_cell = 0;
    double mean_cell = 0;
    double h_uprime_given_u = 0;  // bits, exact for the draw
    std::vector<uint64_t> cell_size_histogram;  // index = size (capped)
};

ImageMapStats image_map(const InputSpace& space, const MeasuredVar& parts,
                        const MeasuredVar& whole);

struct AlignmentCase {
    double estimate = 0;
    double std_error = 0;
    double bound = 0;  // product over whole forms of 2*k*f_max / max_j |A_j|
    bool within() const { return estimate <= bound + 3.0 * std_error; }
};

AlignmentCase alignment_probability(const AisConfig& cfg, const CodewordPair& pair,
                                    int draws, uint64_t seed);

// E|S| versus pbar with a log-model fit (excluding the smallest point).
// PASS iff the power-law exponent is <= 0.1 and the relative residual of the
// log model is small; reported in details as c1, c2, exponent, residual.
SweepReport expected_sizes_sweep(const AisConfig& cfg, const LabConfig& lab);

// gap(P) = H(parts|G) - H(whole|G); PASS per the trend rule.
SweepReport toy_example_check(const AisConfig& cfg, const LabConfig& lab);

// Full suite: size sweep + functional-dependence bound per draw + alignment
// batch over seeded random codeword pairs.
SweepReport run_ais_suite(const AisConfig& cfg, const LabConfig& lab);

}  // namespace doflab
