// Canonical deterministic two-user MIMO broadcast-channel instances: the
// transmit-space partition X_a/X_b/X_c, receiver output form families,
// receiver-side splits, derived auxiliary outputs, and the 1/q-level slice
// index used by the converse machinery.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/linear_forms.hpp"
#include "core/power_levels.hpp"
#include "core/rational.hpp"
#include "core/rng.hpp"

namespace doflab {

struct BcConfig {
    int M = 0;           // effective transmit antennas (clamped to N1+N2)
    int M_original = 0;  // as requested
    int N1 = 0;
    int N2 = 0;
    Rat beta1;
    Rat beta2;
    bool swapped = false;   // users were reordered so N1 <= N2
    bool n2_gt_m = false;   // N2 > M regime (region module handles it)
    double delta = 1.0;
    double epsilon = 1e-3;  // determinant floor for square channel blocks
    double f_max = 1.0;
    uint64_t seed = 0;

    int len_xa() const { return M - N2; }
    int len_xb() const { return N1 + N2 - M; }
    int len_xc() const { return M - N1; }
};

// Validates antenna counts and beta ranges, reorders users so N1 <= N2, and
// clamps M to N1+N2 (extra transmit dimensions do not change the region).
BcConfig normalize_config(int M, int N1, int N2, const Rat& beta1, const Rat& beta2);

// One receiver-side family of floor-sum forms: `rows` fixes the trim
// structure, `coeffs[r][i]` is the coefficient of term i in row r.
struct FormFamily {
    std::vector<LinearFormSpec> rows;
    std::vector<std::vector<double>> coeffs;

    size_t size() const { return rows.size(); }
};

// Identifiers for the form families attached to an instance.
enum class Family { y1, y2, y1_tilde_a, y1_a, y1c, y1d, y2a, y2b };
inline constexpr std::array<Family, 8> kAllFamilies = {
    Family::y1, Family::y2, Family::y1_tilde_a, Family::y1_a,
    Family::y1c, Family::y1d, Family::y2a, Family::y2b};

// All families for one channel use, drawn from the bounded-density law and
// rejection-sampled until every square coefficient block (including the two
// stacked recombination blocks) has |det| >= epsilon.
struct ChannelDraw {
    std::array<FormFamily, 8> families;

    const FormFamily& operator[](Family f) const {
        return families[static_cast<size_t>(f)];
    }
    FormFamily& operator[](Family f) { return families[static_cast<size_t>(f)]; }
};

// `retry` seeds an independent attempt (used when a caller rejects a draw
// for its own reasons, e.g. a near-integer coefficient product).
ChannelDraw draw_channel(const BcConfig& cfg, int t, uint64_t draw_index, uint64_t retry = 0);

struct CanonicalInput {
    SymbolVector xa, xb, xc;  // lengths M-N2, N1+N2-M, M-N1; entries in X_1
};

std::vector<int64_t> eval_family(const FormFamily& fam, const CanonicalInput& in);

std::vector<int64_t> output_y1(const BcConfig& cfg, const ChannelDraw& d, const CanonicalInput& in);
std::vector<int64_t> output_y2(const BcConfig& cfg, const ChannelDraw& d, const CanonicalInput& in);

// (y1_tilde_a, y1_a): the projection away from X_a and its complement.
std::pair<std::vector<int64_t>, std::vector<int64_t>> split_y1(const BcConfig& cfg,
                                                               const ChannelDraw& d,
                                                               const CanonicalInput& in);

struct DerivedOutputs {
    std::vector<int64_t> y1c, y1d, y2a, y2b, y2c, y2d;
};

DerivedOutputs derived_outputs(const BcConfig& cfg, const ChannelDraw& d,
                               const CanonicalInput& in);

// One 1/q-level slice of a derived output stream.
struct CBarSlice {
    bool from_y2c = true;  // else from y2d
    int stream = 0;        // 0-based index within the family
    Rat lo, hi;            // window levels
};

// The canonical slice list: e*(M-N2) slices of the y2c streams between m/q
// and (m+e)/q, then (q-m)*(N2-N1) slices of the y2d streams between m/q and
// 1, in index order. Requires beta1 = m/q and beta2 = e/q for the given q.
std::vector<CBarSlice> c_bar_partitions(const BcConfig& cfg, unsigned q);

// 1-based slice lookup with the wrap rule: indices beyond the list length
// cycle back to the beginning.
CBarSlice c_bar_slice(const BcConfig& cfg, unsigned q, long long index);

int64_t eval_c_bar(const CBarSlice& s, const DerivedOutputs& out, const PowerScale& scale);

// Fixed seven-entry table of sub-variables over five unit-level streams,
// used by the second worked-example suite. Entries 3 and 6 are random
// combinations of the listed windows; the rest are single windows. Entry 7
// repeats entry 1.
struct CTablePiece {
    int stream;  // 0-based
    Rat lo, hi;
};
struct CTableEntry {
    bool is_form = false;  // true: random combination over `pieces`
    std::vector<CTablePiece> pieces;
};
std::vector<CTableEntry> example2_c_table();

}  // namespace doflab
