// Floor-sum linear combinations of trimmed symbols: random (bounded-density
// coefficients) and arbitrary (fixed constants) variants, their length
// functional T, and the coefficient sampler.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "core/power_levels.hpp"
#include "core/rng.hpp"

namespace doflab {

struct CoefficientDraw {
    enum class Kind { bounded_density_random, arbitrary_constant };

    std::vector<double> values;
    double delta = 1.0;   // magnitude bound, |g| <= delta
    double f_max = 1.0;   // density bound
    Kind kind = Kind::bounded_density_random;

    size_t arity() const { return values.size(); }
};

struct FormTerm {
    size_t input = 0;  // index into the evaluated SymbolVector
    Rat gamma;         // trim window is (delta_trim, gamma); value = (x)^{gamma}_{delta_trim}
    Rat delta_trim;
    Rat eta;           // native level of the input
};

struct LinearFormSpec {
    std::vector<FormTerm> terms;

    size_t arity() const { return terms.size(); }
    void validate() const;
};

// Raised when a product g*x lands within 2^-40 of an integer; the caller
// redraws the coefficients (a measure-zero event under continuous laws).
struct NearIntegerEvent : std::runtime_error {
    NearIntegerEvent() : std::runtime_error("coefficient product too close to an integer") {}
};

// Truncation-toward-zero floor of a real, the floor convention used for all
// form evaluation. Throws NearIntegerEvent if y is ambiguous at 2^-40.
int64_t floor_trunc_checked(double y);

// sum_i floor(g_i * (x_i)^{gamma_i}_{delta_i}).
int64_t eval_form(const LinearFormSpec& spec, const CoefficientDraw& draw,
                  const SymbolVector& x);

// T = max_j (gamma_j - delta_j)^+.
Rat form_length(const LinearFormSpec& spec);

// T((A)^lambda_mu) = (min(lambda, T) - mu)^+. Requires 0 <= mu <= lambda.
Rat form_length_window(const LinearFormSpec& spec, const Rat& mu, const Rat& lambda);

// ceil(k * delta * pbar(T)); every evaluation of the form lies in +-bound
// when the scale's pbar powers are exact.
BigInt range_bound(const LinearFormSpec& spec, const CoefficientDraw& draw,
                   const PowerScale& scale);

// i.i.d. coefficients from the default compliant law: uniform on
// [-delta,-mu] u [mu,delta] with density 1/(2(delta-mu)) <= f_max.
// Requires delta >= 1, f_max >= 1 (and thus 2*delta >= 1/f_max).
CoefficientDraw sample_coefficients(size_t count, double delta, double f_max, SplitRng rng,
                                    double min_magnitude = 0.05);

}  // namespace doflab
