#include "core/linear_forms.hpp"

#include <algorithm>
#include <cmath>

namespace doflab {

void LinearFormSpec::validate() const {
    for (const auto& t : terms) {
        if (t.delta_trim < 0 || t.delta_trim > t.gamma || t.gamma > t.eta)
            throw std::invalid_argument("LinearFormSpec: trim must satisfy 0 <= delta <= gamma <= eta");
    }
}

int64_t floor_trunc_checked(double y) {
    if (std::fabs(y - std::nearbyint(y)) < 0x1.0p-40 && y != std::nearbyint(y))
        throw NearIntegerEvent();
    return static_cast<int64_t>(std::trunc(y));
}

int64_t eval_form(const LinearFormSpec& spec, const CoefficientDraw& draw,
                  const SymbolVector& x) {
    if (spec.arity() != draw.arity())
        throw std::invalid_argument("eval_form: spec and draw arity mismatch");
    spec.validate();
    int64_t acc = 0;
    for (size_t i = 0; i < spec.terms.size(); ++i) {
        const FormTerm& t = spec.terms[i];
        if (t.input >= x.size()) throw std::out_of_range("eval_form: term input out of range");
        const BigInt v = part_mid(x.entries[t.input], t.delta_trim, t.gamma);
        acc += floor_trunc_checked(draw.values[i] * v.convert_to<double>());
    }
    return acc;
}

Rat form_length(const LinearFormSpec& spec) {
    Rat best = 0;
    for (const auto& t : spec.terms) {
        Rat len = t.gamma - t.delta_trim;
        if (len < 0) len = 0;
        if (len > best) best = len;
    }
    return best;
}

Rat form_length_window(const LinearFormSpec& spec, const Rat& mu, const Rat& lambda) {
    if (mu < 0 || mu > lambda) throw std::domain_error("form_length_window: requires 0 <= mu <= lambda");
    Rat t = form_length(spec);
    Rat clipped = std::min(lambda, t);
    Rat out = clipped - mu;
    return out < 0 ? Rat(0) : out;
}

BigInt range_bound(const LinearFormSpec& spec, const CoefficientDraw& draw,
                   const PowerScale& scale) {
    spec.validate();
    const BigInt p = scale.pbar(form_length(spec));
    // ceil(k * delta * pbar(T)); the double delta converts to a rational exactly.
    const Rat bound = Rat(static_cast<long long>(spec.arity())) * Rat(draw.delta) * Rat(p);
    BigInt out = numerator(bound) / denominator(bound);
    if (Rat(out) < bound) ++out;
    return out;
}

CoefficientDraw sample_coefficients(size_t count, double delta, double f_max, SplitRng rng,
                                    double min_magnitude) {
    if (delta < 1.0) throw std::invalid_argument("sample_coefficients: delta must be >= 1");
    if (f_max < 1.0) throw std::invalid_argument("sample_coefficients: f_max must be >= 1");
    if (2.0 * delta < 1.0 / f_max)
        throw std::invalid_argument("sample_coefficients: (delta, f_max) infeasible");

    // Keep the density 1/(2(delta-mu)) within f_max.
    double mu = std::min(min_magnitude, std::max(0.0, delta - 0.5 / f_max));
    CoefficientDraw draw;
    draw.delta = delta;
    draw.f_max = f_max;
    draw.kind = CoefficientDraw::Kind::bounded_density_random;
    draw.values.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        SplitRng sub = rng.fork(0x60ef, i);
        const double mag = mu + (delta - mu) * sub.next_unit();
        const bool neg = sub.next_u64() & 1;
        draw.values.push_back(neg ? -mag : mag);
    }
    return draw;
}

}  // namespace doflab
