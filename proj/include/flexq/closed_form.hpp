#ifndef FLEXQ_CLOSED_FORM_HPP
#define FLEXQ_CLOSED_FORM_HPP

#include <string_view>
#include <vector>

#include "flexq/core.hpp"

// Closed-form stationary distributions and throughputs for the special
// parameter cases: identical service (gamma = 1), symmetric arrivals
// (k = 1) and frozen non-dedicated service (gamma = 0). Each expression
// is kept in the factored numerator/denominator shape it was derived in.

namespace flexq {

enum class ClosedFormCase { IdenticalService, Symmetric, GammaZero, IndependentAny };

inline std::string_view to_string(ClosedFormCase c) noexcept {
    switch (c) {
    case ClosedFormCase::IdenticalService:
        return "identical-service";
    case ClosedFormCase::Symmetric:
        return "symmetric";
    case ClosedFormCase::GammaZero:
        return "gamma-zero";
    case ClosedFormCase::IndependentAny:
        return "independent";
    }
    return "?";
}

namespace detail {

inline void require_gamma(const SystemParams &p, double value) {
    if (p.gamma() != value)
        throw CaseMismatch("gamma", "closed form requires gamma = " + std::to_string(value));
}

inline void require_symmetric(const SystemParams &p) {
    if (p.k() != 1.0)
        throw CaseMismatch("k", "symmetric closed form requires k = 1");
    if (p.gamma() == 0.0)
        throw CaseMismatch("gamma", "symmetric closed form requires gamma > 0");
}

} // namespace detail

/// Full flexibility, gamma = 1.
inline StationaryDistribution stationary_full_identical(const SystemParams &p) {
    detail::require_gamma(p, 1.0);
    const double r = p.rho(), k = p.k();
    const double r2 = r * r, r3 = r2 * r, k2 = k * k;

    const double p00 = 2.0 / (k2 * r2 + 2 * k * r2 + 2 * k * r + r2 + 2 * r + 2);
    const double d = 2 * k2 * r2 + 4 * k * r2 + 6 * k * r + 2 * r2 + 6 * r + 4;
    const double e = 2 * r + 2 * k * r + 4;

    const double p10 = r * (k2 * r2 + 2 * k * r2 + 6 * k * r + r2 + 4 * r + 4) / d * p00;
    const double p01 = r2 * (r * k2 + 2 * r * k + r + 2) / d * p00;
    const double p02 = k * r * (k2 * r2 + 2 * k * r2 + 4 * k * r + r2 + 6 * r + 4) / d * p00;
    const double p20 = k * r2 * (2 * k + r + 2 * k * r + k2 * r) / d * p00;
    const double p11 = r2 / 2 * p00;
    const double p12 = k * r2 * (r + k * r + 4) / e * p00;
    const double p21 = k * r3 * (k + 1) / e * p00;
    const double p22 = k2 * r2 / 2 * p00;

    return {FlexibilityDesign::Full, {p00, p01, p02, p10, p11, p12, p20, p21, p22}};
}

/// Partial flexibility, gamma = 1.
inline StationaryDistribution stationary_partial_identical(const SystemParams &p) {
    detail::require_gamma(p, 1.0);
    const double r = p.rho(), k = p.k();
    const double r2 = r * r, k2 = k * k;

    const double p00 =
        (2 * r + k * r + 2) / ((r + 1) * (k2 * r2 + 2 * k * r2 + 3 * k * r + r2 + 2 * r + 2));
    const double f = (r + 2) * (2 * r + k * r + 2);

    const double p10 = r * (r + k * r + 2) / (2 * r + k * r + 2) * p00;
    const double p01 = r2 * (r + k * r + 2) / f * p00;
    const double p02 = k * r * (6 * r + 2 * k * r + k * r2 + r2 + 4) / f * p00;
    const double p11 = r2 * (r + 1) * (r + k * r + 2) / f * p00;
    const double p12 = k * r2 * (5 * r + 2 * k * r + k * r2 + r2 + 4) / f * p00;

    return {FlexibilityDesign::Partial, {p00, p01, p02, p10, p11, p12}};
}

/// Full flexibility, k = 1, gamma > 0.
inline StationaryDistribution stationary_full_symmetric(const SystemParams &p) {
    detail::require_symmetric(p);
    const double r = p.rho(), g = p.gamma();
    const double r2 = r * r, r3 = r2 * r, g2 = g * g, g3 = g2 * g;

    const double p00 = (g3 + g2 + 2 * g2 * r) /
                       (g2 * (r + 1) * (r + 1) * (r + 1) + g3 * (r + 1) * (r + 1) +
                        r * (r + g) * (r + g) + 2 * g * r2 * (r + g));
    const double a = g2 + g + 2 * g * r;
    const double b = g + 2 * r + 1;

    const double p01 = r2 / a * p00;
    const double p02 = (r2 + (g + 1) * r) / b * p00;
    const double p10 = (r2 + (g + 1) * r) / b * p00;
    const double p11 = (r3 + g * r2) / a * p00;
    const double p12 = (r3 + (g + 1) * r2) / b * p00;
    const double p20 = r2 / a * p00;
    const double p21 = r3 / (g3 + g2 + 2 * g2 * r) * p00;
    const double p22 = (r3 + g * r2) / a * p00;

    return {FlexibilityDesign::Full, {p00, p01, p02, p10, p11, p12, p20, p21, p22}};
}

/// Partial flexibility, k = 1, gamma > 0.
inline StationaryDistribution stationary_partial_symmetric(const SystemParams &p) {
    detail::require_symmetric(p);
    const double r = p.rho(), g = p.gamma();
    const double r2 = r * r, r3 = r2 * r, g2 = g * g;

    const double p00 =
        (2 * g2 * r + 2 * g2 + 3 * g * r2 + 6 * g * r + 2 * g) /
        ((r + 1) * (2 * g2 * (r + 1) * (r + 1) + g * (2 * r3 + 9 * r2 + 8 * r + 2) +
                    2 * r2 * (r + 1)));
    const double c = 2 * g + 6 * r + 2 * g * r + 3 * r2 + 2;

    const double p10 = 2 * r * (r + 1) * (g + r + 1) / c * p00;
    const double p01 = 2 * r2 * (r + 1) / (g * c) * p00;
    const double p02 = 2 * r * (g + 3 * r + g * r + r2 + 1) / c * p00;
    const double p11 = 2 * r2 * (g + r) * (r + 1) / (g * c) * p00;
    const double p12 = r2 * (2 * g + 5 * r + 2 * g * r + 2 * r2 + 2) / c * p00;

    return {FlexibilityDesign::Partial, {p00, p01, p02, p10, p11, p12}};
}

/// gamma = 0: a customer redirected to its non-dedicated server never
/// leaves. Under partial flexibility (and under full flexibility without
/// type-2 traffic) a type-1 customer eventually freezes server 2 and the
/// chain alternates between (0,1) and (1,1). Under full flexibility with
/// k > 0 both servers end up frozen in (2,1).
inline StationaryDistribution stationary_gamma_zero(FlexibilityDesign design,
                                                    const SystemParams &p) {
    detail::require_gamma(p, 0.0);
    const double r = p.rho();
    if (design == FlexibilityDesign::Independent)
        throw UnsupportedDesign("independent has product form; use throughput");

    if (design == FlexibilityDesign::Full && p.k() > 0.0) {
        std::vector<double> v(9, 0.0);
        v[*state_index(design, {2, 1})] = 1.0;
        return {design, std::move(v)};
    }
    std::vector<double> v(state_space(design).size(), 0.0);
    v[*state_index(design, {0, 1})] = 1.0 / (r + 1.0);
    v[*state_index(design, {1, 1})] = r / (r + 1.0);
    return {design, std::move(v)};
}

/// Product of two Erlang loss systems; valid for every parameter value.
inline double throughput_independent(const SystemParams &p) {
    const double r = p.rho(), kr = p.k() * p.rho();
    return r / (r + 1.0) + kr / (kr + 1.0);
}

inline double throughput_closed(FlexibilityDesign design, ClosedFormCase c,
                                const SystemParams &p) {
    const double r = p.rho(), k = p.k(), g = p.gamma();
    const double r2 = r * r, r3 = r2 * r, k2 = k * k, g2 = g * g, g3 = g2 * g;

    switch (c) {
    case ClosedFormCase::IndependentAny:
        if (design != FlexibilityDesign::Independent)
            throw CaseMismatch("design", "no general closed form for flexible designs");
        return throughput_independent(p);

    case ClosedFormCase::IdenticalService:
        detail::require_gamma(p, 1.0);
        switch (design) {
        case FlexibilityDesign::Independent:
            return (2 * k * r2 + (k + 1) * r) / ((r + 1) * (k * r + 1));
        case FlexibilityDesign::Full:
            return 2 * r * (k + 1) * (r + k * r + 1) /
                   (k2 * r2 + 2 * k * r2 + 2 * k * r + r2 + 2 * r + 2);
        case FlexibilityDesign::Partial:
            return r * (2 * k2 * r2 + k2 * r + 4 * k * r2 + 7 * k * r + 2 * k + 2 * r2 + 4 * r + 2) /
                   ((r + 1) * (k2 * r2 + 2 * k * r2 + 3 * k * r + r2 + 2 * r + 2));
        }
        break;

    case ClosedFormCase::Symmetric:
        if (k != 1.0)
            throw CaseMismatch("k", "symmetric closed form requires k = 1");
        switch (design) {
        case FlexibilityDesign::Independent:
            return 2 * r / (r + 1);
        case FlexibilityDesign::Full:
            return 2 * g * r * (2 * g2 * r + g2 + 2 * g * r2 + 4 * g * r + g + 2 * r2) /
                   (g3 * (r + 1) * (r + 1) + g2 * (r3 + 5 * r2 + 4 * r + 1) +
                    2 * g * r2 * (r + 1) + r3);
        case FlexibilityDesign::Partial:
            return 2 * r * (3 * g2 * r + 2 * g2 + 3 * g * r2 + 7 * g * r + 2 * g + r2) /
                   (2 * g2 * (r + 1) * (r + 1) + g * (2 * r3 + 9 * r2 + 8 * r + 2) +
                    2 * r2 * (r + 1));
        }
        break;

    case ClosedFormCase::GammaZero:
        detail::require_gamma(p, 0.0);
        switch (design) {
        case FlexibilityDesign::Independent:
            return throughput_independent(p);
        case FlexibilityDesign::Full:
            return k > 0.0 ? 0.0 : r / (r + 1);
        case FlexibilityDesign::Partial:
            return r / (r + 1);
        }
        break;
    }
    throw CaseMismatch("case", "unknown closed-form case");
}

} // namespace flexq

#endif
