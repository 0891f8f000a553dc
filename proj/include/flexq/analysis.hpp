#ifndef FLEXQ_ANALYSIS_HPP
#define FLEXQ_ANALYSIS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "flexq/closed_form.hpp"
#include "flexq/core.hpp"
#include "flexq/ctmc.hpp"

namespace flexq {

inline constexpr double default_threshold_tol = 1e-10;
inline constexpr double bracket_epsilon = 1e-12;
inline constexpr double tie_tolerance = 1e-9;

/// Critical prolonged coefficients for fixed (rho, k). Below gamma_g the
/// independent design wins, between gamma_g and gamma_r partial
/// flexibility wins, above gamma_r full flexibility wins; gamma_b is where
/// full and independent swap.
struct ThresholdSet {
    double rho = 0.0;
    double k = 0.0;
    double gamma_g = 0.0;
    double gamma_b = 0.0;
    double gamma_r = 0.0;
};

/// A root of a throughput difference. `degenerate` marks k = 0, where the
/// level set collapses onto the boundary.
struct ThresholdRoot {
    double gamma = 0.0;
    bool degenerate = false;
};

struct RegimeOrdering {
    /// Designs from smallest to largest throughput.
    std::array<FlexibilityDesign, 3> ordering{};
    int regime_index = 0;
};

enum class LevelSetKind { FullPartial, FullIndependent, PartialIndependent };

inline std::string_view to_string(LevelSetKind kind) noexcept {
    switch (kind) {
    case LevelSetKind::FullPartial:
        return "A_r";
    case LevelSetKind::FullIndependent:
        return "A_b";
    case LevelSetKind::PartialIndependent:
        return "A_g";
    }
    return "?";
}

struct LevelSetPoint {
    double k = 0.0;
    double gamma = 0.0;
};

struct LevelSetCurve {
    double rho = 0.0;
    LevelSetKind which = LevelSetKind::FullPartial;
    std::vector<LevelSetPoint> points;
};

struct LevelSetTrace {
    LevelSetCurve partial_independent; // green
    LevelSetCurve full_independent;    // blue
    LevelSetCurve full_partial;        // red
};

namespace detail {

inline void require_rho(double rho) {
    if (!std::isfinite(rho) || !(rho > 0.0))
        throw DomainError("rho", "must be finite and strictly positive");
}

inline void require_k_open(double k) {
    if (!std::isfinite(k) || k <= 0.0 || k >= 1.0)
        throw DomainError("k", "must lie in (0, 1)");
}

inline void require_tol(double tol) {
    if (!std::isfinite(tol) || !(tol > 0.0))
        throw DomainError("tol", "must be strictly positive");
}

/// Plain bisection for f(lo) < 0 < f(hi).
inline double bisect(const std::function<double(double)> &f, double lo, double hi, double tol) {
    double f_lo = f(lo), f_hi = f(hi);
    if (!(f_lo < 0.0) || !(f_hi > 0.0))
        throw BracketError("throughput difference does not change sign on [" + std::to_string(lo) +
                           ", " + std::to_string(hi) + "]");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = f(mid);
        if (f_mid == 0.0)
            return mid;
        (f_mid < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline double root_against(FlexibilityDesign other, double rho, double k, double tol) {
    const SystemParams base = validate_params(rho, k, 1.0);
    auto diff = [&](double gamma) {
        const SystemParams p = base.with_gamma(gamma);
        return throughput(FlexibilityDesign::Full, p) - throughput(other, p);
    };
    const double root = bisect(diff, bracket_epsilon, 1.0 - bracket_epsilon, tol);
    if (!(root < rho / (rho + 1.0)))
        throw OrderingViolation("threshold " + std::to_string(root) +
                                " is not below rho/(rho+1)");
    return root;
}

} // namespace detail

/// Partial and independent throughputs coincide exactly at k*rho/(k*rho+1).
inline double gamma_g(double rho, double k) {
    detail::require_rho(rho);
    if (!std::isfinite(k) || k <= 0.0 || k > 1.0)
        throw DomainError("k", "must lie in (0, 1]; the level set degenerates at k = 0");
    return k * rho / (k * rho + 1.0);
}

/// Root of T_full - T_partial in gamma. At k = 1 the three thresholds
/// coincide at rho/(rho+1); at k = 0 the difference vanishes identically.
inline ThresholdRoot gamma_r(double rho, double k, double tol = default_threshold_tol) {
    detail::require_rho(rho);
    detail::require_tol(tol);
    if (k == 1.0)
        return {rho / (rho + 1.0), false};
    if (k == 0.0)
        throw DomainError("k", "full and partial throughputs coincide for every gamma at k = 0");
    detail::require_k_open(k);
    return {detail::root_against(FlexibilityDesign::Partial, rho, k, tol), false};
}

/// Root of T_full - T_independent in gamma; 0 (flagged degenerate) at k = 0.
inline ThresholdRoot gamma_b(double rho, double k, double tol = default_threshold_tol) {
    detail::require_rho(rho);
    detail::require_tol(tol);
    if (k == 1.0)
        return {rho / (rho + 1.0), false};
    if (k == 0.0)
        return {0.0, true};
    detail::require_k_open(k);
    return {detail::root_against(FlexibilityDesign::Independent, rho, k, tol), false};
}

/// One-sided limit of gamma_r as k -> 0+, by Richardson extrapolation of
/// two small-k roots (error O(k^2)).
inline double gamma_r_zero_limit(double rho, double tol = default_threshold_tol) {
    constexpr double h = 1e-6;
    const double near = gamma_r(rho, h, tol).gamma;
    const double far = gamma_r(rho, 2 * h, tol).gamma;
    return 2 * near - far;
}

/// Threshold triple for k in (0, 1], with the strict chain
/// 0 < gamma_g < gamma_b < gamma_r < rho/(rho+1) checked for k < 1.
inline ThresholdSet thresholds(double rho, double k, double tol = default_threshold_tol) {
    detail::require_rho(rho);
    if (k == 1.0) {
        const double c = rho / (rho + 1.0);
        return {rho, k, c, c, c};
    }
    detail::require_k_open(k);
    ThresholdSet t{rho, k, gamma_g(rho, k), gamma_b(rho, k, tol).gamma, gamma_r(rho, k, tol).gamma};
    const double cap = rho / (rho + 1.0);
    if (!(t.gamma_g > 0.0) || t.gamma_b - t.gamma_g < -tol || t.gamma_r - t.gamma_b < -tol ||
        cap - t.gamma_r < -tol)
        throw OrderingViolation("threshold chain gamma_g < gamma_b < gamma_r < rho/(rho+1) fails");
    return t;
}

/// Ordering of the three throughputs as dictated by the thresholds.
inline RegimeOrdering regime_from_thresholds(const ThresholdSet &t, double gamma) {
    using D = FlexibilityDesign;
    if (gamma < t.gamma_g)
        return {{D::Full, D::Partial, D::Independent}, 1};
    if (gamma < t.gamma_b)
        return {{D::Full, D::Independent, D::Partial}, 2};
    if (gamma < t.gamma_r)
        return {{D::Independent, D::Full, D::Partial}, 3};
    return {{D::Independent, D::Partial, D::Full}, 4};
}

struct DesignThroughputs {
    double independent = 0.0;
    double partial = 0.0;
    double full = 0.0;

    double of(FlexibilityDesign d) const {
        switch (d) {
        case FlexibilityDesign::Independent:
            return independent;
        case FlexibilityDesign::Partial:
            return partial;
        case FlexibilityDesign::Full:
            return full;
        }
        return 0.0;
    }
};

inline DesignThroughputs all_throughputs(const SystemParams &p) {
    return {throughput(FlexibilityDesign::Independent, p),
            throughput(FlexibilityDesign::Partial, p), throughput(FlexibilityDesign::Full, p)};
}

/// Designs sorted by directly computed throughput, ascending.
inline std::array<FlexibilityDesign, 3> ordering_by_throughput(const DesignThroughputs &t) {
    std::array<FlexibilityDesign, 3> order{FlexibilityDesign::Independent,
                                           FlexibilityDesign::Partial, FlexibilityDesign::Full};
    std::sort(order.begin(), order.end(),
              [&](FlexibilityDesign a, FlexibilityDesign b) { return t.of(a) < t.of(b); });
    return order;
}

/// Requires rho > 0 and k, gamma strictly inside (0, 1). Throws
/// TieBreakUnresolved when gamma sits within 1e-9 of a threshold and
/// InconsistentOrdering if the direct throughput comparison disagrees with
/// the threshold prediction.
inline RegimeOrdering classify_regime(const SystemParams &p) {
    detail::require_k_open(p.k());
    if (p.gamma() <= 0.0 || p.gamma() >= 1.0)
        throw DomainError("gamma", "must lie in (0, 1)");
    const ThresholdSet t = thresholds(p.rho(), p.k());
    for (double th : {t.gamma_g, t.gamma_b, t.gamma_r})
        if (std::abs(p.gamma() - th) <= tie_tolerance)
            throw TieBreakUnresolved("gamma = " + std::to_string(p.gamma()) +
                                     " is within 1e-9 of threshold " + std::to_string(th));
    const RegimeOrdering predicted = regime_from_thresholds(t, p.gamma());
    if (ordering_by_throughput(all_throughputs(p)) != predicted.ordering)
        throw InconsistentOrdering("throughput comparison disagrees with regime " +
                                   std::to_string(predicted.regime_index));
    return predicted;
}

/// Highest-throughput design; same preconditions and errors as
/// classify_regime.
inline FlexibilityDesign optimal_design(const SystemParams &p) {
    return classify_regime(p).ordering.back();
}

/// Workload rho = gamma/(1-gamma) at which the symmetric system switches
/// from favouring full flexibility (below) to independence (above).
inline double critical_rho_symmetric(double gamma) {
    if (gamma == 1.0)
        throw DomainError("gamma", "unbounded: full flexibility dominates for every rho at gamma = 1");
    if (!std::isfinite(gamma) || gamma <= 0.0 || gamma > 1.0)
        throw DomainError("gamma", "must lie in (0, 1)");
    return gamma / (1.0 - gamma);
}

/// Traces the three level sets over a strictly increasing k grid in (0,1).
inline LevelSetTrace trace_level_sets(double rho, std::span<const double> k_grid,
                                      double tol = default_threshold_tol) {
    detail::require_rho(rho);
    detail::require_tol(tol);
    for (std::size_t i = 0; i < k_grid.size(); ++i) {
        detail::require_k_open(k_grid[i]);
        if (i > 0 && !(k_grid[i] > k_grid[i - 1]))
            throw DomainError("k_grid", "must be strictly increasing");
    }
    LevelSetTrace trace{{rho, LevelSetKind::PartialIndependent, {}},
                        {rho, LevelSetKind::FullIndependent, {}},
                        {rho, LevelSetKind::FullPartial, {}}};
    for (double k : k_grid) {
        const ThresholdSet t = thresholds(rho, k, tol);
        trace.partial_independent.points.push_back({k, t.gamma_g});
        trace.full_independent.points.push_back({k, t.gamma_b});
        trace.full_partial.points.push_back({k, t.gamma_r});
    }
    return trace;
}

/// Everything the CLI reports for one parameter triple.
struct Assessment {
    DesignThroughputs throughputs;
    std::optional<RegimeOrdering> regime;
    std::optional<FlexibilityDesign> optimal;
    bool tie = false;
};

/// Throughputs plus regime and optimum. Inside the open parameter domain
/// the regime follows the thresholds; on the boundary (k or gamma equal to
/// 0 or 1) only the argmax is reported. Ties leave `optimal` empty.
inline Assessment assess(const SystemParams &p) {
    Assessment a;
    a.throughputs = all_throughputs(p);
    const bool interior = p.k() > 0.0 && p.k() < 1.0 && p.gamma() > 0.0 && p.gamma() < 1.0;
    if (interior) {
        try {
            a.regime = classify_regime(p);
            a.optimal = a.regime->ordering.back();
        } catch (const TieBreakUnresolved &) {
            a.tie = true;
        }
        return a;
    }
    const auto order = ordering_by_throughput(a.throughputs);
    const double best = a.throughputs.of(order[2]);
    const double second = a.throughputs.of(order[1]);
    if (best - second <= 1e-12 * std::max(1.0, std::abs(best)))
        a.tie = true;
    else
        a.optimal = order[2];
    return a;
}

} // namespace flexq

#endif
