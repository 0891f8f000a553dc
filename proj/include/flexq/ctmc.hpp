#ifndef FLEXQ_CTMC_HPP
#define FLEXQ_CTMC_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "flexq/closed_form.hpp"
#include "flexq/core.hpp"

namespace flexq {

using RateMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor, 9, 9>;

/// Infinitesimal generator of the joint occupancy chain, indexed in
/// state_space(design) order.
class GeneratorMatrix {
  public:
    GeneratorMatrix(FlexibilityDesign design, SystemParams params, RateMatrix rates)
        : m_design(design), m_params(params), m_rates(std::move(rates)) {}

    FlexibilityDesign design() const noexcept { return m_design; }
    const SystemParams &params() const noexcept { return m_params; }
    const RateMatrix &rates() const noexcept { return m_rates; }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(m_rates.rows()); }

    double rate(SystemState from, SystemState to) const {
        auto i = state_index(m_design, from), j = state_index(m_design, to);
        if (!i || !j)
            return 0.0;
        return m_rates(static_cast<Eigen::Index>(*i), static_cast<Eigen::Index>(*j));
    }

    double out_rate(SystemState s) const {
        auto i = state_index(m_design, s);
        return i ? -m_rates(static_cast<Eigen::Index>(*i), static_cast<Eigen::Index>(*i)) : 0.0;
    }

  private:
    FlexibilityDesign m_design;
    SystemParams m_params;
    RateMatrix m_rates;
};

namespace detail {

/// Where an arriving customer of `type` (1 or 2) goes; nullopt if lost.
inline std::optional<SystemState> route_arrival(FlexibilityDesign design, SystemState s,
                                                int type) {
    const std::size_t own = static_cast<std::size_t>(type - 1);
    const std::size_t other = 1 - own;
    const auto occupant = static_cast<ServerOccupancy>(type);
    auto place = [&](std::size_t server) {
        SystemState next = s;
        (server == 0 ? next.server1 : next.server2) = occupant;
        return next;
    };
    if (s[own] == ServerOccupancy::Idle)
        return place(own);
    const bool may_overflow = design == FlexibilityDesign::Full ||
                              (design == FlexibilityDesign::Partial && type == 1);
    if (may_overflow && s[other] == ServerOccupancy::Idle)
        return place(other);
    return std::nullopt;
}

/// Service rate of the customer at `server` (0-based) in state s.
inline double service_rate(SystemState s, std::size_t server, double gamma) {
    const auto occupant = s[server];
    if (occupant == ServerOccupancy::Idle)
        return 0.0;
    return static_cast<std::size_t>(occupant) == server + 1 ? 1.0 : gamma;
}

} // namespace detail

inline GeneratorMatrix build_generator(FlexibilityDesign design, const SystemParams &params) {
    const auto space = state_space(design);
    const auto n = static_cast<Eigen::Index>(space.size());
    RateMatrix q = RateMatrix::Zero(n, n);

    const double arrival[2] = {params.rho(), params.k() * params.rho()};
    for (Eigen::Index i = 0; i < n; ++i) {
        const SystemState s = space[static_cast<std::size_t>(i)];
        for (int type = 1; type <= 2; ++type) {
            if (auto next = detail::route_arrival(design, s, type))
                q(i, static_cast<Eigen::Index>(*state_index(design, *next))) += arrival[type - 1];
        }
        for (std::size_t server = 0; server < 2; ++server) {
            const double mu = detail::service_rate(s, server, params.gamma());
            if (s[server] == ServerOccupancy::Idle)
                continue;
            SystemState next = s;
            (server == 0 ? next.server1 : next.server2) = ServerOccupancy::Idle;
            q(i, static_cast<Eigen::Index>(*state_index(design, next))) += mu;
        }
        q(i, i) = -(q.row(i).sum() - q(i, i));
    }
    return {design, params, std::move(q)};
}

namespace detail {

using SystemMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic, 0, 9, 9>;
using SystemVector = Eigen::Matrix<long double, Eigen::Dynamic, 1, 0, 9, 1>;

inline constexpr int refinement_steps = 3;

/// Q^T with balance equation `row` replaced by the normalization row. The
/// diagonal is rebuilt from the off-diagonal rates in extended precision.
inline SystemMatrix balance_system(const GeneratorMatrix &gen, Eigen::Index row) {
    const auto n = static_cast<Eigen::Index>(gen.dimension());
    SystemMatrix a(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        long double out = 0.0L;
        for (Eigen::Index i = 0; i < n; ++i)
            if (i != j) {
                a(i, j) = gen.rates()(j, i);
                out += gen.rates()(j, i);
            }
        a(j, j) = -out;
    }
    a.row(row).setOnes();
    return a;
}

/// Partial-pivoting LU in double, refined against the extended-precision
/// system so that small probabilities keep their relative accuracy.
inline SystemVector solve_balance(const SystemMatrix &a, Eigen::Index row) {
    const auto n = a.rows();
    SystemVector b = SystemVector::Zero(n);
    b(row) = 1.0L;
    const RateMatrix a_double = a.cast<double>();
    const auto lu = a_double.partialPivLu();
    SystemVector x = lu.solve(b.cast<double>()).cast<long double>();
    for (int step = 0; step < refinement_steps; ++step) {
        const SystemVector r = b - a * x;
        x += lu.solve(r.cast<double>()).cast<long double>();
    }
    return x;
}

} // namespace detail

/// Solves pi Q = 0, sum(pi) = 1 by replacing one balance equation with the
/// normalization row and factorizing with partial pivoting. The replaced
/// equation is that of the most probable state (located by a first solve),
/// followed by iterative refinement.
///
/// gamma = 0 makes the chain reducible: Partial returns its absorbing-class
/// distribution, Full throws SingularChain (route it through
/// stationary_gamma_zero or solve_stationary instead).
inline StationaryDistribution stationary_distribution(const GeneratorMatrix &gen) {
    if (gen.params().gamma() == 0.0) {
        if (gen.design() == FlexibilityDesign::Full)
            throw SingularChain("gamma = 0 full chain is absorbing; use the closed form");
        return stationary_gamma_zero(gen.design(), gen.params());
    }
    const auto n = static_cast<Eigen::Index>(gen.dimension());
    detail::SystemVector x = detail::solve_balance(detail::balance_system(gen, n - 1), n - 1);
    Eigen::Index mode = 0;
    x.maxCoeff(&mode);
    if (mode != n - 1)
        x = detail::solve_balance(detail::balance_system(gen, mode), mode);

    // states the chain cannot reach from (0,0) (type-2 states when k = 0)
    // carry exactly zero mass
    std::vector<bool> reached(static_cast<std::size_t>(n), false);
    std::vector<Eigen::Index> frontier{0};
    reached[0] = true;
    while (!frontier.empty()) {
        const Eigen::Index i = frontier.back();
        frontier.pop_back();
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != i && gen.rates()(i, j) > 0.0 && !reached[static_cast<std::size_t>(j)]) {
                reached[static_cast<std::size_t>(j)] = true;
                frontier.push_back(j);
            }
    }
    std::vector<double> probs(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        probs[static_cast<std::size_t>(i)] =
            reached[static_cast<std::size_t>(i)] ? static_cast<double>(x(i)) : 0.0;
    if (!std::all_of(probs.begin(), probs.end(), [](double v) { return std::isfinite(v); }))
        throw SingularChain("stationary solve produced non-finite values");
    return {gen.design(), std::move(probs)};
}

/// max_j |(pi Q)_j|
inline double balance_residual(const GeneratorMatrix &gen, const StationaryDistribution &pi) {
    const auto n = static_cast<Eigen::Index>(gen.dimension());
    double worst = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        double flow = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            flow += pi.values()[static_cast<std::size_t>(i)] * gen.rates()(i, j);
        worst = std::max(worst, std::abs(flow));
    }
    return worst;
}

/// Stationary distribution for any flexible design and parameters,
/// sending gamma = 0 to the closed form.
inline StationaryDistribution solve_stationary(FlexibilityDesign design,
                                               const SystemParams &params) {
    if (design == FlexibilityDesign::Independent)
        throw UnsupportedDesign("independent has product form; use throughput");
    if (params.gamma() == 0.0)
        return stationary_gamma_zero(design, params);
    return stationary_distribution(build_generator(design, params));
}

/// Accepted customers per unit time from the blocking probabilities seen
/// by Poisson arrivals.
inline double throughput_from(const StationaryDistribution &pi, const SystemParams &params) {
    const double r = params.rho(), k = params.k();
    switch (pi.design()) {
    case FlexibilityDesign::Full: {
        const double blocked = pi(1, 1) + pi(1, 2) + pi(2, 1) + pi(2, 2);
        return (k + 1) * r * (1 - blocked);
    }
    case FlexibilityDesign::Partial: {
        const double type1_blocked = pi(1, 1) + pi(1, 2);
        const double type2_blocked = type1_blocked + pi(0, 1) + pi(0, 2);
        return r * (1 - type1_blocked) + k * r * (1 - type2_blocked);
    }
    case FlexibilityDesign::Independent:
        break;
    }
    throw UnsupportedDesign("independent has no joint distribution");
}

inline double throughput(FlexibilityDesign design, const SystemParams &params) {
    if (design == FlexibilityDesign::Independent)
        return throughput_independent(params);
    return throughput_from(solve_stationary(design, params), params);
}

} // namespace flexq

#endif
