#ifndef FLEXQ_SIMULATE_HPP
#define FLEXQ_SIMULATE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "flexq/core.hpp"
#include "flexq/ctmc.hpp"

namespace flexq {

struct SimConfig {
    SystemParams params;
    FlexibilityDesign design = FlexibilityDesign::Full;
    std::uint64_t horizon_events = 1'000'000; // arrivals, both types
    std::uint64_t warmup_events = 50'000;
    std::uint64_t seed = 0;
    std::uint32_t batches = 20;
};

/// Default warmup: 5% of the horizon.
inline SimConfig make_sim_config(FlexibilityDesign design, const SystemParams &params,
                                 std::uint64_t horizon, std::uint64_t seed,
                                 std::uint32_t batches = 20) {
    return {params, design, horizon, horizon / 20, seed, batches};
}

struct TypeCounts {
    std::uint64_t offered = 0;
    std::uint64_t accepted = 0;
    std::uint64_t lost = 0;

    double acceptance() const {
        return offered == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(offered);
    }
};

struct ThroughputEstimate {
    double mean = 0.0;
    double half_width_95 = 0.0;
    double std_error = 0.0;
    std::uint64_t accepted = 0;
    std::uint64_t offered = 0;
    std::array<TypeCounts, 2> by_type{};
    /// Per-batch throughputs (accepted per unit time), in run order.
    std::vector<double> batch_means;
    /// Fraction of post-warmup time spent in each joint state, indexed in
    /// full state-space order (9 entries) for every design.
    std::array<double, 9> occupancy{};
    double simulated_time = 0.0;
};

namespace detail {

inline void check_sim_config(const SimConfig &c) {
    if (c.horizon_events == 0)
        throw ConfigError("horizon_events must be positive");
    if (c.warmup_events >= c.horizon_events)
        throw ConfigError("warmup_events must be smaller than horizon_events");
    if (c.batches < 10)
        throw ConfigError("batches must be at least 10");
    if ((c.horizon_events - c.warmup_events) < c.batches)
        throw ConfigError("fewer post-warmup arrivals than batches");
}

/// Independent stream per random source, seeded from (seed, stream id).
class Stream {
  public:
    Stream(std::uint64_t seed, std::uint32_t id) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          id, 0x9e3779b9u};
        m_engine.seed(seq);
    }

    /// Exponential variate with the given rate; +inf for rate 0.
    double exponential(double rate) {
        if (rate <= 0.0)
            return std::numeric_limits<double>::infinity();
        const double u = static_cast<double>(m_engine() >> 11) * 0x1.0p-53;
        return -std::log1p(-u) / rate;
    }

  private:
    std::mt19937_64 m_engine;
};

inline std::size_t full_index(SystemState s) {
    return static_cast<std::size_t>(s.server1) * 3 + static_cast<std::size_t>(s.server2);
}

inline double t_quantile_975(std::uint32_t dof) {
    boost::math::students_t dist(static_cast<double>(dof));
    return boost::math::quantile(dist, 0.975);
}

/// Mean, t-based half-width and standard error of a batch vector. Values
/// are summed in sorted order so pooled results do not depend on the
/// order batches were merged in.
inline void summarize_batches(ThroughputEstimate &est) {
    std::vector<double> sorted = est.batch_means;
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : sorted)
        ss += (v - mean) * (v - mean);
    const double var = ss / (n - 1.0);
    est.mean = mean;
    est.std_error = std::sqrt(var / n);
    est.half_width_95 =
        t_quantile_975(static_cast<std::uint32_t>(sorted.size() - 1)) * est.std_error;
}

} // namespace detail

/// Event-driven simulation of the loss system. Two Poisson arrival streams
/// (rates rho and k*rho) and one service stream per server; routing
/// follows the design exactly as the CTMC generator does. The horizon
/// counts arrivals, so gamma = 0 runs terminate even when servers freeze.
/// Identical config and seed reproduce identical output.
inline ThroughputEstimate simulate(const SimConfig &config) {
    detail::check_sim_config(config);
    const SystemParams &p = config.params;
    const double arrival_rate[2] = {p.rho(), p.k() * p.rho()};

    detail::Stream arrivals[2] = {{config.seed, 1}, {config.seed, 2}};
    detail::Stream services[2] = {{config.seed, 3}, {config.seed, 4}};

    constexpr double inf = std::numeric_limits<double>::infinity();
    double next_arrival[2] = {arrivals[0].exponential(arrival_rate[0]),
                              arrivals[1].exponential(arrival_rate[1])};
    double departure[2] = {inf, inf};
    SystemState state{};

    const std::uint64_t per_batch = (config.horizon_events - config.warmup_events) / config.batches;
    const std::uint64_t last_arrival = config.warmup_events + per_batch * config.batches;

    ThroughputEstimate est;
    est.batch_means.reserve(config.batches);
    std::array<double, 9> occupancy_time{};

    double now = 0.0;
    double batch_start = 0.0;
    std::uint64_t batch_accepted = 0;
    std::uint64_t arrivals_seen = 0;

    auto legal = [&](SystemState s) {
        for (std::size_t server = 0; server < 2; ++server) {
            const auto occ = s[server];
            if (occ == ServerOccupancy::Idle || static_cast<std::size_t>(occ) == server + 1)
                continue;
            if (config.design == FlexibilityDesign::Independent)
                return false;
            if (config.design == FlexibilityDesign::Partial && server == 0)
                return false;
        }
        return true;
    };

    while (arrivals_seen < last_arrival) {
        // Earliest of the four clocks; arrivals win ties.
        int kind = 0;
        double t = next_arrival[0];
        const double clocks[4] = {next_arrival[0], next_arrival[1], departure[0], departure[1]};
        for (int i = 1; i < 4; ++i)
            if (clocks[i] < t) {
                t = clocks[i];
                kind = i;
            }

        if (arrivals_seen >= config.warmup_events)
            occupancy_time[detail::full_index(state)] += t - now;
        now = t;

        if (kind >= 2) {
            const std::size_t server = static_cast<std::size_t>(kind - 2);
            (server == 0 ? state.server1 : state.server2) = ServerOccupancy::Idle;
            departure[server] = inf;
            continue;
        }

        const int type = kind + 1;
        next_arrival[kind] = now + arrivals[kind].exponential(arrival_rate[kind]);
        ++arrivals_seen;
        const bool measured = arrivals_seen > config.warmup_events;

        const auto next = detail::route_arrival(config.design, state, type);
        if (measured) {
            auto &counts = est.by_type[static_cast<std::size_t>(kind)];
            ++counts.offered;
            ++(next ? counts.accepted : counts.lost);
        }
        if (next) {
            const std::size_t server = (*next)[0] != state[0] ? 0 : 1;
            state = *next;
            if (!legal(state))
                throw std::logic_error("simulation reached illegal state " + to_string(state));
            departure[server] =
                now + services[server].exponential(detail::service_rate(state, server, p.gamma()));
            if (measured)
                ++batch_accepted;
        }

        if (arrivals_seen == config.warmup_events) {
            batch_start = now;
        } else if (measured && (arrivals_seen - config.warmup_events) % per_batch == 0) {
            est.batch_means.push_back(static_cast<double>(batch_accepted) / (now - batch_start));
            batch_start = now;
            batch_accepted = 0;
        }
    }

    double measured_time = 0.0;
    for (double v : occupancy_time)
        measured_time += v;
    for (std::size_t i = 0; i < 9; ++i)
        est.occupancy[i] = measured_time > 0.0 ? occupancy_time[i] / measured_time : 0.0;
    est.simulated_time = measured_time;
    for (const auto &c : est.by_type) {
        est.offered += c.offered;
        est.accepted += c.accepted;
    }
    detail::summarize_batches(est);
    return est;
}

/// Pools the batches of independent runs into one estimate. The result
/// does not depend on the order of `runs`.
inline ThroughputEstimate pool_estimates(std::span<const ThroughputEstimate> runs) {
    if (runs.empty())
        throw ConfigError("nothing to pool");
    ThroughputEstimate out;
    double time = 0.0;
    std::array<double, 9> occ{};
    for (const auto &r : runs) {
        out.batch_means.insert(out.batch_means.end(), r.batch_means.begin(), r.batch_means.end());
        for (std::size_t t = 0; t < 2; ++t) {
            out.by_type[t].offered += r.by_type[t].offered;
            out.by_type[t].accepted += r.by_type[t].accepted;
            out.by_type[t].lost += r.by_type[t].lost;
        }
        out.offered += r.offered;
        out.accepted += r.accepted;
    }
    // time-weighted occupancy, summed in a fixed order of sorted run times
    std::vector<const ThroughputEstimate *> order;
    for (const auto &r : runs)
        order.push_back(&r);
    std::sort(order.begin(), order.end(), [](auto *a, auto *b) {
        return a->simulated_time != b->simulated_time ? a->simulated_time < b->simulated_time
                                                      : a->occupancy < b->occupancy;
    });
    for (auto *r : order) {
        time += r->simulated_time;
        for (std::size_t i = 0; i < 9; ++i)
            occ[i] += r->occupancy[i] * r->simulated_time;
    }
    out.simulated_time = time;
    std::sort(out.batch_means.begin(), out.batch_means.end());
    out.occupancy = occ;
    for (double &v : out.occupancy)
        v = time > 0.0 ? v / time : 0.0;
    detail::summarize_batches(out);
    return out;
}

struct ValidationReport {
    ThroughputEstimate estimate;
    double analytic = 0.0;
    double z_score = 0.0;
    bool pass = false;
};

/// Simulates and compares against the analytic throughput; passes when
/// the error is within max(3 standard errors, 1e-3).
inline ValidationReport validate_against_analytic(const SimConfig &config) {
    ValidationReport rep;
    rep.estimate = simulate(config);
    rep.analytic = throughput(config.design, config.params);
    const double err = rep.estimate.mean - rep.analytic;
    if (rep.estimate.std_error > 0.0)
        rep.z_score = err / rep.estimate.std_error;
    else if (err != 0.0)
        rep.z_score = std::copysign(std::numeric_limits<double>::infinity(), err);
    rep.pass = std::abs(err) <= std::max(3.0 * rep.estimate.std_error, 1e-3);
    return rep;
}

} // namespace flexq

#endif
