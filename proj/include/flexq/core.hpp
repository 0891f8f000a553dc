#ifndef FLEXQ_CORE_HPP
#define FLEXQ_CORE_HPP

#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flexq/errors.hpp"

namespace flexq {

/// Rescaled model parameters of the two-server loss system.
///
/// Type-1 customers arrive at rate rho, type-2 customers at rate k*rho.
/// Service at the dedicated server has rate 1, at the non-dedicated
/// server rate gamma. Instances only come out of validate_params, so a
/// SystemParams value always satisfies rho > 0 (finite), k and gamma in
/// [0, 1].
class SystemParams {
  public:
    double rho() const noexcept { return m_rho; }
    double k() const noexcept { return m_k; }
    double gamma() const noexcept { return m_gamma; }

    /// Same rho and k, different prolonged coefficient (validated).
    SystemParams with_gamma(double gamma) const;

    friend bool operator==(const SystemParams &, const SystemParams &) = default;

    friend SystemParams validate_params(double rho, double k, double gamma);

  private:
    SystemParams(double rho, double k, double gamma) noexcept
        : m_rho(rho), m_k(k), m_gamma(gamma) {}

    double m_rho;
    double m_k;
    double m_gamma;
};

/// Checks fields in the order rho, k, gamma and reports the first
/// violation only.
inline SystemParams validate_params(double rho, double k, double gamma) {
    if (!std::isfinite(rho))
        throw DomainError("rho", "must be finite");
    if (!(rho > 0.0))
        throw DomainError("rho", "must be strictly positive");
    if (!std::isfinite(k))
        throw DomainError("k", "must be finite");
    if (k < 0.0 || k > 1.0)
        throw DomainError("k", "must lie in [0, 1]");
    if (!std::isfinite(gamma))
        throw DomainError("gamma", "must be finite");
    if (gamma < 0.0 || gamma > 1.0)
        throw DomainError("gamma", "must lie in [0, 1]");
    return SystemParams(rho, k, gamma);
}

inline SystemParams SystemParams::with_gamma(double gamma) const {
    return validate_params(m_rho, m_k, gamma);
}

enum class FlexibilityDesign { Independent, Partial, Full };

inline std::string_view to_string(FlexibilityDesign d) noexcept {
    switch (d) {
    case FlexibilityDesign::Independent:
        return "independent";
    case FlexibilityDesign::Partial:
        return "partial";
    case FlexibilityDesign::Full:
        return "full";
    }
    return "?";
}

inline std::optional<FlexibilityDesign> parse_design(std::string_view s) {
    for (auto d : {FlexibilityDesign::Independent, FlexibilityDesign::Partial,
                   FlexibilityDesign::Full})
        if (s == to_string(d))
            return d;
    return std::nullopt;
}

enum class ServerOccupancy : std::uint8_t { Idle = 0, Type1 = 1, Type2 = 2 };

struct SystemState {
    ServerOccupancy server1 = ServerOccupancy::Idle;
    ServerOccupancy server2 = ServerOccupancy::Idle;

    constexpr SystemState() = default;
    constexpr SystemState(ServerOccupancy s1, ServerOccupancy s2) : server1(s1), server2(s2) {}
    constexpr SystemState(int s1, int s2)
        : server1(static_cast<ServerOccupancy>(s1)), server2(static_cast<ServerOccupancy>(s2)) {}

    constexpr ServerOccupancy operator[](std::size_t server) const {
        return server == 0 ? server1 : server2;
    }

    friend constexpr auto operator<=>(const SystemState &, const SystemState &) = default;
};

inline std::string to_string(const SystemState &s) {
    return "(" + std::to_string(static_cast<int>(s.server1)) + "," +
           std::to_string(static_cast<int>(s.server2)) + ")";
}

namespace detail {
inline constexpr std::array<SystemState, 9> full_states{{
    {0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}, {1, 2}, {2, 0}, {2, 1}, {2, 2}}};
} // namespace detail

/// Legal joint states of a flexible design, row-major in (server1, server2).
/// Partial flexibility never places a type-2 customer at server 1, so its
/// space is the first six entries of the full one.
inline std::span<const SystemState> state_space(FlexibilityDesign design) {
    switch (design) {
    case FlexibilityDesign::Full:
        return {detail::full_states.data(), 9};
    case FlexibilityDesign::Partial:
        return {detail::full_states.data(), 6};
    case FlexibilityDesign::Independent:
        break;
    }
    throw UnsupportedDesign("independent has product form; it has no joint chain");
}

inline std::optional<std::size_t> state_index(FlexibilityDesign design, SystemState s) {
    auto space = state_space(design);
    for (std::size_t i = 0; i < space.size(); ++i)
        if (space[i] == s)
            return i;
    return std::nullopt;
}

/// Probability vector over a design's state space, indexed in
/// state_space order. Round-off negatives are clamped to zero and the
/// vector renormalized on construction.
class StationaryDistribution {
  public:
    StationaryDistribution(FlexibilityDesign design, std::vector<double> probs)
        : m_design(design), m_probs(std::move(probs)) {
        if (m_probs.size() != state_space(design).size())
            throw std::invalid_argument("distribution size does not match state space");
        double total = 0.0;
        for (double &p : m_probs) {
            if (p < 0.0)
                p = 0.0;
            total += p;
        }
        if (!(total > 0.0) || !std::isfinite(total))
            throw SingularChain("stationary vector has no probability mass");
        for (double &p : m_probs)
            p /= total;
    }

    FlexibilityDesign design() const noexcept { return m_design; }
    std::size_t size() const noexcept { return m_probs.size(); }
    std::span<const SystemState> states() const { return state_space(m_design); }
    std::span<const double> values() const noexcept { return m_probs; }

    double at(SystemState s) const {
        auto i = state_index(m_design, s);
        if (!i)
            throw std::out_of_range("state " + to_string(s) + " is not legal for " +
                                    std::string(to_string(m_design)));
        return m_probs[*i];
    }

    double operator()(int server1, int server2) const { return at(SystemState(server1, server2)); }

  private:
    FlexibilityDesign m_design;
    std::vector<double> m_probs;
};

} // namespace flexq

#endif
