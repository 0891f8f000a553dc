#ifndef FLEXQ_IO_SWEEP_HPP
#define FLEXQ_IO_SWEEP_HPP

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flexq/analysis.hpp"
#include "flexq/errors.hpp"
#include "flexq/io/format.hpp"

// Sweep configuration: UTF-8 text, one `key = value` per line, `#` starts
// a comment. Keys: rho_list, k_list, gamma_list (comma-separated reals)
// and output (CSV path; stdout when absent). A repeated key overrides the
// earlier one and produces a warning.

namespace flexq::io {

struct SweepConfig {
    std::vector<double> rho;
    std::vector<double> k;
    std::vector<double> gamma;
    std::optional<std::string> output;
};

namespace detail {

inline std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::string at_line(int line, const std::string &msg) {
    return "line " + std::to_string(line) + ": " + msg;
}

inline std::vector<double> parse_list(const std::string &key, const std::string &value, int line) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= value.size()) {
        auto comma = value.find(',', pos);
        if (comma == std::string::npos)
            comma = value.size();
        const std::string item = trim(value.substr(pos, comma - pos));
        if (item.empty()) {
            if (comma == value.size() && out.empty())
                break;
            throw ConfigError(at_line(line, key + ": empty list element"));
        }
        char *end = nullptr;
        errno = 0;
        const double v = std::strtod(item.c_str(), &end);
        if (end != item.c_str() + item.size() || errno == ERANGE || !std::isfinite(v))
            throw ConfigError(at_line(line, key + ": not a finite number: '" + item + "'"));
        out.push_back(v);
        pos = comma + 1;
    }
    if (out.empty())
        throw ConfigError(at_line(line, key + " is empty"));
    const bool ok = std::all_of(out.begin(), out.end(), [&](double v) {
        if (key == "rho_list")
            return v > 0.0;
        return v >= 0.0 && v <= 1.0;
    });
    if (!ok)
        throw ConfigError(at_line(line, key + ": value out of range"));
    return out;
}

} // namespace detail

inline SweepConfig parse_sweep_config(std::istream &in, std::vector<std::string> &warnings) {
    SweepConfig cfg;
    std::map<std::string, int> seen;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (line == 1 && raw.rfind("\xEF\xBB\xBF", 0) == 0)
            raw.erase(0, 3);
        if (auto hash = raw.find('#'); hash != std::string::npos)
            raw.erase(hash);
        const std::string text = detail::trim(raw);
        if (text.empty())
            continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError(detail::at_line(line, "expected 'key = value'"));
        const std::string key = detail::trim(text.substr(0, eq));
        const std::string value = detail::trim(text.substr(eq + 1));

        if (auto prev = seen.find(key); prev != seen.end())
            warnings.push_back(detail::at_line(line, "duplicate key '" + key +
                                                         "' overrides line " +
                                                         std::to_string(prev->second)));
        if (key == "rho_list")
            cfg.rho = detail::parse_list(key, value, line);
        else if (key == "k_list")
            cfg.k = detail::parse_list(key, value, line);
        else if (key == "gamma_list")
            cfg.gamma = detail::parse_list(key, value, line);
        else if (key == "output") {
            if (value.empty())
                throw ConfigError(detail::at_line(line, "output path is empty"));
            cfg.output = value;
        } else
            throw ConfigError(detail::at_line(line, "unknown key '" + key + "'"));
        seen[key] = line;
    }
    for (const char *key : {"rho_list", "k_list", "gamma_list"})
        if (!seen.count(key))
            throw ConfigError(detail::at_line(line, std::string("missing ") + key));
    return cfg;
}

inline std::vector<std::string> sweep_header() {
    return {"rho", "k", "gamma", "T_is", "T_ps", "T_fs", "regime", "ordering", "optimal", "tie"};
}

inline std::string ordering_label(const std::array<FlexibilityDesign, 3> &order) {
    auto abbrev = [](FlexibilityDesign d) {
        switch (d) {
        case FlexibilityDesign::Independent:
            return "is";
        case FlexibilityDesign::Partial:
            return "ps";
        case FlexibilityDesign::Full:
            return "fs";
        }
        return "?";
    };
    return std::string("T_") + abbrev(order[0]) + " < T_" + abbrev(order[1]) + " < T_" +
           abbrev(order[2]);
}

inline std::vector<std::string> assessment_fields(const SystemParams &p, const Assessment &a) {
    return {format_number(p.rho()),
            format_number(p.k()),
            format_number(p.gamma()),
            format_number(a.throughputs.independent),
            format_number(a.throughputs.partial),
            format_number(a.throughputs.full),
            a.regime ? std::to_string(a.regime->regime_index) : (a.tie ? "tie" : "na"),
            a.regime ? ordering_label(a.regime->ordering) : "",
            a.optimal ? std::string(to_string(*a.optimal)) : "tie",
            a.tie ? "1" : "0"};
}

/// One CSV row per (rho, k, gamma) triple, in rho-major grid order.
inline std::string run_sweep(const SweepConfig &cfg) {
    std::string out = csv_row(sweep_header());
    for (double rho : cfg.rho)
        for (double k : cfg.k)
            for (double gamma : cfg.gamma) {
                const SystemParams p = validate_params(rho, k, gamma);
                out += csv_row(assessment_fields(p, assess(p)));
            }
    return out;
}

} // namespace flexq::io

#endif
