// flexq: command-line front end for the two-server flexibility analysis.
//
// Exit codes: 0 ok, 1 numerical failure, 2 usage or domain error, 3 file I/O error.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "flexq/analysis.hpp"
#include "flexq/closed_form.hpp"
#include "flexq/core.hpp"
#include "flexq/ctmc.hpp"
#include "flexq/io/format.hpp"
#include "flexq/io/levelset_plot.hpp"
#include "flexq/io/sweep.hpp"
#include "flexq/simulate.hpp"

namespace {

using flexq::FlexibilityDesign;
using flexq::io::csv_row;
using flexq::io::format_number;
using json = nlohmann::ordered_json;

constexpr int exit_usage = 2;
constexpr int exit_io = 3;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Format { Table, Csv, Json };

/// 12 significant digits, as a JSON number.
double num(double x) { return std::stod(format_number(x)); }

json envelope(const std::string &command) {
    json j;
    j["schema_version"] = "1";
    j["command"] = command;
    return j;
}

FlexibilityDesign design_from(const std::string &name) {
    auto d = flexq::parse_design(name);
    if (!d)
        throw flexq::DomainError("design", "expected independent, partial or full");
    return *d;
}

void write_file(const std::string &path, const std::string &body) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out << body;
    out.flush();
    if (!out)
        throw IoError("failed writing '" + path + "'");
}

std::string ordering_text(const flexq::Assessment &a) {
    return a.regime ? flexq::io::ordering_label(a.regime->ordering) : "";
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
    std::string design;
    double rho = 0, k = 0, gamma = 0;
};

void cmd_solve(const SolveArgs &args, Format fmt) {
    const auto design = design_from(args.design);
    if (design == FlexibilityDesign::Independent)
        throw flexq::UnsupportedDesign("independent has product form; use throughput");
    const auto params = flexq::validate_params(args.rho, args.k, args.gamma);
    const auto pi = flexq::solve_stationary(design, params);
    const double residual = flexq::balance_residual(flexq::build_generator(design, params), pi);

    switch (fmt) {
    case Format::Table:
        std::cout << "design: " << flexq::to_string(design) << "\n";
        for (std::size_t i = 0; i < pi.size(); ++i)
            std::cout << flexq::to_string(pi.states()[i]) << ", " << format_number(pi.values()[i])
                      << "\n";
        std::cout << "residual_inf: " << format_number(residual) << "\n";
        break;
    case Format::Csv:
        std::cout << csv_row({"state", "probability", "residual_inf"});
        for (std::size_t i = 0; i < pi.size(); ++i)
            std::cout << csv_row({flexq::to_string(pi.states()[i]), format_number(pi.values()[i]),
                                  format_number(residual)});
        break;
    case Format::Json: {
        json j = envelope("solve");
        j["design"] = flexq::to_string(design);
        j["rho"] = num(args.rho);
        j["k"] = num(args.k);
        j["gamma"] = num(args.gamma);
        json states = json::array();
        for (std::size_t i = 0; i < pi.size(); ++i)
            states.push_back({{"state", flexq::to_string(pi.states()[i])},
                              {"probability", num(pi.values()[i])}});
        j["states"] = states;
        j["residual_inf"] = num(residual);
        std::cout << j.dump(2) << "\n";
        break;
    }
    }
}

// ----------------------------------------------------------- throughput

void cmd_throughput(double rho, double k, double gamma, Format fmt) {
    const auto params = flexq::validate_params(rho, k, gamma);
    const auto a = flexq::assess(params);
    const std::string optimal = a.optimal ? std::string(flexq::to_string(*a.optimal)) : "tie";

    switch (fmt) {
    case Format::Table:
        std::cout << "T_is: " << format_number(a.throughputs.independent) << "\n"
                  << "T_ps: " << format_number(a.throughputs.partial) << "\n"
                  << "T_fs: " << format_number(a.throughputs.full) << "\n"
                  << "regime: "
                  << (a.regime ? std::to_string(a.regime->regime_index) + " (" + ordering_text(a) + ")"
                               : (a.tie ? "tie" : "na"))
                  << "\n"
                  << "optimal: " << optimal << "\n"
                  << "tie: " << (a.tie ? "yes" : "no") << "\n";
        break;
    case Format::Csv:
        std::cout << csv_row(flexq::io::sweep_header())
                  << csv_row(flexq::io::assessment_fields(params, a));
        break;
    case Format::Json: {
        json j = envelope("throughput");
        j["rho"] = num(rho);
        j["k"] = num(k);
        j["gamma"] = num(gamma);
        j["T_is"] = num(a.throughputs.independent);
        j["T_ps"] = num(a.throughputs.partial);
        j["T_fs"] = num(a.throughputs.full);
        j["regime"] = a.regime ? json(a.regime->regime_index) : json(nullptr);
        j["ordering"] = a.regime ? json(ordering_text(a)) : json(nullptr);
        j["optimal"] = a.optimal ? json(optimal) : json(nullptr);
        j["tie"] = a.tie;
        std::cout << j.dump(2) << "\n";
        break;
    }
    }
}

// ----------------------------------------------------------- thresholds

void cmd_thresholds(double rho, double k, double tol, Format fmt) {
    flexq::validate_params(rho, k, 1.0);
    std::string status = "ok";
    std::string g, b, r, limit;
    if (k == 0.0) {
        status = "degenerate";
        g = format_number(0.0);
        b = format_number(0.0);
        limit = format_number(flexq::gamma_r_zero_limit(rho, tol));
    } else {
        const auto t = flexq::thresholds(rho, k, tol);
        if (k == 1.0)
            status = "coincident";
        g = format_number(t.gamma_g);
        b = format_number(t.gamma_b);
        r = format_number(t.gamma_r);
    }

    switch (fmt) {
    case Format::Table:
        std::cout << "gamma_g: " << g << "\n"
                  << "gamma_b: " << b << "\n"
                  << "gamma_r: " << (r.empty() ? "any (full and partial coincide)" : r) << "\n"
                  << "status: " << status << "\n";
        if (!limit.empty())
            std::cout << "gamma_r_limit_k0: " << limit << "\n";
        break;
    case Format::Csv:
        std::cout << csv_row({"rho", "k", "gamma_g", "gamma_b", "gamma_r", "status",
                              "gamma_r_limit_k0"})
                  << csv_row({format_number(rho), format_number(k), g, b, r, status, limit});
        break;
    case Format::Json: {
        json j = envelope("thresholds");
        j["rho"] = num(rho);
        j["k"] = num(k);
        auto val = [](const std::string &s) { return s.empty() ? json(nullptr) : json(std::stod(s)); };
        j["gamma_g"] = val(g);
        j["gamma_b"] = val(b);
        j["gamma_r"] = val(r);
        j["status"] = status;
        j["gamma_r_limit_k0"] = val(limit);
        std::cout << j.dump(2) << "\n";
        break;
    }
    }
}

// ------------------------------------------------------------- levelset

struct LevelsetArgs {
    double rho = 1.0, k_min = 0.02, k_max = 0.98;
    int steps = 49;
    std::string svg, csv;
};

void cmd_levelset(const LevelsetArgs &args) {
    flexq::validate_params(args.rho, 0.5, 0.5);
    if (!(args.k_min > 0.0 && args.k_min < args.k_max && args.k_max < 1.0))
        throw flexq::DomainError("k-min/k-max", "need 0 < k-min < k-max < 1");
    if (args.steps < 2)
        throw flexq::DomainError("steps", "need at least 2 grid points");

    std::vector<double> grid;
    for (int i = 0; i < args.steps; ++i)
        grid.push_back(args.k_min + (args.k_max - args.k_min) * i / (args.steps - 1));
    const auto trace = flexq::trace_level_sets(args.rho, grid);

    const std::string csv = flexq::io::level_set_csv(trace);
    if (!args.csv.empty())
        write_file(args.csv, csv);
    if (!args.svg.empty())
        write_file(args.svg, flexq::io::render_level_set_svg(trace));
    if (args.csv.empty() && args.svg.empty())
        std::cout << csv;
}

// ------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string design;
    double rho = 0, k = 0;
    std::optional<double> gamma;
    std::uint64_t horizon = 1'000'000, seed = 42;
    std::optional<std::uint64_t> warmup;
    std::uint32_t batches = 20;
};

void cmd_simulate(const SimulateArgs &args, Format fmt) {
    const auto design = design_from(args.design);
    if (!args.gamma && design != FlexibilityDesign::Independent)
        throw flexq::DomainError("gamma", "required for flexible designs");
    const auto params = flexq::validate_params(args.rho, args.k, args.gamma.value_or(1.0));
    auto cfg = flexq::make_sim_config(design, params, args.horizon, args.seed, args.batches);
    if (args.warmup)
        cfg.warmup_events = *args.warmup;
    const auto rep = flexq::validate_against_analytic(cfg);
    const auto &e = rep.estimate;

    switch (fmt) {
    case Format::Table:
        std::cout << "design: " << flexq::to_string(design) << "\n"
                  << "mean: " << format_number(e.mean) << "\n"
                  << "half_width_95: " << format_number(e.half_width_95) << "\n"
                  << "std_error: " << format_number(e.std_error) << "\n"
                  << "accepted: " << e.accepted << "\n"
                  << "offered: " << e.offered << "\n"
                  << "accept_type1: " << format_number(e.by_type[0].acceptance()) << "\n"
                  << "accept_type2: " << format_number(e.by_type[1].acceptance()) << "\n"
                  << "analytic: " << format_number(rep.analytic) << "\n"
                  << "z: " << format_number(rep.z_score) << "\n"
                  << "pass: " << (rep.pass ? "yes" : "no") << "\n";
        break;
    case Format::Csv:
        std::cout << csv_row({"design", "rho", "k", "gamma", "horizon", "seed", "mean",
                              "half_width_95", "std_error", "accepted", "offered", "accept_type1",
                              "accept_type2", "analytic", "z", "pass"})
                  << csv_row({std::string(flexq::to_string(design)), format_number(params.rho()),
                              format_number(params.k()), format_number(params.gamma()),
                              std::to_string(args.horizon), std::to_string(args.seed),
                              format_number(e.mean), format_number(e.half_width_95),
                              format_number(e.std_error), std::to_string(e.accepted),
                              std::to_string(e.offered), format_number(e.by_type[0].acceptance()),
                              format_number(e.by_type[1].acceptance()), format_number(rep.analytic),
                              format_number(rep.z_score), rep.pass ? "1" : "0"});
        break;
    case Format::Json: {
        json j = envelope("simulate");
        j["design"] = flexq::to_string(design);
        j["rho"] = num(params.rho());
        j["k"] = num(params.k());
        j["gamma"] = num(params.gamma());
        j["horizon"] = args.horizon;
        j["seed"] = args.seed;
        j["mean"] = num(e.mean);
        j["half_width_95"] = num(e.half_width_95);
        j["std_error"] = num(e.std_error);
        j["accepted"] = e.accepted;
        j["offered"] = e.offered;
        j["accept_type1"] = num(e.by_type[0].acceptance());
        j["accept_type2"] = num(e.by_type[1].acceptance());
        j["analytic"] = num(rep.analytic);
        j["z"] = std::isfinite(rep.z_score) ? json(num(rep.z_score)) : json(nullptr);
        j["pass"] = rep.pass;
        std::cout << j.dump(2) << "\n";
        break;
    }
    }
}

// ---------------------------------------------------------------- sweep

void cmd_sweep(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read config '" + path + "'");
    std::vector<std::string> warnings;
    const auto cfg = flexq::io::parse_sweep_config(in, warnings);
    for (const auto &w : warnings)
        std::cerr << "warning: " << path << ": " << w << "\n";
    const std::string csv = flexq::io::run_sweep(cfg);
    if (cfg.output)
        write_file(*cfg.output, csv);
    else
        std::cout << csv;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Throughput, thresholds and optimal flexibility design for a two-server loss "
                 "system with prolonged service at non-dedicated servers"};
    app.require_subcommand(1);

    const std::map<std::string, Format> formats{
        {"table", Format::Table}, {"csv", Format::Csv}, {"json", Format::Json}};
    Format fmt = Format::Table;
    auto add_format = [&](CLI::App *sub) {
        sub->add_option("--format", fmt, "Output format: table, csv or json")
            ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    };

    SolveArgs solve;
    auto *solve_cmd = app.add_subcommand("solve", "Stationary distribution of a flexible design");
    solve_cmd->add_option("--design", solve.design, "independent, partial or full")->required();
    solve_cmd->add_option("--rho", solve.rho, "Occupation rate")->required();
    solve_cmd->add_option("--k", solve.k, "Asymmetry degree in [0,1]")->required();
    solve_cmd->add_option("--gamma", solve.gamma, "Prolonged coefficient in [0,1]")->required();
    add_format(solve_cmd);

    double rho = 0, k = 0, gamma = 0, tol = flexq::default_threshold_tol;
    auto *tp_cmd = app.add_subcommand("throughput", "Throughputs, regime and optimal design");
    tp_cmd->add_option("--rho", rho)->required();
    tp_cmd->add_option("--k", k)->required();
    tp_cmd->add_option("--gamma", gamma)->required();
    add_format(tp_cmd);

    auto *th_cmd = app.add_subcommand("thresholds", "Critical prolonged coefficients");
    th_cmd->add_option("--rho", rho)->required();
    th_cmd->add_option("--k", k)->required();
    th_cmd->add_option("--tol", tol, "Bisection tolerance on gamma");
    add_format(th_cmd);

    LevelsetArgs ls;
    auto *ls_cmd = app.add_subcommand("levelset", "Trace the level sets over a k grid");
    ls_cmd->add_option("--rho", ls.rho)->required();
    ls_cmd->add_option("--k-min", ls.k_min);
    ls_cmd->add_option("--k-max", ls.k_max);
    ls_cmd->add_option("--steps", ls.steps);
    ls_cmd->add_option("--svg", ls.svg, "Write the SVG plot here");
    ls_cmd->add_option("--csv", ls.csv, "Write the CSV table here");

    SimulateArgs sim;
    auto *sim_cmd = app.add_subcommand("simulate", "Discrete-event estimate of a throughput");
    sim_cmd->add_option("--design", sim.design)->required();
    sim_cmd->add_option("--rho", sim.rho)->required();
    sim_cmd->add_option("--k", sim.k)->required();
    sim_cmd->add_option("--gamma", sim.gamma, "Required unless --design independent");
    sim_cmd->add_option("--horizon", sim.horizon, "Arrivals to simulate");
    sim_cmd->add_option("--seed", sim.seed);
    sim_cmd->add_option("--warmup", sim.warmup, "Warmup arrivals (default 5% of horizon)");
    sim_cmd->add_option("--batches", sim.batches, "Batch count for the CI (>= 10)");
    add_format(sim_cmd);

    std::string config_path;
    auto *sweep_cmd = app.add_subcommand("sweep", "Evaluate a parameter grid from a config file");
    sweep_cmd->add_option("config", config_path, "key = value config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (*solve_cmd)
            cmd_solve(solve, fmt);
        else if (*tp_cmd)
            cmd_throughput(rho, k, gamma, fmt);
        else if (*th_cmd)
            cmd_thresholds(rho, k, tol, fmt);
        else if (*ls_cmd)
            cmd_levelset(ls);
        else if (*sim_cmd)
            cmd_simulate(sim, fmt);
        else if (*sweep_cmd)
            cmd_sweep(config_path);
    } catch (const IoError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const flexq::DomainError &e) {
        std::cerr << "error: --" << e.what() << "\n";
        return exit_usage;
    } catch (const flexq::UnsupportedDesign &e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const flexq::ConfigError &e) {
        std::cerr << "error: " << (config_path.empty() ? "" : config_path + ": ") << e.what()
                  << "\n";
        return exit_usage;
    } catch (const flexq::Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
