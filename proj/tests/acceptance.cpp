// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include <filesystem>

#include "flexq/analysis.hpp"
#include "flexq/closed_form.hpp"
#include "flexq/ctmc.hpp"
#include "flexq/io/format.hpp"
#include "flexq/io/levelset_plot.hpp"
#include "flexq/simulate.hpp"

using namespace flexq;
using D = FlexibilityDesign;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

double max_rel_error(const StationaryDistribution &a, const StationaryDistribution &b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double ref = b.values()[i];
        const double err = std::abs(a.values()[i] - ref);
        worst = std::max(worst, ref > 0.0 ? err / ref : err);
    }
    return worst;
}

Outcome closed_form_equivalence() {
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> rho(0.1, 10.0), unit(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto p = validate_params(rho(rng), unit(rng), 1.0);
        worst = std::max(worst, max_rel_error(stationary_full_identical(p), solve_stationary(D::Full, p)));
        worst = std::max(worst, max_rel_error(stationary_partial_identical(p), solve_stationary(D::Partial, p)));
    }
    for (int i = 0; i < 1000; ++i) {
        const double g = 1.0 - unit(rng); // (0, 1]
        const auto p = validate_params(rho(rng), 1.0, g);
        worst = std::max(worst, max_rel_error(stationary_full_symmetric(p), solve_stationary(D::Full, p)));
        worst = std::max(worst, max_rel_error(stationary_partial_symmetric(p), solve_stationary(D::Partial, p)));
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "max relative error %.3g over 2000 points x 2 designs", worst);
    return {worst <= 1e-10, buf};
}

Outcome tabulated_curve_regression() {
    struct Point {
        double k, value;
        bool red;
    };
    // published curve coordinates at rho = 1
    const Point points[] = {
        {0.25687203089303, 0.46, true},   {0.5, 0.476956814468576, true},
        {0.5, 0.392203442112922, false},  {0.523631461725693, 0.4, false},
        {1.0, 0.5, true},                 {1.0, 0.5, false},
    };
    double worst = 0.0;
    for (const auto &pt : points) {
        const double got = pt.red ? gamma_r(1.0, pt.k).gamma : gamma_b(1.0, pt.k).gamma;
        worst = std::max(worst, std::abs(got - pt.value));
    }
    double g_err = 0.0;
    for (int i = 1; i <= 100; ++i) {
        const double k = i / 100.0;
        g_err = std::max(g_err, std::abs(gamma_g(1.0, k) - k / (k + 1.0)));
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "max |gamma - curve| %.3g (limit 1e-3), gamma_g error %.3g", worst,
                  g_err);
    return {worst <= 1e-3 && g_err <= 1e-15, buf};
}

Outcome regime_suite() {
    std::mt19937_64 rng(1003);
    std::uniform_real_distribution<double> rho(0.05, 20.0), unit(0.0, 1.0);
    int mismatches = 0, tested = 0, skipped = 0;
    while (tested < 10000) {
        const double r = rho(rng), k = unit(rng);
        const double cap = tested % 2 == 0 ? 1.0 : r / (r + 1.0);
        const double g = cap * unit(rng);
        if (k <= 0.0 || g <= 0.0)
            continue;
        const auto t = thresholds(r, k);
        if (std::min({std::abs(g - t.gamma_g), std::abs(g - t.gamma_b), std::abs(g - t.gamma_r)}) < 1e-6) {
            ++skipped;
            continue;
        }
        const auto p = validate_params(r, k, g);
        const auto direct = ordering_by_throughput(all_throughputs(p));
        try {
            const auto reg = classify_regime(p);
            if (reg.ordering != direct || optimal_design(p) != direct.back())
                ++mismatches;
        } catch (const Error &) {
            ++mismatches;
        }
        ++tested;
    }
    return {mismatches == 0, std::to_string(mismatches) + " mismatches in " + std::to_string(tested) +
                                 " triples (" + std::to_string(skipped) + " near-threshold draws skipped)"};
}

Outcome threshold_chain() {
    std::mt19937_64 rng(1004);
    std::uniform_real_distribution<double> rho(0.05, 20.0), unit(0.0, 1.0);
    int violations = 0;
    double min_gap = 1.0;
    for (int i = 0; i < 500; ++i) {
        const double r = rho(rng);
        double k = unit(rng);
        while (k <= 0.0)
            k = unit(rng);
        try {
            const auto t = thresholds(r, k);
            const double gaps[4] = {t.gamma_g, t.gamma_b - t.gamma_g, t.gamma_r - t.gamma_b,
                                    r / (r + 1) - t.gamma_r};
            for (double gap : gaps) {
                min_gap = std::min(min_gap, gap);
                if (!(gap > 1e-9))
                    ++violations;
            }
        } catch (const Error &) {
            ++violations;
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d violations in 500 draws, smallest gap %.3g", violations, min_gap);
    return {violations == 0, buf};
}

Outcome boundary_orderings() {
    std::mt19937_64 rng(1005);
    std::uniform_real_distribution<double> rho(0.05, 20.0), unit(0.0, 1.0);
    int violations = 0;
    for (int i = 0; i < 500; ++i) {
        const double r = rho(rng), k = 1.0 - unit(rng); // (0, 1]
        const auto one = all_throughputs(validate_params(r, k, 1.0));
        if (!(one.independent < one.partial && one.partial < one.full))
            ++violations;
        const auto zero = all_throughputs(validate_params(r, k, 0.0));
        if (!(zero.full == 0.0 && std::abs(zero.partial - r / (r + 1)) <= 1e-14 &&
              zero.partial < zero.independent))
            ++violations;
        const auto k0 = all_throughputs(validate_params(r, 0.0, 0.0));
        if (std::abs(k0.partial - k0.independent) > 1e-14)
            ++violations;
    }
    double worst_root = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double r = rho(rng);
        const double c = r / (r + 1);
        const auto base = validate_params(r, 1.0, 1.0);
        const std::pair<D, D> pairs[3] = {{D::Full, D::Partial}, {D::Full, D::Independent},
                                          {D::Partial, D::Independent}};
        for (const auto &[a, b] : pairs) {
            auto diff = [&](double g) {
                const auto p = base.with_gamma(g);
                return throughput(a, p) - throughput(b, p);
            };
            try {
                const double root = detail::bisect(diff, bracket_epsilon, 1.0 - bracket_epsilon, 1e-13);
                worst_root = std::max(worst_root, std::abs(root - c));
                if (std::abs(root - c) > 1e-10)
                    ++violations;
            } catch (const Error &) {
                ++violations;
            }
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d violations; symmetric sign changes within %.3g of rho/(rho+1)",
                  violations, worst_root);
    return {violations == 0, buf};
}

Outcome simulation_oracle() {
    std::mt19937_64 rng(1006);
    std::uniform_real_distribution<double> rho(0.1, 10.0), unit(0.0, 1.0), g(0.05, 1.0);
    std::string detail;
    bool pass = true;
    for (auto d : {D::Independent, D::Partial, D::Full}) {
        int within = 0;
        double worst_z = 0.0;
        for (int i = 0; i < 20; ++i) {
            const auto p = validate_params(rho(rng), unit(rng), g(rng));
            const auto est = simulate(make_sim_config(d, p, 2'000'000, 5000 + static_cast<std::uint64_t>(i)));
            const double z = std::abs(est.mean - throughput(d, p)) / est.std_error;
            worst_z = std::max(worst_z, z);
            if (z <= 3.0)
                ++within;
        }
        pass = pass && within >= 19;
        char buf[96];
        std::snprintf(buf, sizeof buf, "%s %d/20 (max |z| %.2f)", std::string(to_string(d)).c_str(),
                      within, worst_z);
        detail += (detail.empty() ? "" : ", ") + std::string(buf);
    }
    return {pass, detail};
}

std::string serialize(const ThroughputEstimate &e) {
    std::string s = io::format_number(e.mean) + " " + io::format_number(e.half_width_95);
    for (double b : e.batch_means)
        s += " " + io::format_number(b);
    for (double o : e.occupancy)
        s += " " + io::format_number(o);
    return s + " " + std::to_string(e.accepted);
}

std::string run_cli(const std::string &args) {
    FILE *pipe = popen((std::string(FLEXQ_CLI_PATH) + " " + args + " 2>/dev/null").c_str(), "r");
    std::string out;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe))
        out.append(buf, n);
    const int status = pclose(pipe);
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
        return "<exit " + std::to_string(status) + ">";
    return out;
}

std::string slurp(const std::filesystem::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism() {
    bool pass = true;
    for (auto d : {D::Independent, D::Partial, D::Full}) {
        const auto cfg = make_sim_config(d, validate_params(1.7, 0.6, 0.35), 200'000, 77);
        pass = pass && serialize(simulate(cfg)) == serialize(simulate(cfg));
    }
    const std::string sim = "simulate --design partial --rho 1 --k 0.5 --gamma 0.3 --horizon 100000 "
                            "--seed 9 --format json";
    const std::string a = run_cli(sim), b = run_cli(sim);
    pass = pass && a == b && a.rfind("<exit", 0) != 0;

    const auto dir = std::filesystem::temp_directory_path() /
                     ("flexq_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    std::string svg[2], csv[2];
    for (int i = 0; i < 2; ++i) {
        const auto s = dir / ("plot" + std::to_string(i) + ".svg");
        const auto c = dir / ("table" + std::to_string(i) + ".csv");
        run_cli("levelset --rho 1 --svg " + s.string() + " --csv " + c.string());
        svg[i] = slurp(s);
        csv[i] = slurp(c);
    }
    std::filesystem::remove_all(dir);
    pass = pass && !svg[0].empty() && !csv[0].empty() && svg[0] == svg[1] && csv[0] == csv[1];
    return {pass, "repeated simulations, CLI simulate output, levelset SVG and CSV compared byte for byte"};
}

struct Criterion {
    int id;
    const char *name;
    double limit_seconds; // 0: none
    std::function<Outcome()> check;
};

} // namespace

int main() {
    const Criterion criteria[] = {
        {1, "closed-form/solver equivalence", 5, closed_form_equivalence},
        {2, "tabulated level-set curve regression", 10, tabulated_curve_regression},
        {3, "regime prediction vs direct comparison", 60, regime_suite},
        {4, "threshold chain", 0, threshold_chain},
        {5, "boundary orderings", 0, boundary_orderings},
        {6, "simulation oracle", 300, simulation_oracle},
        {7, "determinism", 0, determinism},
    };
    int failed = 0;
    for (const auto &c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = c.limit_seconds == 0 || secs < c.limit_seconds;
        const bool pass = o.pass && in_time;
        failed += pass ? 0 : 1;
        std::printf("[%s] %d %s: %s; %.2f s", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
        if (c.limit_seconds > 0)
            std::printf(" (limit %.0f s)", c.limit_seconds);
        std::printf("\n");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed,
                std::size(criteria));
    return failed == 0 ? 0 : 1;
}
