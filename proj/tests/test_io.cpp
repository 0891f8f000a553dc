#include <sstream>

#include <gtest/gtest.h>

#include "flexq/io/format.hpp"
#include "flexq/io/levelset_plot.hpp"
#include "flexq/io/sweep.hpp"

using namespace flexq;
using namespace flexq::io;

namespace {

SweepConfig parse(const std::string &text, std::vector<std::string> &warnings) {
    std::istringstream in(text);
    return parse_sweep_config(in, warnings);
}

std::string parse_error(const std::string &text) {
    std::vector<std::string> w;
    try {
        parse(text, w);
    } catch (const ConfigError &e) {
        return e.what();
    }
    return "";
}

std::vector<std::vector<std::string>> records(const std::string &csv) {
    std::vector<std::vector<std::string>> out;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        const auto end = csv.find("\r\n", pos);
        out.push_back(parse_csv_record(std::string_view(csv).substr(pos, end - pos)));
        pos = end + 2;
    }
    return out;
}

} // namespace

TEST(Format, TwelveSignificantDigits) {
    EXPECT_EQ(format_number(0.2), "0.200000000000");
    EXPECT_EQ(format_number(1.0 / 3), "0.333333333333");
    EXPECT_EQ(format_number(12.0), "12.0000000000");
    EXPECT_EQ(format_number(-0.0), "0.00000000000");
    EXPECT_EQ(format_number(1e-20), "1.00000000000e-20");
    EXPECT_EQ(format_fixed(-0.001, 2), "0.00");
    EXPECT_EQ(format_fixed(1.005, 1), "1.0");
}

TEST(Format, CsvQuotingRoundTrips) {
    const std::vector<std::string> fields{"plain", "a,b", "say \"hi\"", "", "T_fs < T_ps"};
    const std::string row = csv_row(fields);
    EXPECT_EQ(row, "plain,\"a,b\",\"say \"\"hi\"\"\",,T_fs < T_ps\r\n");
    EXPECT_EQ(parse_csv_record(row.substr(0, row.size() - 2)), fields);
}

TEST(Sweep, ParsesConfig) {
    std::vector<std::string> w;
    const auto cfg = parse("\xEF\xBB\xBF# grid\nrho_list = 1, 2\nk_list=0.5\n\ngamma_list = 0.1,0.9 # two\n"
                           "output = out.csv\n",
                           w);
    EXPECT_EQ(cfg.rho, (std::vector<double>{1, 2}));
    EXPECT_EQ(cfg.k, (std::vector<double>{0.5}));
    EXPECT_EQ(cfg.gamma, (std::vector<double>{0.1, 0.9}));
    EXPECT_EQ(cfg.output, "out.csv");
    EXPECT_TRUE(w.empty());
}

TEST(Sweep, DuplicateKeyWarns) {
    std::vector<std::string> w;
    const auto cfg = parse("rho_list=1\nk_list=0.5\ngamma_list=0.5\nrho_list=3\n", w);
    EXPECT_EQ(cfg.rho, (std::vector<double>{3}));
    ASSERT_EQ(w.size(), 1u);
    EXPECT_EQ(w[0], "line 4: duplicate key 'rho_list' overrides line 1");
}

TEST(Sweep, ErrorsNameTheLine) {
    EXPECT_EQ(parse_error("rho_list=1\nk_list=0.5\nfoo=1\n"), "line 3: unknown key 'foo'");
    EXPECT_EQ(parse_error("rho_list=1\nk_list=\ngamma_list=0.1\n"), "line 2: k_list is empty");
    EXPECT_EQ(parse_error("rho_list=1\nk_list=0.5,x\n"), "line 2: k_list: not a finite number: 'x'");
    EXPECT_EQ(parse_error("rho_list=0\n"), "line 1: rho_list: value out of range");
    EXPECT_EQ(parse_error("rho_list=1\nk_list=1.5\n"), "line 2: k_list: value out of range");
    EXPECT_EQ(parse_error("rho_list=1\nk_list=0.5,,0.2\n"), "line 2: k_list: empty list element");
    EXPECT_EQ(parse_error("rho_list 1\n"), "line 1: expected 'key = value'");
    EXPECT_EQ(parse_error("rho_list=1\nk_list=0.5\n"), "line 2: missing gamma_list");
}

TEST(Sweep, RowsAgreeWithThresholds) {
    SweepConfig cfg{{1.0, 2.0}, {0.25, 0.5, 0.75}, {0.1, 0.36, 0.45, 0.9, 1.0}, std::nullopt};
    const auto rows = records(run_sweep(cfg));
    ASSERT_EQ(rows.size(), 1u + 2 * 3 * 5);
    EXPECT_EQ(rows[0], sweep_header());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto &row = rows[i];
        const double rho = std::stod(row[0]), k = std::stod(row[1]), g = std::stod(row[2]);
        const auto t = thresholds(rho, k);
        if (g == 1.0) {
            EXPECT_EQ(row[6], "na");
            EXPECT_EQ(row[8], "full");
            continue;
        }
        const int expected = regime_from_thresholds(t, g).regime_index;
        EXPECT_EQ(row[6], std::to_string(expected)) << rho << " " << k << " " << g;
        EXPECT_EQ(row[9], "0");
    }
    // rho-major order
    EXPECT_EQ(rows[1][0], "1.00000000000");
    EXPECT_EQ(rows[16][0], "2.00000000000");
}

TEST(Sweep, TieOnThreshold) {
    SweepConfig cfg{{1.0}, {0.25}, {0.2}, std::nullopt};
    const auto rows = records(run_sweep(cfg));
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1][6], "tie");
    EXPECT_EQ(rows[1][8], "tie");
    EXPECT_EQ(rows[1][9], "1");
}

TEST(LevelSetOutput, CsvAndSvg) {
    const std::vector<double> grid{0.25, 0.5, 0.75};
    const auto trace = trace_level_sets(1.0, grid);
    const auto rows = records(level_set_csv(trace));
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"k", "gamma_g", "gamma_b", "gamma_r"}));
    EXPECT_EQ(rows[2][1], "0.333333333333");
    EXPECT_NEAR(std::stod(rows[2][3]), 0.476832956171003, 1e-9);

    const std::string svg = render_level_set_svg(trace);
    EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
    EXPECT_NE(svg.find("width=\"640\" height=\"480\""), std::string::npos);
    for (const char *needle : {"stroke=\"red\"", "stroke=\"blue\"", "stroke=\"green\"",
                               "T_is &lt; T_ps &lt; T_fs", "T_fs &lt; T_ps &lt; T_is", "</svg>"})
        EXPECT_NE(svg.find(needle), std::string::npos) << needle;
    EXPECT_EQ(render_level_set_svg(trace), svg);
}
