#ifndef FLEXQ_IO_LEVELSET_PLOT_HPP
#define FLEXQ_IO_LEVELSET_PLOT_HPP

#include <cstddef>
#include <sstream>
#include <string>

#include "flexq/analysis.hpp"
#include "flexq/io/format.hpp"

namespace flexq::io {

/// Columns: k, gamma_g, gamma_b, gamma_r.
inline std::string level_set_csv(const LevelSetTrace &trace) {
    std::string out = csv_row({"k", "gamma_g", "gamma_b", "gamma_r"});
    const auto &g = trace.partial_independent.points;
    const auto &b = trace.full_independent.points;
    const auto &r = trace.full_partial.points;
    for (std::size_t i = 0; i < g.size(); ++i)
        out += csv_row({format_number(g[i].k), format_number(g[i].gamma),
                        format_number(b[i].gamma), format_number(r[i].gamma)});
    return out;
}

namespace detail {

struct PlotFrame {
    static constexpr double left = 70, right = 620, top = 30, bottom = 420;

    static double x(double k) { return left + k * (right - left); }
    static double y(double gamma) { return bottom - gamma * (bottom - top); }
};

inline std::string coord(double v) { return format_fixed(v, 2); }

inline std::string polyline(const LevelSetCurve &curve, const char *color) {
    std::string pts;
    for (const auto &p : curve.points) {
        if (!pts.empty())
            pts += ' ';
        pts += coord(PlotFrame::x(p.k)) + "," + coord(PlotFrame::y(p.gamma));
    }
    return "  <polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
}

inline std::string text(double x, double y, const std::string &body, const char *anchor = "middle",
                        int size = 12) {
    return "  <text x=\"" + coord(x) + "\" y=\"" + coord(y) + "\" font-size=\"" +
           std::to_string(size) + "\" text-anchor=\"" + anchor + "\">" + body + "</text>\n";
}

} // namespace detail

/// SVG 1.1 rendering of the three level-set curves on the (k, gamma) unit
/// square, 640x480, with the reference line gamma = rho/(rho+1) and the
/// throughput ordering of each region.
inline std::string render_level_set_svg(const LevelSetTrace &trace) {
    using detail::coord;
    using detail::PlotFrame;
    using detail::text;
    const auto &g = trace.partial_independent.points;
    const auto &b = trace.full_independent.points;
    const auto &r = trace.full_partial.points;
    const double rho = trace.full_partial.rho;
    const double cap = rho / (rho + 1.0);

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"640\" height=\"480\" "
           "viewBox=\"0 0 640 480\" font-family=\"sans-serif\">\n"
        << "  <rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"white\"/>\n"
        << "  <rect x=\"" << coord(PlotFrame::left) << "\" y=\"" << coord(PlotFrame::top)
        << "\" width=\"" << coord(PlotFrame::right - PlotFrame::left) << "\" height=\""
        << coord(PlotFrame::bottom - PlotFrame::top)
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (int i = 0; i <= 5; ++i) {
        const double v = i / 5.0;
        const std::string label = format_fixed(v, 1);
        svg << "  <line x1=\"" << coord(PlotFrame::x(v)) << "\" y1=\"" << coord(PlotFrame::bottom)
            << "\" x2=\"" << coord(PlotFrame::x(v)) << "\" y2=\"" << coord(PlotFrame::bottom + 5)
            << "\" stroke=\"black\"/>\n"
            << text(PlotFrame::x(v), PlotFrame::bottom + 18, label)
            << "  <line x1=\"" << coord(PlotFrame::left - 5) << "\" y1=\"" << coord(PlotFrame::y(v))
            << "\" x2=\"" << coord(PlotFrame::left) << "\" y2=\"" << coord(PlotFrame::y(v))
            << "\" stroke=\"black\"/>\n"
            << text(PlotFrame::left - 8, PlotFrame::y(v) + 4, label, "end");
    }
    svg << text((PlotFrame::left + PlotFrame::right) / 2, PlotFrame::bottom + 40, "k", "middle", 14)
        << "  <text x=\"20\" y=\"" << coord((PlotFrame::top + PlotFrame::bottom) / 2)
        << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
        << coord((PlotFrame::top + PlotFrame::bottom) / 2) << ")\">&#947;</text>\n"
        << text((PlotFrame::left + PlotFrame::right) / 2, 20,
                "Level sets, &#961; = " + format_number(rho), "middle", 13);

    svg << "  <line x1=\"" << coord(PlotFrame::left) << "\" y1=\"" << coord(PlotFrame::y(cap))
        << "\" x2=\"" << coord(PlotFrame::right) << "\" y2=\"" << coord(PlotFrame::y(cap))
        << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n"
        << text(PlotFrame::right - 4, PlotFrame::y(cap) - 4, "&#947; = &#961;/(&#961;+1)", "end",
                11);

    svg << detail::polyline(trace.partial_independent, "green")
        << detail::polyline(trace.full_independent, "blue")
        << detail::polyline(trace.full_partial, "red");

    if (!r.empty()) {
        // Label each region where it is widest on the traced grid.
        std::size_t mid = r.size() / 2, wide12 = 0, wide23 = 0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (b[i].gamma - g[i].gamma > b[wide12].gamma - g[wide12].gamma)
                wide12 = i;
            if (r[i].gamma - b[i].gamma > r[wide23].gamma - b[wide23].gamma)
                wide23 = i;
        }
        svg << text(PlotFrame::x(g[mid].k), PlotFrame::y(g[mid].gamma / 2),
                    "T_fs &lt; T_ps &lt; T_is", "middle", 11)
            << text(PlotFrame::x(g[wide12].k), PlotFrame::y((g[wide12].gamma + b[wide12].gamma) / 2) + 4,
                    "T_fs &lt; T_is &lt; T_ps", "middle", 11)
            << text(PlotFrame::x(b[wide23].k), PlotFrame::y((b[wide23].gamma + r[wide23].gamma) / 2) + 4,
                    "T_is &lt; T_fs &lt; T_ps", "middle", 11)
            << text(PlotFrame::x(r[mid].k), PlotFrame::y((r[mid].gamma + 1.0) / 2),
                    "T_is &lt; T_ps &lt; T_fs", "middle", 11);
    }

    const double lx = PlotFrame::left + 10, ly = PlotFrame::top + 10;
    svg << "  <rect x=\"" << coord(lx) << "\" y=\"" << coord(ly)
        << "\" width=\"120\" height=\"62\" fill=\"white\" stroke=\"black\"/>\n";
    const char *colors[3] = {"red", "blue", "green"};
    const char *labels[3] = {"T_fs &#8722; T_ps", "T_fs &#8722; T_is", "T_ps &#8722; T_is"};
    for (int i = 0; i < 3; ++i) {
        const double yy = ly + 16 + 18 * i;
        svg << "  <line x1=\"" << coord(lx + 8) << "\" y1=\"" << coord(yy - 4) << "\" x2=\""
            << coord(lx + 30) << "\" y2=\"" << coord(yy - 4) << "\" stroke=\"" << colors[i]
            << "\" stroke-width=\"2\"/>\n"
            << text(lx + 36, yy, labels[i], "start", 11);
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace flexq::io

#endif
