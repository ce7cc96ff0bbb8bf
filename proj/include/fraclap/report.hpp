#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>

#include "fraclap/counterexample.hpp"
#include "fraclap/errors.hpp"

namespace fraclap {

// RFC 4180: CRLF line ends, header row, no quoting needed for numeric fields.
inline std::string scan_csv(const ScanGrid& g)
{
    std::string out = "s,a,value,sign\r\n";
    for (std::size_t i = 0; i < g.s_values.size(); ++i)
        for (std::size_t j = 0; j < g.a_values.size(); ++j) {
            out += detail::fmt_double(g.s_values[i]) + "," + detail::fmt_double(g.a_values[j]) + ","
                   + detail::fmt_double(g.value(i, j)) + "," + std::to_string(g.sign(i, j)) + "\r\n";
        }
    return out;
}

struct SvgStyle {
    int width = 640, height = 480;
    int margin = 60;
    std::string positive = "#3b6fb6";
    std::string negative = "#e8a33d";
    std::string zero = "#ffffff";
};

namespace detail {

inline std::string fmt_short(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

inline std::string fmt_px(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

} // namespace detail

// Sign grid as SVG 1.1: s along x, a along y (increasing upward). `dashed_s` draws a
// vertical dashed line at that s when it lies inside the range.
inline std::string scan_svg(const ScanGrid& g, std::optional<double> dashed_s = std::nullopt, const SvgStyle& st = {})
{
    const std::size_t ns = g.s_values.size(), na = g.a_values.size();
    if (ns < 2 || na < 2) throw DomainError("scan_svg: grid must be at least 2x2");
    const double ds = g.s_values[1] - g.s_values[0], da = g.a_values[1] - g.a_values[0];
    const double s0 = g.s_values.front() - 0.5 * ds, s1 = g.s_values.back() + 0.5 * ds;
    const double a0 = g.a_values.front() - 0.5 * da, a1 = g.a_values.back() + 0.5 * da;
    const double pw = st.width - 2.0 * st.margin, ph = st.height - 2.0 * st.margin;
    auto X = [&](double s) { return st.margin + (s - s0) / (s1 - s0) * pw; };
    auto Y = [&](double a) { return st.margin + (a1 - a) / (a1 - a0) * ph; };
    using detail::fmt_px;
    using detail::fmt_short;

    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << st.width << "\" height=\""
      << st.height << "\" viewBox=\"0 0 " << st.width << " " << st.height << "\">\n"
      << "<title>sign of " << to_string(g.criterion) << "(s,a)</title>\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << st.width << "\" height=\"" << st.height << "\" fill=\"#ffffff\"/>\n"
      << "<g shape-rendering=\"crispEdges\">\n";
    const double cw = pw / ns, chh = ph / na;
    for (std::size_t i = 0; i < ns; ++i)
        for (std::size_t j = 0; j < na; ++j) {
            const int sg = g.sign(i, j);
            const std::string& fill = sg > 0 ? st.positive : (sg < 0 ? st.negative : st.zero);
            o << "<rect x=\"" << fmt_px(st.margin + i * cw) << "\" y=\"" << fmt_px(st.margin + (na - 1 - j) * chh)
              << "\" width=\"" << fmt_px(cw) << "\" height=\"" << fmt_px(chh) << "\" fill=\"" << fill << "\"/>\n";
        }
    o << "</g>\n";
    o << "<rect x=\"" << st.margin << "\" y=\"" << st.margin << "\" width=\"" << fmt_px(pw) << "\" height=\""
      << fmt_px(ph) << "\" fill=\"none\" stroke=\"#000000\"/>\n";

    o << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#000000\">\n";
    const int ticks = 5;
    for (int k = 0; k < ticks; ++k) {
        const double s = s0 + (s1 - s0) * k / (ticks - 1), a = a0 + (a1 - a0) * k / (ticks - 1);
        o << "<line x1=\"" << fmt_px(X(s)) << "\" y1=\"" << fmt_px(st.margin + ph) << "\" x2=\"" << fmt_px(X(s))
          << "\" y2=\"" << fmt_px(st.margin + ph + 5) << "\" stroke=\"#000000\"/>\n"
          << "<text x=\"" << fmt_px(X(s)) << "\" y=\"" << fmt_px(st.margin + ph + 18)
          << "\" text-anchor=\"middle\">" << fmt_short(s) << "</text>\n";
        o << "<line x1=\"" << fmt_px(st.margin - 5.0) << "\" y1=\"" << fmt_px(Y(a)) << "\" x2=\"" << st.margin
          << "\" y2=\"" << fmt_px(Y(a)) << "\" stroke=\"#000000\"/>\n"
          << "<text x=\"" << fmt_px(st.margin - 8.0) << "\" y=\"" << fmt_px(Y(a) + 4)
          << "\" text-anchor=\"end\">" << fmt_short(a) << "</text>\n";
    }
    o << "<text x=\"" << fmt_px(st.margin + 0.5 * pw) << "\" y=\"" << st.height - 15
      << "\" text-anchor=\"middle\">s</text>\n"
      << "<text x=\"15\" y=\"" << fmt_px(st.margin + 0.5 * ph) << "\" text-anchor=\"middle\">a</text>\n"
      << "<text x=\"" << fmt_px(st.margin + 0.5 * pw) << "\" y=\"" << st.margin - 20
      << "\" text-anchor=\"middle\">" << to_string(g.criterion) << "(s,a): positive " << st.positive
      << ", negative " << st.negative << "</text>\n";
    o << "</g>\n";

    if (dashed_s && *dashed_s > s0 && *dashed_s < s1) {
        o << "<line x1=\"" << fmt_px(X(*dashed_s)) << "\" y1=\"" << st.margin << "\" x2=\"" << fmt_px(X(*dashed_s))
          << "\" y2=\"" << fmt_px(st.margin + ph) << "\" stroke=\"#000000\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"/>\n"
          << "<text x=\"" << fmt_px(X(*dashed_s) + 4) << "\" y=\"" << st.margin + 14
          << "\" font-family=\"sans-serif\" font-size=\"12\">s0</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

// s0 = sqrt(3) + 3/2, drawn on h-scans.
inline double h_scan_marker() { return std::sqrt(3.0) + 1.5; }

} // namespace fraclap
