#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "lfcsafe/scenario.hpp"

namespace lfcsafe {

struct PlotSeries {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotThreshold {
    double value = 0.0;
    std::string label;
};

struct PlotSpec {
    std::string title;
    std::string x_label = "t [s]";
    std::string y_label;
    std::vector<PlotSeries> series;
    std::vector<PlotThreshold> thresholds;
};

namespace detail {

inline std::string fmt_g6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

/// Keeps per-bucket extrema so 60k-sample traces stay renderable.
inline void decimate(const std::vector<double>& x, const std::vector<double>& y,
                     std::vector<double>& ox, std::vector<double>& oy) {
    const std::size_t n = x.size();
    const std::size_t max_buckets = 2000;
    if (n <= 2 * max_buckets) {
        ox = x;
        oy = y;
        return;
    }
    const std::size_t bucket = (n + max_buckets - 1) / max_buckets;
    for (std::size_t start = 0; start < n; start += bucket) {
        const std::size_t end = std::min(start + bucket, n);
        std::size_t imin = start, imax = start;
        for (std::size_t i = start + 1; i < end; ++i) {
            if (y[i] < y[imin]) imin = i;
            if (y[i] > y[imax]) imax = i;
        }
        const auto lo = std::min(imin, imax);
        const auto hi = std::max(imin, imax);
        ox.push_back(x[lo]);
        oy.push_back(y[lo]);
        if (hi != lo) {
            ox.push_back(x[hi]);
            oy.push_back(y[hi]);
        }
    }
}

}  // namespace detail

/// Renders a line chart as a standalone SVG with dashed threshold lines.
inline void write_svg(const PlotSpec& spec, const std::string& path) {
    if (spec.series.empty()) throw std::invalid_argument("write_svg: no series");
    const double width = 900, height = 320;
    const double ml = 70, mr = 24, mt = 34, mb = 46;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : spec.series) {
        for (double v : s.x) {
            xmin = std::min(xmin, v);
            xmax = std::max(xmax, v);
        }
        for (double v : s.y) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    }
    for (const auto& th : spec.thresholds) {
        ymin = std::min(ymin, th.value);
        ymax = std::max(ymax, th.value);
    }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    const double ypad = std::max((ymax - ymin) * 0.08, 1e-9 + 0.02 * std::abs(ymax));
    ymin -= ypad;
    ymax += ypad;

    auto sx = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double v) { return mt + (ymax - v) / (ymax - ymin) * ph; };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write plot file: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << ml << "\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\">"
        << spec.title << "</text>\n";

    for (int i = 0; i <= 5; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 5.0;
        const double yv = ymin + (ymax - ymin) * i / 5.0;
        out << "<line x1=\"" << sx(xv) << "\" y1=\"" << mt << "\" x2=\"" << sx(xv) << "\" y2=\""
            << mt + ph << "\" stroke=\"#e0e0e0\"/>\n";
        out << "<line x1=\"" << ml << "\" y1=\"" << sy(yv) << "\" x2=\"" << ml + pw << "\" y2=\""
            << sy(yv) << "\" stroke=\"#e0e0e0\"/>\n";
        out << "<text x=\"" << sx(xv) << "\" y=\"" << height - 24
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
            << detail::fmt_g6(xv) << "</text>\n";
        out << "<text x=\"" << ml - 6 << "\" y=\"" << sy(yv) + 4
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
            << detail::fmt_g6(yv) << "</text>\n";
    }
    out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"#404040\"/>\n";
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 6
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">"
        << spec.x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << mt + ph / 2
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
           "transform=\"rotate(-90 16 "
        << mt + ph / 2 << ")\">" << spec.y_label << "</text>\n";

    for (const auto& th : spec.thresholds) {
        out << "<line x1=\"" << ml << "\" y1=\"" << sy(th.value) << "\" x2=\"" << ml + pw
            << "\" y2=\"" << sy(th.value)
            << "\" stroke=\"#d62728\" stroke-dasharray=\"6 4\"/>\n";
        out << "<text x=\"" << ml + pw - 4 << "\" y=\"" << sy(th.value) - 4
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\" "
               "fill=\"#d62728\">"
            << th.label << "</text>\n";
    }

    for (const auto& s : spec.series) {
        std::vector<double> dx, dy;
        detail::decimate(s.x, s.y, dx, dy);
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < dx.size(); ++i) {
            if (i) out << ' ';
            out << detail::fmt_g6(sx(dx[i])) << ',' << detail::fmt_g6(sy(dy[i]));
        }
        out << "\"/>\n";
    }

    double legend_y = mt + 16;
    for (const auto& s : spec.series) {
        out << "<line x1=\"" << ml + 10 << "\" y1=\"" << legend_y - 4 << "\" x2=\"" << ml + 34
            << "\" y2=\"" << legend_y - 4 << "\" stroke=\"" << s.color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << ml + 40 << "\" y=\"" << legend_y
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
        legend_y += 16;
    }
    out << "</svg>\n";
}

/**
 * Emits the three standard charts for a trace: control signals, measured
 * frequency with the relay thresholds, and measured ROCOF with its limit.
 * Files are <stem>_control.svg, <stem>_frequency.svg, <stem>_rocof.svg.
 */
inline std::vector<std::string> write_standard_plots(const std::vector<TraceRecord>& trace,
                                                     const SafetyLimits& limits,
                                                     const double rocof_threshold,
                                                     const std::string& stem) {
    std::vector<double> t, legit, attacked, star, freq, freq_true, rocof;
    t.reserve(trace.size());
    for (const auto& r : trace) {
        t.push_back(r.t);
        legit.push_back(r.dp_c_legit);
        attacked.push_back(r.dp_c_attacked);
        star.push_back(r.dp_c_star);
        freq.push_back(1.0 + r.x(state::d_omega_hat));
        freq_true.push_back(1.0 + r.x(state::d_omega));
        rocof.push_back(r.x(state::omega_dot_hat));
    }

    std::vector<std::string> files;

    PlotSpec control;
    control.title = "Governor control signal";
    control.y_label = "dP_c [pu]";
    control.series = {{"legitimate", "#7f7f7f", t, legit},
                      {"attacked", "#ff7f0e", t, attacked},
                      {"applied (filtered)", "#1f77b4", t, star}};
    files.push_back(stem + "_control.svg");
    write_svg(control, files.back());

    PlotSpec frequency;
    frequency.title = "Measured frequency";
    frequency.y_label = "omega_hat [pu]";
    frequency.series = {{"measured", "#1f77b4", t, freq}, {"true", "#7f7f7f", t, freq_true}};
    frequency.thresholds = {{limits.f_over, "OF " + detail::fmt_g6(limits.f_over)},
                            {limits.f_under, "UF " + detail::fmt_g6(limits.f_under)}};
    files.push_back(stem + "_frequency.svg");
    write_svg(frequency, files.back());

    PlotSpec ro;
    ro.title = "Measured ROCOF";
    ro.y_label = "omega_dot_hat [pu/s]";
    ro.series = {{"measured", "#1f77b4", t, rocof}};
    ro.thresholds = {{rocof_threshold, "+" + detail::fmt_g6(rocof_threshold)},
                     {-rocof_threshold, "-" + detail::fmt_g6(rocof_threshold)}};
    files.push_back(stem + "_rocof.svg");
    write_svg(ro, files.back());

    return files;
}

}  // namespace lfcsafe
