// svg.hpp: deterministic, self-contained SVG line charts

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ringqed/dynamics.hpp"
#include "ringqed/error.hpp"
#include "ringqed/io/csv.hpp"
#include "ringqed/spectral.hpp"
#include "ringqed/sweep.hpp"

namespace ringqed::io {

enum class PlotKind { Populations, EnergyFlow, PhaseVsCoupling, WeightSpectrum };

inline const char* to_string(PlotKind k) {
    switch (k) {
    case PlotKind::Populations: return "populations";
    case PlotKind::EnergyFlow: return "energy_flow";
    case PlotKind::PhaseVsCoupling: return "phase_vs_coupling";
    case PlotKind::WeightSpectrum: return "weight_spectrum";
    }
    return "populations";
}

inline PlotKind parse_plot_kind(std::string_view s) {
    for (PlotKind k : {PlotKind::Populations, PlotKind::EnergyFlow, PlotKind::PhaseVsCoupling, PlotKind::WeightSpectrum})
        if (s == to_string(k))
            return k;
    throw Error(ErrorKind::UnknownKind, std::string(s));
}

struct Line {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color{"#1f77b4"};
    bool dashed{false};
};

struct Impulse {
    double x;
    double height;
};

/// Generic chart description; render_svg turns it into markup.
struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Line> lines;
    std::vector<Impulse> impulses;
    std::vector<double> markers; // dashed verticals at these x
    std::optional<std::pair<double, double>> x_range;
    std::optional<std::pair<double, double>> y_range;
};

namespace detail {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s(buf);
    return s == "-0.00" ? "0.00" : s;
}

inline std::string tick_label(double v, double step) {
    if (std::abs(v) < step * 1e-6)
        v = 0.0;
    const int digits = std::max(0, static_cast<int>(std::ceil(-std::log10(step) - 1e-9)));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", std::min(digits, 10), v);
    return buf;
}

inline std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

/// 1-2-5 tick step giving roughly `target` intervals over [lo, hi].
inline double tick_step(double lo, double hi, int target = 5) {
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    return (r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0) * mag;
}

inline std::pair<double, double> padded(double lo, double hi) {
    if (!(hi > lo)) {
        const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
        return {lo - pad, hi + pad};
    }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

} // namespace detail

inline std::string render_svg(const Chart& chart) {
    constexpr double W = 720, H = 450, L = 80, R = 20, T = 40, B = 60;
    const double pw = W - L - R, ph = H - T - B;

    double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
    auto grow = [](double& lo, double& hi, double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    };
    for (const auto& l : chart.lines)
        for (std::size_t i = 0; i < l.x.size(); ++i)
            if (std::isfinite(l.x[i]) && std::isfinite(l.y[i])) {
                grow(xlo, xhi, l.x[i]);
                grow(ylo, yhi, l.y[i]);
            }
    for (const auto& imp : chart.impulses) {
        grow(xlo, xhi, imp.x);
        grow(ylo, yhi, 0.0);
        grow(ylo, yhi, imp.height);
    }
    for (double m : chart.markers)
        grow(xlo, xhi, m);
    if (!std::isfinite(xlo))
        throw Error(ErrorKind::Precondition, "nothing to plot");
    auto [x0, x1] = chart.x_range ? *chart.x_range : detail::padded(xlo, xhi);
    auto [y0, y1] = chart.y_range ? *chart.y_range : detail::padded(ylo, yhi);

    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return T + (y1 - y) / (y1 - y0) * ph; };
    using detail::fmt;

    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"450\" viewBox=\"0 0 720 450\" "
         "font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect width=\"720\" height=\"450\" fill=\"white\"/>\n";
    s += "<text x=\"360\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" + detail::escape(chart.title) + "</text>\n";

    // ticks and grid
    const double xs = detail::tick_step(x0, x1), ys = detail::tick_step(y0, y1);
    for (double v = std::ceil(x0 / xs) * xs; v <= x1 + xs * 1e-9; v += xs) {
        const std::string X = fmt(px(v));
        s += "<line class=\"grid\" x1=\"" + X + "\" y1=\"" + fmt(T) + "\" x2=\"" + X + "\" y2=\"" + fmt(T + ph) +
             "\" stroke=\"#e0e0e0\"/>\n";
        s += "<text x=\"" + X + "\" y=\"" + fmt(T + ph + 18) + "\" text-anchor=\"middle\">" +
             detail::tick_label(v, xs) + "</text>\n";
    }
    for (double v = std::ceil(y0 / ys) * ys; v <= y1 + ys * 1e-9; v += ys) {
        const std::string Y = fmt(py(v));
        s += "<line class=\"grid\" x1=\"" + fmt(L) + "\" y1=\"" + Y + "\" x2=\"" + fmt(L + pw) + "\" y2=\"" + Y +
             "\" stroke=\"#e0e0e0\"/>\n";
        s += "<text x=\"" + fmt(L - 6) + "\" y=\"" + fmt(py(v) + 4) + "\" text-anchor=\"end\">" +
             detail::tick_label(v, ys) + "</text>\n";
    }
    s += "<rect class=\"frame\" x=\"" + fmt(L) + "\" y=\"" + fmt(T) + "\" width=\"" + fmt(pw) + "\" height=\"" +
         fmt(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
    s += "<text x=\"" + fmt(L + pw / 2) + "\" y=\"" + fmt(H - 16) + "\" text-anchor=\"middle\">" +
         detail::escape(chart.x_label) + "</text>\n";
    s += "<text x=\"18\" y=\"" + fmt(T + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         fmt(T + ph / 2) + ")\">" + detail::escape(chart.y_label) + "</text>\n";

    s += "<defs><clipPath id=\"plot\"><rect x=\"" + fmt(L) + "\" y=\"" + fmt(T) + "\" width=\"" + fmt(pw) +
         "\" height=\"" + fmt(ph) + "\"/></clipPath></defs>\n";
    s += "<g clip-path=\"url(#plot)\">\n";
    for (const auto& imp : chart.impulses) {
        const std::string X = fmt(px(imp.x));
        s += "<line class=\"impulse\" x1=\"" + X + "\" y1=\"" + fmt(py(0.0)) + "\" x2=\"" + X + "\" y2=\"" +
             fmt(py(imp.height)) + "\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
    }
    for (const auto& l : chart.lines) {
        s += "<polyline class=\"series\" fill=\"none\" stroke=\"" + l.color + "\" stroke-width=\"1.5\"";
        if (l.dashed)
            s += " stroke-dasharray=\"4,3\"";
        s += " points=\"";
        bool first = true;
        for (std::size_t i = 0; i < l.x.size(); ++i) {
            if (!std::isfinite(l.x[i]) || !std::isfinite(l.y[i]))
                continue;
            if (!first)
                s += ' ';
            s += fmt(px(l.x[i])) + ',' + fmt(py(l.y[i]));
            first = false;
        }
        s += "\"/>\n";
    }
    for (double m : chart.markers) {
        const std::string X = fmt(px(m));
        s += "<line class=\"marker\" x1=\"" + X + "\" y1=\"" + fmt(T) + "\" x2=\"" + X + "\" y2=\"" + fmt(T + ph) +
             "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";
    }
    s += "</g>\n";

    // legend: swatches are rects so the polyline count is just the data
    double ly = T + 14;
    for (const auto& l : chart.lines) {
        if (l.label.empty())
            continue;
        s += "<rect class=\"legend\" x=\"" + fmt(L + pw - 150) + "\" y=\"" + fmt(ly - 6) +
             "\" width=\"18\" height=\"3\" fill=\"" + l.color + "\"/>\n";
        s += "<text x=\"" + fmt(L + pw - 126) + "\" y=\"" + fmt(ly) + "\">" + detail::escape(l.label) + "</text>\n";
        ly += 16;
    }
    s += "</svg>\n";
    return s;
}

// ---------------------------------------------------------------------------
// Chart builders
// ---------------------------------------------------------------------------

inline std::vector<double> times_in_bypass(const ObservableSeries& series) {
    std::vector<double> x(series.times);
    for (double& t : x)
        t /= series.bypass_time;
    return x;
}

inline std::vector<double> bypass_markers(const ObservableSeries& series) {
    std::vector<double> m;
    const double end = series.times.empty() ? 0.0 : series.times.back() / series.bypass_time;
    for (double k : {1.0, 2.0})
        if (k <= end + 1e-12)
            m.push_back(k);
    return m;
}

/// |C_sigma|^2 and |C_a|^2 against t/T_b. With `reduced`, the reduced-model
/// |C_sigma|^2 is overlaid dashed.
inline Chart populations_chart(const ObservableSeries& series, const ObservableSeries* reduced = nullptr) {
    if (series.size() == 0)
        throw Error(ErrorKind::Precondition, "empty series");
    Chart c;
    c.title = "Populations";
    c.x_label = "t / T_b";
    c.y_label = "population";
    const auto x = times_in_bypass(series);
    c.lines.push_back({"|C_sigma|^2", x, series.pop_sigma, "#1f77b4", false});
    if (reduced)
        c.lines.push_back({"|C_sigma|^2 reduced", times_in_bypass(*reduced), reduced->pop_sigma, "#d62728", true});
    else
        c.lines.push_back({"|C_a|^2", x, series.pop_cavity, "#ff7f0e", false});
    c.markers = bypass_markers(series);
    c.y_range = {{-0.02, 1.02}};
    return c;
}

inline Chart energy_flow_chart(const ObservableSeries& series) {
    if (series.size() == 0)
        throw Error(ErrorKind::Precondition, "empty series");
    Chart c;
    c.title = "Energy flow";
    c.x_label = "t / T_b";
    c.y_label = "Im(C_sigma* C_a)";
    c.lines.push_back({"", times_in_bypass(series), series.energy_flow, "#2ca02c", false});
    c.markers = bypass_markers(series);
    return c;
}

inline Chart phase_vs_coupling_chart(const SweepReport& report) {
    if (report.rows.empty())
        throw Error(ErrorKind::Precondition, "empty sweep report");
    Chart c;
    c.title = "Averaged phase difference";
    c.x_label = "Omega / g";
    c.y_label = "<phase> (rad)";
    Line tb{"over T_b", {}, {}, "#1f77b4", false};
    Line tb2{"over 2 T_b", {}, {}, "#d62728", false};
    for (const auto& r : report.rows) {
        tb.x.push_back(r.omega_over_g);
        tb.y.push_back(r.avg_phase_Tb);
        tb2.x.push_back(r.omega_over_g);
        tb2.y.push_back(r.avg_phase_2Tb);
    }
    c.lines = {tb, tb2};
    c.markers = {1.0 / std::numbers::sqrt2};
    return c;
}

/// Impulses at f_l with height |h_{l1}|^2; weights at or below 1e-12 and
/// exactly degenerate frequencies are merged away.
inline Chart weight_spectrum_chart(const std::vector<WeightPoint>& points) {
    if (points.empty())
        throw Error(ErrorKind::Precondition, "empty weight distribution");
    Chart c;
    c.title = "Atom weight per eigenfrequency";
    c.x_label = "f / omega0";
    c.y_label = "|h_l1|^2";
    double lo = points.front().frequency, hi = points.back().frequency;
    for (const auto& w : points) {
        lo = std::min(lo, w.frequency);
        hi = std::max(hi, w.frequency);
        const double tol = 1e-12 * std::max(1.0, std::abs(w.frequency));
        if (!c.impulses.empty() && std::abs(c.impulses.back().x - w.frequency) <= tol)
            c.impulses.back().height += w.weight;
        else
            c.impulses.push_back({w.frequency, w.weight});
    }
    std::erase_if(c.impulses, [](const Impulse& i) { return !(i.height > 1e-12); });
    c.x_range = detail::padded(lo, hi);
    c.y_range = {{0.0, 1.05}};
    return c;
}

inline void render_plot(const ObservableSeries& series, PlotKind kind, const std::filesystem::path& path,
                        const ObservableSeries* reduced = nullptr) {
    switch (kind) {
    case PlotKind::Populations: write_file(path, render_svg(populations_chart(series, reduced))); return;
    case PlotKind::EnergyFlow: write_file(path, render_svg(energy_flow_chart(series))); return;
    default: throw Error(ErrorKind::UnknownKind, std::string(to_string(kind)) + " is not a time-series plot");
    }
}

inline void render_plot(const SweepReport& report, PlotKind kind, const std::filesystem::path& path) {
    if (kind != PlotKind::PhaseVsCoupling)
        throw Error(ErrorKind::UnknownKind, std::string(to_string(kind)) + " is not a sweep plot");
    write_file(path, render_svg(phase_vs_coupling_chart(report)));
}

inline void render_plot(const std::vector<WeightPoint>& points, PlotKind kind, const std::filesystem::path& path) {
    if (kind != PlotKind::WeightSpectrum)
        throw Error(ErrorKind::UnknownKind, std::string(to_string(kind)) + " is not a spectrum plot");
    write_file(path, render_svg(weight_spectrum_chart(points)));
}

} // namespace ringqed::io
