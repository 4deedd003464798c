#include "urllc/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <tuple>

namespace urllc::plot {

namespace {

constexpr double kPanelW = 340;
constexpr double kPanelH = 260;
constexpr double kLeft = 58;
constexpr double kRight = 12;
constexpr double kTop = 28;
constexpr double kBottom = 40;
constexpr double kLegendH = 18;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

double value_of(const RunRecord& r, Panel panel) {
    switch (panel) {
        case Panel::Plr: return r.plr;
        case Panel::AvgMcs: return r.avg_mcs;
        case Panel::RbUsage: return r.rb_usage;
    }
    return 0;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

struct Axis {
    double lo = 0;
    double hi = 1;
    bool log = false;
    double map(double v, double pixel_lo, double pixel_hi) const {
        double a = log ? std::log10(v) : v;
        double l = log ? std::log10(lo) : lo;
        double h = log ? std::log10(hi) : hi;
        if (h <= l) h = l + 1;
        return pixel_lo + (a - l) / (h - l) * (pixel_hi - pixel_lo);
    }
};

std::vector<double> linear_ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 5;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) ticks.push_back(t);
    return ticks;
}

void render_panel(std::string& svg, const Scenario& scenario, Panel panel, double x0, double y0) {
    const char* title = panel == Panel::Plr ? "PLR" : panel == Panel::AvgMcs ? "average MCS" : "RB usage";
    const double left = x0 + kLeft;
    const double right = x0 + kPanelW - kRight;
    const double top = y0 + kTop;
    const double bottom = y0 + kPanelH - kBottom;

    Axis x;
    Axis y;
    x.lo = std::numeric_limits<double>::infinity();
    x.hi = -x.lo;
    double ymin = std::numeric_limits<double>::infinity();
    double ymax = -ymin;
    double min_positive = std::numeric_limits<double>::infinity();
    for (const Series& s : scenario.series) {
        for (const SeriesPoint& p : s.points) {
            x.lo = std::min(x.lo, p.geometry_db);
            x.hi = std::max(x.hi, p.geometry_db);
            ymin = std::min(ymin, p.min);
            ymax = std::max(ymax, p.max);
            for (double v : {p.min, p.mean, p.max}) {
                if (v > 0) min_positive = std::min(min_positive, v);
            }
        }
    }
    if (x.hi <= x.lo) {
        x.lo -= 1;
        x.hi += 1;
    }
    double floor_value = 0;
    if (panel == Panel::Plr) {
        y.log = true;
        if (!std::isfinite(min_positive)) min_positive = 1e-5;
        y.lo = std::pow(10.0, std::floor(std::log10(min_positive)) - (ymin <= 0 ? 1 : 0));
        y.hi = std::pow(10.0, std::ceil(std::log10(std::max(ymax, min_positive))));
        if (y.hi <= y.lo) y.hi = y.lo * 10;
        floor_value = y.lo;
    } else {
        y.lo = 0;
        y.hi = ymax > 0 ? ymax * 1.05 : 1;
    }
    auto px = [&](double v) { return x.map(v, left, right); };
    auto py = [&](double v) { return y.map(std::max(v, floor_value), bottom, top); };

    svg += "<g>\n";
    svg += "<text x=\"" + num((left + right) / 2) + "\" y=\"" + num(y0 + 18) +
           "\" text-anchor=\"middle\" font-size=\"13\">" + title + "</text>\n";
    svg += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(right - left) + "\" height=\"" +
           num(bottom - top) + "\" fill=\"none\" stroke=\"#333\"/>\n";

    std::vector<double> yt;
    if (y.log) {
        for (double e = std::log10(y.lo); e <= std::log10(y.hi) + 1e-9; e += 1) yt.push_back(std::pow(10.0, e));
    } else {
        yt = linear_ticks(y.lo, y.hi);
    }
    for (double t : yt) {
        const double yy = py(t);
        svg += "<line x1=\"" + num(left) + "\" y1=\"" + num(yy) + "\" x2=\"" + num(right) + "\" y2=\"" + num(yy) +
               "\" stroke=\"#ddd\"/>\n";
        svg += "<text x=\"" + num(left - 4) + "\" y=\"" + num(yy + 4) +
               "\" text-anchor=\"end\" font-size=\"10\">" + tick_label(t) + "</text>\n";
    }
    for (double t : linear_ticks(x.lo, x.hi)) {
        const double xx = px(t);
        svg += "<line x1=\"" + num(xx) + "\" y1=\"" + num(bottom) + "\" x2=\"" + num(xx) + "\" y2=\"" +
               num(bottom + 4) + "\" stroke=\"#333\"/>\n";
        svg += "<text x=\"" + num(xx) + "\" y=\"" + num(bottom + 16) +
               "\" text-anchor=\"middle\" font-size=\"10\">" + tick_label(t) + "</text>\n";
    }
    svg += "<text x=\"" + num((left + right) / 2) + "\" y=\"" + num(bottom + 32) +
           "\" text-anchor=\"middle\" font-size=\"11\">geometry [dB]</text>\n";

    for (std::size_t i = 0; i < scenario.series.size(); ++i) {
        const Series& s = scenario.series[i];
        const std::string color = kPalette[i % std::size(kPalette)];
        svg += "<g class=\"series\" data-label=\"" + s.label() + "\">\n";
        std::string points;
        for (const SeriesPoint& p : s.points) points += num(px(p.geometry_db)) + "," + num(py(p.mean)) + " ";
        svg += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
        for (const SeriesPoint& p : s.points) {
            const double xx = px(p.geometry_db);
            svg += "<line x1=\"" + num(xx) + "\" y1=\"" + num(py(p.min)) + "\" x2=\"" + num(xx) + "\" y2=\"" +
                   num(py(p.max)) + "\" stroke=\"" + color + "\"/>\n";
            svg += "<circle cx=\"" + num(xx) + "\" cy=\"" + num(py(p.mean)) + "\" r=\"2.5\" fill=\"" + color +
                   "\"/>\n";
        }
        svg += "</g>\n";
    }
    svg += "</g>\n";
}

}  // namespace

std::string Series::label() const {
    std::string out(to_string(policy));
    if (policy == PolicyKind::Conservative) out += " W=" + std::to_string(wnd);
    out += " T=" + tick_label(t_cqi_ms) + "ms";
    return out;
}

std::vector<Scenario> aggregate(const std::vector<RunRecord>& records, Panel panel) {
    using SeriesKey = std::tuple<PolicyKind, int, double>;
    std::map<std::pair<std::string, double>, std::map<SeriesKey, std::map<double, std::vector<double>>>> groups;
    for (const RunRecord& r : records) {
        groups[{r.config_hash, r.speed_kmph}][{r.policy, r.wnd, r.t_cqi_ms}][r.geometry_db].push_back(
            value_of(r, panel));
    }
    std::vector<Scenario> out;
    for (const auto& [scenario_key, series_map] : groups) {
        Scenario sc{scenario_key.first, scenario_key.second, {}};
        for (const auto& [key, by_geometry] : series_map) {
            Series s{std::get<0>(key), std::get<1>(key), std::get<2>(key), {}};
            for (const auto& [g, values] : by_geometry) {
                SeriesPoint p{g, 0, values.front(), values.front(), static_cast<int>(values.size())};
                for (double v : values) {
                    p.mean += v;
                    p.min = std::min(p.min, v);
                    p.max = std::max(p.max, v);
                }
                p.mean /= static_cast<double>(values.size());
                s.points.push_back(p);
            }
            sc.series.push_back(std::move(s));
        }
        out.push_back(std::move(sc));
    }
    return out;
}

std::string render_svg(const std::vector<RunRecord>& scenario_records) {
    const Panel panels[] = {Panel::Plr, Panel::AvgMcs, Panel::RbUsage};
    std::vector<Scenario> per_panel;
    for (Panel p : panels) {
        auto scenarios = aggregate(scenario_records, p);
        if (scenarios.size() != 1) throw std::invalid_argument("render_svg expects exactly one scenario");
        per_panel.push_back(std::move(scenarios.front()));
    }
    const Scenario& first = per_panel.front();
    const double legend_h = kLegendH * static_cast<double>(first.series.size()) + 10;
    const double width = 3 * kPanelW;
    const double height = 24 + kPanelH + legend_h;

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
                      num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) +
                      "\" font-family=\"sans-serif\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"8\" y=\"16\" font-size=\"12\">scenario " + first.config_hash + ", " +
           tick_label(first.speed_kmph) + " km/h</text>\n";
    for (int i = 0; i < 3; ++i) render_panel(svg, per_panel[i], panels[i], i * kPanelW, 24);

    const double ly = 24 + kPanelH;
    for (std::size_t i = 0; i < first.series.size(); ++i) {
        const std::string color = kPalette[i % std::size(kPalette)];
        const double yy = ly + kLegendH * static_cast<double>(i) + 10;
        svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(yy) + "\" x2=\"" + num(kLeft + 24) + "\" y2=\"" +
               num(yy) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + num(kLeft + 30) + "\" y=\"" + num(yy + 4) + "\" font-size=\"11\">" +
               first.series[i].label() + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

std::vector<std::string> plot_records(const std::vector<RunRecord>& records, const std::string& out_dir) {
    if (records.empty()) throw CsvError("CSV has no data rows");
    std::map<std::pair<std::string, double>, std::vector<RunRecord>> scenarios;
    for (const RunRecord& r : records) scenarios[{r.config_hash, r.speed_kmph}].push_back(r);

    std::vector<std::pair<std::string, std::string>> rendered;
    for (const auto& [key, rows] : scenarios) {
        std::string name = key.first + "_" + tick_label(key.second) + "kmph.svg";
        rendered.emplace_back(std::move(name), render_svg(rows));
    }

    std::filesystem::create_directories(out_dir);
    std::vector<std::string> written;
    for (const auto& [name, svg] : rendered) {
        const std::string path = (std::filesystem::path(out_dir) / name).string();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + path + "'");
        out << svg;
        written.push_back(path);
    }
    return written;
}

std::vector<std::string> plot_csv(const std::string& csv_path, const std::string& out_dir) {
    return plot_records(read_csv_file(csv_path), out_dir);
}

}  // namespace urllc::plot
