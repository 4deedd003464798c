#pragma once

#include <string>
#include <vector>

#include "urllc/sweep.hpp"

namespace urllc::plot {

struct SeriesPoint {
    double geometry_db = 0;
    double mean = 0;
    double min = 0;
    double max = 0;
    int samples = 0;
};

enum class Panel { Plr, AvgMcs, RbUsage };

struct Series {
    PolicyKind policy = PolicyKind::Conservative;
    int wnd = 0;
    double t_cqi_ms = 0;
    std::vector<SeriesPoint> points;  // ascending geometry
    std::string label() const;
};

/// All rows of one scenario (config_hash, speed).
struct Scenario {
    std::string config_hash;
    double speed_kmph = 0;
    std::vector<Series> series;
};

/// Groups rows into scenarios and series and aggregates seeds for `panel`.
std::vector<Scenario> aggregate(const std::vector<RunRecord>& records, Panel panel);

/// One SVG per scenario, three panels side by side: PLR (log y), average
/// MCS, RB usage, each against geometry. Returns the files written. Throws
/// CsvError on a malformed or empty CSV before touching the output directory.
std::vector<std::string> plot_csv(const std::string& csv_path, const std::string& out_dir);
std::vector<std::string> plot_records(const std::vector<RunRecord>& records, const std::string& out_dir);

std::string render_svg(const std::vector<RunRecord>& scenario_records);

}  // namespace urllc::plot
