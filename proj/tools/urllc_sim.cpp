#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "urllc/config_io.hpp"
#include "urllc/engine.hpp"
#include "urllc/plot.hpp"
#include "urllc/sweep.hpp"

namespace {

using urllc::ConfigError;

struct ConfigFlags {
    std::string config_file;
    std::vector<std::string> sets;
    std::map<std::string, std::string> values;  // key -> flag text
};

std::string flag_name(std::string_view key) {
    std::string out = "--";
    for (char c : key) out += c == '_' ? '-' : c;
    return out;
}

void add_config_flags(CLI::App& cmd, ConfigFlags& flags) {
    cmd.add_option("-c,--config", flags.config_file, "config file ('key = value' lines)");
    cmd.add_option("--set", flags.sets, "override any key: key=value (repeatable)");
    for (const urllc::ConfigKey& key : urllc::config_keys()) {
        cmd.add_option(flag_name(key.name), flags.values[std::string(key.name)], std::string(key.help));
    }
}

urllc::SimConfig resolve(const CLI::App& cmd, const ConfigFlags& flags) {
    std::vector<urllc::Override> overrides;
    for (const std::string& s : flags.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
        overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    for (const auto& [key, value] : flags.values) {
        if (cmd.count(flag_name(key)) > 0) overrides.emplace_back(key, value);
    }
    std::optional<std::string> path;
    if (!flags.config_file.empty()) path = flags.config_file;
    return urllc::parse_config(path, overrides);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& axis, const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(axis + ": bad number '" + s + "'");
}

/// "a,b,c" or "lo:hi:step" (inclusive).
std::vector<double> parse_numeric_axis(const std::string& axis, const std::string& text) {
    std::vector<double> out;
    for (const std::string& item : split_list(text)) {
        if (item.find(':') == std::string::npos) {
            out.push_back(parse_double(axis, item));
            continue;
        }
        std::vector<std::string> parts;
        std::stringstream in(item);
        std::string p;
        while (std::getline(in, p, ':')) parts.push_back(p);
        if (parts.size() != 3) throw ConfigError(axis + ": range must be lo:hi:step, got '" + item + "'");
        const double lo = parse_double(axis, parts[0]);
        const double hi = parse_double(axis, parts[1]);
        const double step = parse_double(axis, parts[2]);
        if (!(step > 0) || hi < lo) throw ConfigError(axis + ": empty or invalid range '" + item + "'");
        const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
        for (long long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
    }
    if (out.empty()) throw ConfigError(axis + ": no values");
    return out;
}

template <typename T>
std::vector<T> integral_axis(const std::string& axis, const std::string& text) {
    std::vector<T> out;
    for (double v : parse_numeric_axis(axis, text)) {
        if (v < 0 || v != std::floor(v)) throw ConfigError(axis + ": expected non-negative integers");
        out.push_back(static_cast<T>(v));
    }
    return out;
}

void write_records(const std::string& path, const std::vector<urllc::RunRecord>& records) {
    if (path.empty() || path == "-") {
        urllc::write_csv(std::cout, records);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    urllc::write_csv(out, records);
}

int cmd_run(const CLI::App& cmd, const ConfigFlags& flags, const std::string& out, const std::string& trace_path,
            bool print_config) {
    const urllc::SimConfig config = resolve(cmd, flags);
    if (print_config) {
        std::cout << urllc::print_config(config);
        return 0;
    }
    urllc::engine::TraceSink sink;
    std::unique_ptr<std::ofstream> trace;
    if (!trace_path.empty()) {
        trace = std::make_unique<std::ofstream>(trace_path, std::ios::binary);
        if (!*trace) throw std::runtime_error("cannot write '" + trace_path + "'");
        const auto depth = config.timing().history_depth();
        *trace << "t_s,ue,subband,last_cqi";
        for (long long k = 1; k <= depth; ++k) *trace << ",delta_lag" << k;
        *trace << ",estimate\n";
        sink = [&trace](const urllc::engine::TraceRow& row) {
            char t[32];
            std::snprintf(t, sizeof t, "%.9f", urllc::to_seconds(row.t));
            *trace << t << ',' << row.ue << ',' << row.subband << ',' << row.last_cqi;
            for (const auto& lag : row.lag_max) {
                *trace << ',';
                if (lag) *trace << *lag;
            }
            *trace << ',' << row.estimate << '\n';
        };
    }
    const urllc::engine::Metrics m = urllc::engine::run(config, config.seed, sink);
    urllc::RunRecord record;
    record.config_hash = urllc::scenario_hash(config);
    record.policy = config.policy;
    record.geometry_db = config.geometry_db;
    record.wnd = config.wnd;
    record.t_cqi_ms = config.t_cqi_ms;
    record.speed_kmph = config.speed_kmph;
    record.seed = config.seed;
    record.plr = m.plr();
    record.avg_mcs = m.avg_mcs();
    record.rb_usage = m.rb_usage();
    record.packets = m.arrived;
    write_records(out, {record});
    std::fprintf(stderr,
                 "arrived %lld delivered %lld expired %lld failed %lld attempts %lld first-attempt failures %lld\n",
                 m.arrived, m.delivered, m.expired, m.failed, m.attempts, m.first_attempt_failures);
    return 0;
}

struct SweepFlags {
    std::string geometries;
    std::string policies;
    std::string wnds;
    std::string t_cqi_periods;
    std::string seeds;
    unsigned threads = 0;
};

int cmd_sweep(const CLI::App& cmd, const ConfigFlags& flags, const SweepFlags& sf, const std::string& out) {
    const urllc::SimConfig base = resolve(cmd, flags);
    urllc::SweepAxes axes = urllc::SweepAxes::from_config(base);
    if (!sf.geometries.empty()) axes.geometry_db = parse_numeric_axis("--geometries", sf.geometries);
    if (!sf.policies.empty()) {
        axes.policies.clear();
        for (const std::string& p : split_list(sf.policies)) {
            try {
                axes.policies.push_back(urllc::parse_policy(p));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("--policies: ") + e.what());
            }
        }
        if (axes.policies.empty()) throw ConfigError("--policies: no values");
    }
    if (!sf.wnds.empty()) axes.wnd = integral_axis<int>("--wnds", sf.wnds);
    if (!sf.t_cqi_periods.empty()) axes.t_cqi_ms = parse_numeric_axis("--t-cqi-periods", sf.t_cqi_periods);
    if (!sf.seeds.empty()) axes.seeds = integral_axis<std::uint64_t>("--seeds", sf.seeds);

    try {
        for (std::size_t i = 0; i < axes.cells(); ++i) urllc::cell_config(base, axes, i).validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    const bool to_file = !out.empty() && out != "-";
    std::ofstream partial;
    const std::string partial_path = out + ".partial";
    if (to_file) {
        partial.open(partial_path, std::ios::binary);
        if (!partial) throw std::runtime_error("cannot write '" + partial_path + "'");
        partial << urllc::csv_header() << '\n' << std::flush;
    }
    urllc::SweepOptions options;
    options.threads = sf.threads;
    const std::size_t total = axes.cells();
    std::size_t done = 0;
    options.on_row = [&](const urllc::RunRecord& r) {
        ++done;
        if (to_file) partial << urllc::format_csv_row(r) << '\n' << std::flush;
        std::fprintf(stderr, "\r%zu/%zu cells", done, total);
    };
    const auto records = urllc::sweep(base, axes, options);
    std::fprintf(stderr, "\n");
    write_records(out, records);
    if (to_file) {
        partial.close();
        std::filesystem::remove(partial_path);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Downlink URLLC link-adaptation simulator"};
    app.require_subcommand(1);

    ConfigFlags run_flags;
    std::string run_out;
    std::string trace_path;
    bool print_config = false;
    CLI::App* run = app.add_subcommand("run", "simulate one configuration and print a CSV row");
    add_config_flags(*run, run_flags);
    run->add_option("-o,--out", run_out, "CSV output file (default: stdout)");
    run->add_option("--trace", trace_path, "write per-estimate CQI degradation trace CSV");
    run->add_flag("--print-config", print_config, "print the resolved config and exit");

    ConfigFlags sweep_flags;
    SweepFlags sf;
    std::string sweep_out;
    CLI::App* sweep = app.add_subcommand("sweep", "run a Cartesian product of configurations");
    add_config_flags(*sweep, sweep_flags);
    sweep->add_option("--geometries", sf.geometries, "geometry axis [dB]: list or lo:hi:step");
    sweep->add_option("--policies", sf.policies, "policy axis: comma-separated");
    sweep->add_option("--wnds", sf.wnds, "observation-window axis [CQI periods]");
    sweep->add_option("--t-cqi-periods", sf.t_cqi_periods, "CQI period axis [ms]");
    sweep->add_option("--seeds", sf.seeds, "seed axis: list or lo:hi:step");
    sweep->add_option("-j,--threads", sf.threads, "worker threads (default: available cores)");
    sweep->add_option("-o,--out", sweep_out, "CSV output file (default: stdout)");

    std::string csv_path;
    std::string out_dir = "plots";
    CLI::App* plot = app.add_subcommand("plot", "render SVG panels from a sweep CSV");
    plot->add_option("csv", csv_path, "sweep CSV")->required();
    plot->add_option("-o,--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) return cmd_run(*run, run_flags, run_out, trace_path, print_config);
        if (sweep->parsed()) return cmd_sweep(*sweep, sweep_flags, sf, sweep_out);
        for (const std::string& path : urllc::plot::plot_csv(csv_path, out_dir)) std::cout << path << '\n';
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
