#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "urllc/sim_config.hpp"

namespace urllc {

/// One CSV row.
struct RunRecord {
    std::string config_hash;
    PolicyKind policy = PolicyKind::Conservative;
    double geometry_db = 0;
    int wnd = 0;
    double t_cqi_ms = 0;
    double speed_kmph = 0;
    std::uint64_t seed = 0;
    double plr = 0;
    double avg_mcs = 0;
    double rb_usage = 0;
    long long packets = 0;

    bool operator==(const RunRecord&) const = default;
};

/// The header row doubles as the schema id; any column change is a new schema.
std::string_view csv_header();

std::string format_csv_row(const RunRecord& record);
bool record_less(const RunRecord& a, const RunRecord& b);

void write_csv(std::ostream& out, const std::vector<RunRecord>& records);

class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Throws CsvError on a missing or foreign header, a wrong column count, or
/// an unparsable field.
std::vector<RunRecord> read_csv(std::istream& in);
std::vector<RunRecord> read_csv_file(const std::string& path);

struct SweepAxes {
    std::vector<double> geometry_db;
    std::vector<PolicyKind> policies;
    std::vector<int> wnd;
    std::vector<double> t_cqi_ms;
    std::vector<std::uint64_t> seeds;

    /// Single-valued axes taken from `config`.
    static SweepAxes from_config(const SimConfig& config);
    std::size_t cells() const;
};

struct SweepOptions {
    unsigned threads = 0;  // 0: hardware concurrency
    /// Called under a lock as each cell finishes, in completion order.
    std::function<void(const RunRecord&)> on_row;
};

SimConfig cell_config(const SimConfig& base, const SweepAxes& axes, std::size_t index);
RunRecord run_cell(const SimConfig& config);

/// Runs the Cartesian product of `axes` over `base`. The result is sorted,
/// so its content is independent of thread count and completion order.
/// Throws std::invalid_argument on an empty axis or an invalid cell config;
/// a failing cell's exception is rethrown after the workers stop.
std::vector<RunRecord> sweep(const SimConfig& base, const SweepAxes& axes, const SweepOptions& options = {});

}  // namespace urllc
