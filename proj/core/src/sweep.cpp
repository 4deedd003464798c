#include "urllc/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "urllc/config_io.hpp"
#include "urllc/engine.hpp"

namespace urllc {

namespace {

constexpr std::string_view kHeader =
    "config_hash,policy,geometry_db,wnd,t_cqi_ms,speed_kmph,seed,plr,avg_mcs,rb_usage,packets";
constexpr std::size_t kColumns = 11;

std::string g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename T>
T field(std::string_view text, int line_no, std::string_view column) {
    T value{};
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc{} || ptr != end) {
        throw CsvError("line " + std::to_string(line_no) + ": bad " + std::string(column) + " '" +
                       std::string(text) + "'");
    }
    return value;
}

auto sort_key(const RunRecord& r) {
    return std::tie(r.config_hash, r.speed_kmph, r.policy, r.wnd, r.t_cqi_ms, r.geometry_db, r.seed);
}

}  // namespace

std::string_view csv_header() { return kHeader; }

std::string format_csv_row(const RunRecord& r) {
    std::string out;
    out += r.config_hash;
    out += ',';
    out += to_string(r.policy);
    out += ',' + g9(r.geometry_db);
    out += ',' + std::to_string(r.wnd);
    out += ',' + g9(r.t_cqi_ms);
    out += ',' + g9(r.speed_kmph);
    out += ',' + std::to_string(r.seed);
    out += ',' + g9(r.plr);
    out += ',' + g9(r.avg_mcs);
    out += ',' + g9(r.rb_usage);
    out += ',' + std::to_string(r.packets);
    return out;
}

bool record_less(const RunRecord& a, const RunRecord& b) { return sort_key(a) < sort_key(b); }

void write_csv(std::ostream& out, const std::vector<RunRecord>& records) {
    out << kHeader << '\n';
    for (const RunRecord& r : records) out << format_csv_row(r) << '\n';
}

std::vector<RunRecord> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw CsvError("empty CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader) throw CsvError("unrecognized CSV header '" + line + "'");
    std::vector<RunRecord> records;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cols = split(line);
        if (cols.size() != kColumns) {
            throw CsvError("line " + std::to_string(line_no) + ": expected " + std::to_string(kColumns) +
                           " columns, got " + std::to_string(cols.size()));
        }
        RunRecord r;
        r.config_hash = std::string(cols[0]);
        if (r.config_hash.empty()) throw CsvError("line " + std::to_string(line_no) + ": empty config_hash");
        try {
            r.policy = parse_policy(cols[1]);
        } catch (const std::invalid_argument& e) {
            throw CsvError("line " + std::to_string(line_no) + ": " + e.what());
        }
        r.geometry_db = field<double>(cols[2], line_no, "geometry_db");
        r.wnd = field<int>(cols[3], line_no, "wnd");
        r.t_cqi_ms = field<double>(cols[4], line_no, "t_cqi_ms");
        r.speed_kmph = field<double>(cols[5], line_no, "speed_kmph");
        r.seed = field<std::uint64_t>(cols[6], line_no, "seed");
        r.plr = field<double>(cols[7], line_no, "plr");
        r.avg_mcs = field<double>(cols[8], line_no, "avg_mcs");
        r.rb_usage = field<double>(cols[9], line_no, "rb_usage");
        r.packets = field<long long>(cols[10], line_no, "packets");
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<RunRecord> read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open '" + path + "'");
    return read_csv(in);
}

SweepAxes SweepAxes::from_config(const SimConfig& config) {
    return {{config.geometry_db}, {config.policy}, {config.wnd}, {config.t_cqi_ms}, {config.seed}};
}

std::size_t SweepAxes::cells() const {
    return geometry_db.size() * policies.size() * wnd.size() * t_cqi_ms.size() * seeds.size();
}

SimConfig cell_config(const SimConfig& base, const SweepAxes& axes, std::size_t index) {
    SimConfig c = base;
    c.seed = axes.seeds[index % axes.seeds.size()];
    index /= axes.seeds.size();
    c.t_cqi_ms = axes.t_cqi_ms[index % axes.t_cqi_ms.size()];
    index /= axes.t_cqi_ms.size();
    c.wnd = axes.wnd[index % axes.wnd.size()];
    index /= axes.wnd.size();
    c.policy = axes.policies[index % axes.policies.size()];
    index /= axes.policies.size();
    c.geometry_db = axes.geometry_db[index];
    return c;
}

RunRecord run_cell(const SimConfig& config) {
    const engine::Metrics m = engine::run(config, config.seed);
    RunRecord r;
    r.config_hash = scenario_hash(config);
    r.policy = config.policy;
    r.geometry_db = config.geometry_db;
    r.wnd = config.wnd;
    r.t_cqi_ms = config.t_cqi_ms;
    r.speed_kmph = config.speed_kmph;
    r.seed = config.seed;
    r.plr = m.plr();
    r.avg_mcs = m.avg_mcs();
    r.rb_usage = m.rb_usage();
    r.packets = m.arrived;
    return r;
}

std::vector<RunRecord> sweep(const SimConfig& base, const SweepAxes& axes, const SweepOptions& options) {
    if (axes.cells() == 0) throw std::invalid_argument("sweep: every axis needs at least one value");
    const std::size_t cells = axes.cells();
    for (std::size_t i = 0; i < cells; ++i) cell_config(base, axes, i).validate();

    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, cells));

    std::vector<RunRecord> records(cells);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::mutex mutex;
    std::exception_ptr error;

    auto worker = [&] {
        while (!stop.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells) return;
            try {
                RunRecord r = run_cell(cell_config(base, axes, i));
                std::lock_guard lock(mutex);
                if (options.on_row) options.on_row(r);
                records[i] = std::move(r);
            } catch (...) {
                std::lock_guard lock(mutex);
                if (!error) error = std::current_exception();
                stop = true;
            }
        }
    };

    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
    std::sort(records.begin(), records.end(), record_less);
    return records;
}

}  // namespace urllc
