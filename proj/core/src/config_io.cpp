#include "urllc/config_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace urllc {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T value{};
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        throw ConfigError(std::string(key) + ": expected " +
                          (std::is_floating_point_v<T> ? "a number" : "an integer") + ", got '" +
                          std::string(text) + "'");
    }
    return value;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

struct KeyHandler {
    ConfigKey key;
    std::function<std::string(const SimConfig&)> get;
    std::function<void(SimConfig&, std::string_view)> set;
};

template <typename T>
KeyHandler number_key(std::string_view name, std::string_view help, T SimConfig::*field) {
    return {{name, help},
            [field](const SimConfig& c) {
                if constexpr (std::is_floating_point_v<T>) {
                    return format_double(c.*field);
                } else {
                    return std::to_string(c.*field);
                }
            },
            [field, name](SimConfig& c, std::string_view v) { c.*field = parse_number<T>(name, v); }};
}

template <typename T>
KeyHandler grid_key(std::string_view name, std::string_view help, T channel::GridConfig::*field) {
    return {{name, help},
            [field](const SimConfig& c) {
                if constexpr (std::is_floating_point_v<T>) {
                    return format_double(c.grid.*field);
                } else {
                    return std::to_string(c.grid.*field);
                }
            },
            [field, name](SimConfig& c, std::string_view v) { c.grid.*field = parse_number<T>(name, v); }};
}

KeyHandler string_key(std::string_view name, std::string_view help, std::string SimConfig::*field) {
    return {{name, help},
            [field](const SimConfig& c) { return c.*field; },
            [field](SimConfig& c, std::string_view v) { c.*field = std::string(v); }};
}

template <typename Parse>
void set_enum(std::string_view key, std::string_view value, Parse parse) {
    try {
        parse(value);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string(key) + ": " + e.what());
    }
}

const std::vector<KeyHandler>& handlers() {
    static const std::vector<KeyHandler> table = [] {
        std::vector<KeyHandler> t;
        t.push_back(grid_key("carrier_hz", "carrier frequency [Hz]", &channel::GridConfig::carrier_hz));
        t.push_back(grid_key("bandwidth_hz", "channel bandwidth [Hz]", &channel::GridConfig::bandwidth_hz));
        t.push_back(grid_key("subcarrier_hz", "subcarrier spacing [Hz]", &channel::GridConfig::subcarrier_hz));
        t.push_back(grid_key("rb_subcarriers", "subcarriers per RB", &channel::GridConfig::rb_subcarriers));
        t.push_back(grid_key("num_rbs", "RBs in the band", &channel::GridConfig::num_rbs));
        t.push_back({{"symbol_us", "OFDM symbol duration [us]"},
                     [](const SimConfig& c) { return format_double(c.grid.symbol_s * 1e6); },
                     [](SimConfig& c, std::string_view v) { c.grid.symbol_s = parse_number<double>("symbol_us", v) * 1e-6; }});
        t.push_back(grid_key("minislot_symbols", "OFDM symbols per mini-slot", &channel::GridConfig::minislot_symbols));
        t.push_back({{"profile", "fading profile: flat | epa | eva"},
                     [](const SimConfig& c) { return std::string(channel::to_string(c.profile)); },
                     [](SimConfig& c, std::string_view v) {
                         set_enum("profile", v, [&](std::string_view s) { c.profile = channel::parse_profile_kind(s); });
                     }});
        t.push_back(string_key("taps_file", "custom tap file (empty: bundled profile)", &SimConfig::taps_file));
        t.push_back(number_key("speed_kmph", "UE speed [km/h]", &SimConfig::speed_kmph));
        t.push_back(number_key("num_sinusoids", "sinusoids per fading tap", &SimConfig::num_sinusoids));
        t.push_back(number_key("geometry_db", "geometry factor [dB]", &SimConfig::geometry_db));
        t.push_back({{"policy", "link adaptation: last_cqi | conservative | mcs0_best"},
                     [](const SimConfig& c) { return std::string(to_string(c.policy)); },
                     [](SimConfig& c, std::string_view v) {
                         set_enum("policy", v, [&](std::string_view s) { c.policy = parse_policy(s); });
                     }});
        t.push_back(number_key("wnd", "observation window [CQI periods]", &SimConfig::wnd));
        t.push_back({{"cqi_mode", "degradation statistics: per_subband | merged"},
                     [](const SimConfig& c) { return std::string(to_string(c.cqi_mode)); },
                     [](SimConfig& c, std::string_view v) {
                         set_enum("cqi_mode", v, [&](std::string_view s) { c.cqi_mode = parse_history_mode(s); });
                     }});
        t.push_back(number_key("t_cqi_ms", "CQI reporting period [ms]", &SimConfig::t_cqi_ms));
        t.push_back(number_key("t_cqi_delay_minislots", "CQI report delay [mini-slots]", &SimConfig::t_cqi_delay_minislots));
        t.push_back(number_key("subband_rbs", "RBs per CQI subband", &SimConfig::subband_rbs));
        t.push_back(number_key("t_sch_delay_minislots", "scheduling delay [mini-slots]", &SimConfig::t_sch_delay_minislots));
        t.push_back(number_key("target_bler", "BLER target for MCS selection", &SimConfig::target_bler));
        t.push_back(number_key("bler_slope", "BLER curve slope [1/dB]", &SimConfig::bler_slope));
        t.push_back(number_key("snr_gap_db", "gap to Shannon for the 50% BLER point [dB]", &SimConfig::snr_gap_db));
        t.push_back(string_key("mcs_table_file", "custom MCS table (empty: bundled)", &SimConfig::mcs_table_file));
        t.push_back(number_key("packet_bits", "packet size [bits]", &SimConfig::packet_bits));
        t.push_back(number_key("interarrival_ms", "packet inter-arrival time [ms]", &SimConfig::interarrival_ms));
        t.push_back(number_key("delay_budget_ms", "packet delay budget [ms]", &SimConfig::delay_budget_ms));
        t.push_back(number_key("harq_gap_minislots", "attempt-1 end to attempt-2 start [mini-slots]", &SimConfig::harq_gap_minislots));
        t.push_back(number_key("max_attempts", "transmissions per packet (1 or 2)", &SimConfig::max_attempts));
        t.push_back(number_key("num_ues", "number of UEs", &SimConfig::num_ues));
        t.push_back(number_key("duration_s", "simulated time [s]", &SimConfig::duration_s));
        t.push_back(number_key("seed", "RNG seed", &SimConfig::seed));
        return t;
    }();
    return table;
}

const KeyHandler& handler(std::string_view key) {
    const auto& table = handlers();
    auto it = std::find_if(table.begin(), table.end(), [key](const KeyHandler& h) { return h.key.name == key; });
    if (it == table.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
    return *it;
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = [] {
        std::vector<ConfigKey> k;
        for (const KeyHandler& h : handlers()) k.push_back(h.key);
        return k;
    }();
    return keys;
}

void set_config_value(SimConfig& config, std::string_view key, std::string_view value) {
    handler(key).set(config, trim(value));
}

std::string get_config_value(const SimConfig& config, std::string_view key) { return handler(key).get(config); }

void apply_config_text(SimConfig& config, std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        try {
            set_config_value(config, trim(view.substr(0, eq)), trim(view.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

SimConfig parse_config(const std::optional<std::string>& path, const std::vector<Override>& overrides) {
    SimConfig config;
    if (path && !path->empty()) {
        std::ifstream file(*path);
        if (!file) throw ConfigError("cannot open config file '" + *path + "'");
        std::stringstream buffer;
        buffer << file.rdbuf();
        apply_config_text(config, buffer.str());
    }
    for (const auto& [key, value] : overrides) set_config_value(config, key, value);
    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return config;
}

std::string print_config(const SimConfig& config) {
    std::string out;
    for (const KeyHandler& h : handlers()) {
        out += h.key.name;
        out += " = ";
        out += h.get(config);
        out += '\n';
    }
    return out;
}

std::string scenario_hash(const SimConfig& config) {
    SimConfig neutral = config;
    const SimConfig defaults;
    neutral.geometry_db = defaults.geometry_db;
    neutral.policy = defaults.policy;
    neutral.wnd = defaults.wnd;
    neutral.t_cqi_ms = defaults.t_cqi_ms;
    neutral.seed = defaults.seed;
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : print_config(neutral)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace urllc
