#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "urllc/sim_config.hpp"

namespace urllc {

/// Configuration problem attributable to the user: unknown key, bad value,
/// or a violated constraint. The message names the key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ConfigKey {
    std::string_view name;
    std::string_view help;
};

/// Every recognized key, in print order.
const std::vector<ConfigKey>& config_keys();

/// Sets one key from its text form. Throws ConfigError.
void set_config_value(SimConfig& config, std::string_view key, std::string_view value);
std::string get_config_value(const SimConfig& config, std::string_view key);

/// Applies "key = value" lines ('#' comments, blank lines ignored) on top of
/// `config`. Throws ConfigError with the line number on any problem.
void apply_config_text(SimConfig& config, std::string_view text);

using Override = std::pair<std::string, std::string>;

/// defaults < file < overrides, then validation. An empty path means
/// defaults only. Throws ConfigError.
SimConfig parse_config(const std::optional<std::string>& path, const std::vector<Override>& overrides = {});

/// Canonical "key = value" text; parse_config round-trips it exactly.
std::string print_config(const SimConfig& config);

/// Stable 64-bit FNV-1a over the printed config with the sweep axes
/// (geometry, policy, wnd, T_CQI, seed) neutralized, as 16 hex digits.
/// Runs that differ only along sweep axes share a hash.
std::string scenario_hash(const SimConfig& config);

}  // namespace urllc
