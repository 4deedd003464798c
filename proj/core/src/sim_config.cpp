#include "urllc/sim_config.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace urllc {

std::string_view to_string(PolicyKind policy) {
    switch (policy) {
        case PolicyKind::LastCqi: return "last_cqi";
        case PolicyKind::Conservative: return "conservative";
        case PolicyKind::Mcs0Best: return "mcs0_best";
    }
    return "?";
}

PolicyKind parse_policy(std::string_view name) {
    if (name == "last_cqi") return PolicyKind::LastCqi;
    if (name == "conservative") return PolicyKind::Conservative;
    if (name == "mcs0_best") return PolicyKind::Mcs0Best;
    throw std::invalid_argument("unknown policy '" + std::string(name) +
                                "' (expected last_cqi, conservative or mcs0_best)");
}

std::string_view to_string(la::HistoryMode mode) {
    return mode == la::HistoryMode::Merged ? "merged" : "per_subband";
}

la::HistoryMode parse_history_mode(std::string_view name) {
    if (name == "per_subband") return la::HistoryMode::PerSubband;
    if (name == "merged") return la::HistoryMode::Merged;
    throw std::invalid_argument("unknown cqi_mode '" + std::string(name) + "' (expected per_subband or merged)");
}

long long SimConfig::budget_minislots() const {
    return static_cast<long long>(std::floor(delay_budget_ms * 1e-3 / grid.minislot_s() + 1e-9));
}

cqi::ReportingConfig SimConfig::reporting() const {
    return {from_seconds(t_cqi_ms * 1e-3), minislot() * t_cqi_delay_minislots, subband_rbs};
}

la::TimingConfig SimConfig::timing() const {
    return {minislot() * t_sch_delay_minislots, minislot() * t_cqi_delay_minislots, from_seconds(t_cqi_ms * 1e-3)};
}

void SimConfig::validate() const {
    auto require = [](bool ok, const char* message) {
        if (!ok) throw std::invalid_argument(message);
    };
    grid.validate();
    require(speed_kmph >= 0, "speed_kmph must be >= 0");
    require(num_sinusoids >= 1, "num_sinusoids must be >= 1");
    require(std::isfinite(geometry_db), "geometry_db must be finite");
    require(wnd >= 1, "wnd must be >= 1");
    require(t_cqi_ms > 0 && from_seconds(t_cqi_ms * 1e-3).count() > 0, "t_cqi_ms must be > 0");
    require(t_cqi_delay_minislots >= 0, "t_cqi_delay_minislots must be >= 0");
    require(subband_rbs >= 1, "subband_rbs must be >= 1");
    require(t_sch_delay_minislots >= 0, "t_sch_delay_minislots must be >= 0");
    require(target_bler > 0 && target_bler < 1, "target_bler must be in (0, 1)");
    require(bler_slope > 0, "bler_slope must be > 0");
    require(std::isfinite(snr_gap_db), "snr_gap_db must be finite");
    require(packet_bits >= 1, "packet_bits must be >= 1");
    require(interarrival_ms > 0, "interarrival_ms must be > 0");
    require(budget_minislots() >= 1, "delay_budget_ms must cover at least one mini-slot");
    require(harq_gap_minislots >= 0, "harq_gap_minislots must be >= 0");
    require(max_attempts >= 1 && max_attempts <= 2, "max_attempts must be 1 or 2");
    require(num_ues >= 1, "num_ues must be >= 1");
    require(duration_s >= 0, "duration_s must be >= 0");
}

}  // namespace urllc
