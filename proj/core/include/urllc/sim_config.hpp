#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "urllc/channel.hpp"
#include "urllc/cqi_reporting.hpp"
#include "urllc/link_adapt.hpp"
#include "urllc/phy.hpp"
#include "urllc/sim_time.hpp"

namespace urllc {

enum class PolicyKind {
    LastCqi,       // MCS from the last reported CQIs
    Conservative,  // degradation-corrected CQI estimates
    Mcs0Best,      // MCS 0 on the best-reported RBs
};

std::string_view to_string(PolicyKind policy);
/// Accepts last_cqi, conservative, mcs0_best. Throws std::invalid_argument.
PolicyKind parse_policy(std::string_view name);

std::string_view to_string(la::HistoryMode mode);
la::HistoryMode parse_history_mode(std::string_view name);

/// Every knob of one simulation run. Defaults follow the reference setup
/// where one exists; see README for the rest.
struct SimConfig {
    channel::GridConfig grid;

    channel::ProfileKind profile = channel::ProfileKind::Eva;
    std::string taps_file;  // empty: bundled table for `profile`
    double speed_kmph = 60.0;
    int num_sinusoids = channel::kDefaultSinusoids;
    double geometry_db = 10.0;

    PolicyKind policy = PolicyKind::Conservative;
    int wnd = 100;  // observation window, in CQI periods
    la::HistoryMode cqi_mode = la::HistoryMode::PerSubband;

    double t_cqi_ms = 5.0;
    int t_cqi_delay_minislots = 2;
    int subband_rbs = 8;
    int t_sch_delay_minislots = 1;

    double target_bler = phy::kDefaultTargetBler;
    double bler_slope = phy::kDefaultBlerSlope;
    double snr_gap_db = phy::kDefaultSnrGapDb;
    std::string mcs_table_file;  // empty: bundled table

    int packet_bits = 256;
    double interarrival_ms = 3.0;
    double delay_budget_ms = 1.0;
    int harq_gap_minislots = 3;
    int max_attempts = 2;
    int num_ues = 1;

    double duration_s = 30.0;
    std::uint64_t seed = 1;

    SimTime minislot() const { return from_seconds(grid.minislot_s()); }
    /// Whole mini-slots that fit in the delay budget.
    long long budget_minislots() const;
    cqi::ReportingConfig reporting() const;
    la::TimingConfig timing() const;
    double doppler_hz() const { return channel::doppler_hz(speed_kmph, grid.carrier_hz); }

    /// Throws std::invalid_argument whose message starts with the offending key.
    void validate() const;

    bool operator==(const SimConfig&) const = default;
};

}  // namespace urllc
