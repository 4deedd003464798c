#pragma once

#include <span>
#include <vector>

#include "urllc/phy.hpp"
#include "urllc/sim_time.hpp"

namespace urllc::cqi {

struct ReportingConfig {
    SimTime period{5'000'000};   // T_CQI
    SimTime delay{285'600};      // report generation + uplink transfer
    int subband_rbs = 8;

    int num_subbands(int num_rbs) const { return (num_rbs + subband_rbs - 1) / subband_rbs; }
    int subband_of(int rb) const { return rb / subband_rbs; }
    /// Throws std::invalid_argument naming the violated constraint.
    void validate() const;
};

struct CqiReport {
    SimTime measured_at{0};
    SimTime delivered_at{0};
    std::vector<int> subband_cqi;
};

/// Linear-domain mean SNR per subband, in dB. The last subband may be short.
std::vector<double> subband_snr_db(std::span<const double> snr_per_rb_db, int subband_rbs);

CqiReport measure(std::span<const double> snr_per_rb_db, SimTime now, const ReportingConfig& cfg,
                  const phy::PhyTables& phy, double target_bler);

struct ReportTiming {
    SimTime measure_at{0};
    SimTime deliver_at{0};
};

/// The n-th measurement (n = 0, 1, ...): at n * period, delivered after delay.
ReportTiming report_timing(const ReportingConfig& cfg, long long n);

/// All measurements with measure_at <= sim_end, in order. A zero-length run
/// still gets the measurement at t = 0.
std::vector<ReportTiming> schedule_reports(const ReportingConfig& cfg, SimTime sim_end);

}  // namespace urllc::cqi
