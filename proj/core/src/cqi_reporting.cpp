#include "urllc/cqi_reporting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace urllc::cqi {

void ReportingConfig::validate() const {
    if (period.count() <= 0) throw std::invalid_argument("t_cqi_ms must be > 0");
    if (delay.count() < 0) throw std::invalid_argument("t_cqi_delay_minislots must be >= 0");
    if (subband_rbs < 1) throw std::invalid_argument("subband_rbs must be >= 1");
}

std::vector<double> subband_snr_db(std::span<const double> snr_per_rb_db, int subband_rbs) {
    const auto n = snr_per_rb_db.size();
    const auto width = static_cast<std::size_t>(subband_rbs);
    std::vector<double> out;
    out.reserve((n + width - 1) / width);
    for (std::size_t start = 0; start < n; start += width) {
        const std::size_t end = std::min(n, start + width);
        double sum = 0.0;
        for (std::size_t rb = start; rb < end; ++rb) sum += std::pow(10.0, snr_per_rb_db[rb] / 10.0);
        out.push_back(10.0 * std::log10(sum / static_cast<double>(end - start)));
    }
    return out;
}

CqiReport measure(std::span<const double> snr_per_rb_db, SimTime now, const ReportingConfig& cfg,
                  const phy::PhyTables& phy, double target_bler) {
    CqiReport report;
    report.measured_at = now;
    report.delivered_at = now + cfg.delay;
    for (double snr : subband_snr_db(snr_per_rb_db, cfg.subband_rbs)) {
        report.subband_cqi.push_back(phy::snr_to_cqi(snr, phy.cqi, phy.mcs, target_bler));
    }
    return report;
}

ReportTiming report_timing(const ReportingConfig& cfg, long long n) {
    const SimTime at = cfg.period * n;
    return {at, at + cfg.delay};
}

std::vector<ReportTiming> schedule_reports(const ReportingConfig& cfg, SimTime sim_end) {
    std::vector<ReportTiming> out;
    for (long long n = 0;; ++n) {
        ReportTiming r = report_timing(cfg, n);
        if (n > 0 && r.measure_at > sim_end) break;
        out.push_back(r);
    }
    return out;
}

}  // namespace urllc::cqi
