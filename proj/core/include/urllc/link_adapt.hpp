#pragma once

#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "urllc/cqi_reporting.hpp"
#include "urllc/sim_time.hpp"
#include "urllc/sliding_max.hpp"

namespace urllc::la {

enum class HistoryMode {
    PerSubband,  // one set of lag windows per subband
    Merged,      // one shared set; each report contributes its max over subbands
};

/// Timing that determines how outdated a CQI report is when the scheduled
/// transmission actually goes on air.
struct TimingConfig {
    SimTime sch_delay{142'800};     // scheduling decision -> air
    SimTime cqi_delay{285'600};     // measurement -> delivery at the gNB
    SimTime cqi_period{5'000'000};  // T_CQI

    /// Worst-case report age at transmission: a report that lands right after
    /// a scheduling decision is used for the whole next period.
    SimTime delta_t_max() const { return sch_delay + cqi_period + cqi_delay; }
    /// Number of past reports kept per subband: ceil(delta_t_max / T_CQI).
    int history_depth() const;
    void validate() const;
};

/// Conservative CQI estimator.
///
/// Keeps the last `history_depth()` reported CQIs per subband. On every
/// report with CQI c(n), and for every lag k whose report c(n - k) is still
/// held, the degradation c(n - k) - c(n) is pushed into the lag-k sliding
/// window of the last `window_reports` samples. The estimate for a
/// transmission that will use a report outdated by dt is
///
///     max(0, c_last - max(lag window k)),   k = ceil(dt / T_CQI)
///
/// clamped to the CQI range. Degradations are not clamped, so a channel that
/// keeps improving can push the estimate above the last report. Empty
/// windows (cold start) contribute zero.
class CqiHistory {
public:
    CqiHistory(const TimingConfig& timing, int num_subbands, int window_reports,
               HistoryMode mode = HistoryMode::PerSubband);

    /// Throws std::logic_error when deliveries or measurements go backwards
    /// or the subband count changes; both indicate an engine bug.
    void on_report(const cqi::CqiReport& report);

    bool has_report() const { return reports_seen_ > 0; }
    std::size_t reports_seen() const { return reports_seen_; }
    int num_subbands() const { return num_subbands_; }
    int depth() const { return depth_; }
    int window_reports() const { return window_; }
    HistoryMode mode() const { return mode_; }
    const TimingConfig& timing() const { return timing_; }

    /// Last reported CQI per subband. Requires has_report().
    std::span<const int> last_report() const { return last_cqi_; }
    int last_cqi(int subband) const { return last_cqi_.at(static_cast<std::size_t>(subband)); }
    SimTime last_delivery() const { return last_delivered_; }

    /// Stored CQIs of one subband, newest first.
    std::vector<int> ring(int subband) const;

    /// Lag used for a report age: ceil(dt / T_CQI).
    int lag_for(SimTime delta_t) const;
    /// Raw window maximum for (subband, lag); nullopt while the window is empty.
    std::optional<int> lag_max(int subband, int lag) const;

    /// Maximal degradation observed over a horizon of delta_t.
    /// Throws std::out_of_range unless 0 < delta_t <= delta_t_max.
    int delta_cqi(SimTime delta_t, int subband = 0) const;

    /// Age the last report will have when a decision taken at t_sch is on air.
    SimTime outdating(SimTime t_sch) const;

    /// Conservative CQI for a decision taken at t_sch.
    /// Throws std::logic_error if no report has been received.
    int estimate_cqi(int subband, SimTime t_sch) const;

private:
    struct Entry {
        SimTime measured_at;
        int cqi;
    };

    std::size_t window_index(int subband, int lag) const;

    TimingConfig timing_;
    int num_subbands_;
    int depth_;
    int window_;
    HistoryMode mode_;

    std::size_t reports_seen_ = 0;
    SimTime last_delivered_{0};
    SimTime last_measured_{0};
    std::vector<int> last_cqi_;
    std::vector<std::deque<Entry>> rings_;
    std::vector<SlidingWindowMax<int>> windows_;
};

}  // namespace urllc::la
