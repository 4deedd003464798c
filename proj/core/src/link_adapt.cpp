#include "urllc/link_adapt.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace urllc::la {

int TimingConfig::history_depth() const {
    const auto span = delta_t_max().count();
    const auto period = cqi_period.count();
    return static_cast<int>((span + period - 1) / period);
}

void TimingConfig::validate() const {
    if (cqi_period.count() <= 0) throw std::invalid_argument("t_cqi_ms must be > 0");
    if (sch_delay.count() < 0) throw std::invalid_argument("t_sch_delay_minislots must be >= 0");
    if (cqi_delay.count() < 0) throw std::invalid_argument("t_cqi_delay_minislots must be >= 0");
    if (delta_t_max().count() <= 0) throw std::invalid_argument("delta_t_max must be > 0");
}

CqiHistory::CqiHistory(const TimingConfig& timing, int num_subbands, int window_reports, HistoryMode mode)
    : timing_(timing),
      num_subbands_(num_subbands),
      depth_(timing.history_depth()),
      window_(window_reports),
      mode_(mode) {
    timing_.validate();
    if (num_subbands < 1) throw std::invalid_argument("CqiHistory: num_subbands must be >= 1");
    if (window_reports < 1) throw std::invalid_argument("wnd must be >= 1");
    last_cqi_.assign(static_cast<std::size_t>(num_subbands), 0);
    rings_.resize(static_cast<std::size_t>(num_subbands));
    const int sets = mode == HistoryMode::Merged ? 1 : num_subbands;
    windows_.reserve(static_cast<std::size_t>(sets * depth_));
    for (int i = 0; i < sets * depth_; ++i) windows_.emplace_back(static_cast<std::size_t>(window_reports));
}

std::size_t CqiHistory::window_index(int subband, int lag) const {
    const int set = mode_ == HistoryMode::Merged ? 0 : subband;
    return static_cast<std::size_t>(set * depth_ + (lag - 1));
}

void CqiHistory::on_report(const cqi::CqiReport& report) {
    if (static_cast<int>(report.subband_cqi.size()) != num_subbands_) {
        throw std::logic_error("CQI report has " + std::to_string(report.subband_cqi.size()) +
                               " subbands, history expects " + std::to_string(num_subbands_));
    }
    if (has_report() &&
        (report.delivered_at < last_delivered_ || report.measured_at <= last_measured_)) {
        throw std::logic_error("CQI report delivered out of order");
    }

    // All degradations are computed against the history as it stood before
    // this report, then the report replaces the oldest entry.
    for (int lag = 1; lag <= depth_; ++lag) {
        const SimTime older = report.measured_at - timing_.cqi_period * lag;
        int merged = std::numeric_limits<int>::min();
        for (int sb = 0; sb < num_subbands_; ++sb) {
            const auto& ring = rings_[static_cast<std::size_t>(sb)];
            auto it = std::find_if(ring.begin(), ring.end(),
                                   [older](const Entry& e) { return e.measured_at == older; });
            if (it == ring.end()) continue;
            const int delta = it->cqi - report.subband_cqi[static_cast<std::size_t>(sb)];
            if (mode_ == HistoryMode::Merged) {
                merged = std::max(merged, delta);
            } else {
                windows_[window_index(sb, lag)].push(delta);
            }
        }
        if (mode_ == HistoryMode::Merged && merged != std::numeric_limits<int>::min()) {
            windows_[window_index(0, lag)].push(merged);
        }
    }

    for (int sb = 0; sb < num_subbands_; ++sb) {
        auto& ring = rings_[static_cast<std::size_t>(sb)];
        const int cqi = report.subband_cqi[static_cast<std::size_t>(sb)];
        ring.push_front({report.measured_at, cqi});
        while (static_cast<int>(ring.size()) > depth_) ring.pop_back();
        last_cqi_[static_cast<std::size_t>(sb)] = cqi;
    }
    last_delivered_ = report.delivered_at;
    last_measured_ = report.measured_at;
    ++reports_seen_;
}

std::vector<int> CqiHistory::ring(int subband) const {
    std::vector<int> out;
    for (const Entry& e : rings_.at(static_cast<std::size_t>(subband))) out.push_back(e.cqi);
    return out;
}

int CqiHistory::lag_for(SimTime delta_t) const {
    const auto period = timing_.cqi_period.count();
    return static_cast<int>((delta_t.count() + period - 1) / period);
}

std::optional<int> CqiHistory::lag_max(int subband, int lag) const {
    if (lag < 1 || lag > depth_) throw std::out_of_range("lag outside history depth");
    if (subband < 0 || subband >= num_subbands_) throw std::out_of_range("subband index out of range");
    return windows_[window_index(subband, lag)].max();
}

int CqiHistory::delta_cqi(SimTime delta_t, int subband) const {
    if (delta_t.count() <= 0 || delta_t > timing_.delta_t_max()) {
        throw std::out_of_range("delta_t must be in (0, delta_t_max]");
    }
    return lag_max(subband, lag_for(delta_t)).value_or(0);
}

SimTime CqiHistory::outdating(SimTime t_sch) const {
    return t_sch + timing_.sch_delay - last_delivered_ + timing_.cqi_delay;
}

int CqiHistory::estimate_cqi(int subband, SimTime t_sch) const {
    if (!has_report()) throw std::logic_error("estimate_cqi called before any CQI report");
    const SimTime dt = outdating(t_sch);
    const int degradation = dt.count() > 0 ? delta_cqi(dt, subband) : 0;
    return std::clamp(last_cqi(subband) - degradation, 0, phy::kNumCqi - 1);
}

}  // namespace urllc::la
