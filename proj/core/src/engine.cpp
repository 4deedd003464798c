#include "urllc/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <memory>
#include <queue>
#include <set>
#include <stdexcept>
#include <tuple>

#include "urllc/channel.hpp"
#include "urllc/cqi_reporting.hpp"
#include "urllc/link_adapt.hpp"
#include "urllc/phy.hpp"
#include "urllc/random.hpp"
#include "urllc/scheduler.hpp"

namespace urllc::engine {

double Metrics::plr() const {
    return arrived == 0 ? 0.0 : static_cast<double>(expired + failed) / static_cast<double>(arrived);
}

double Metrics::avg_mcs() const {
    return attempts == 0 ? 0.0 : static_cast<double>(mcs_sum) / static_cast<double>(attempts);
}

double Metrics::rb_usage() const {
    return rb_capacity == 0 ? 0.0 : static_cast<double>(rbs_used) / static_cast<double>(rb_capacity);
}

double harq_combine(std::span<const double> first_snrs_db, std::span<const double> second_snrs_db, double beta) {
    const double first = std::pow(10.0, phy::effective_snr(first_snrs_db, beta) / 10.0);
    const double second = std::pow(10.0, phy::effective_snr(second_snrs_db, beta) / 10.0);
    return 10.0 * std::log10(first + second);
}

namespace {

// Substream tags for seed derivation.
constexpr std::uint64_t kFadingStream = 1;
constexpr std::uint64_t kArrivalStream = 2;
constexpr std::uint64_t kOutcomeStream = 3;

struct Event {
    SimTime time;
    EventKind kind;
    std::uint64_t seq;
    int ue;
    long long arg;  // tick index, packet id, or measurement index
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        return std::tie(a.time, a.kind, a.seq) > std::tie(b.time, b.kind, b.seq);
    }
};

enum class PacketState { Queued, InFlight, Done };

struct Packet {
    int ue = 0;
    int bits = 0;
    long long deadline_tick = 0;
    int attempts = 0;
    PacketState state = PacketState::Queued;
    std::vector<double> first_snrs;  // per-RB SNR of attempt 1, for combining
};

struct UeContext {
    UeContext(const channel::FadingProcess& p, const channel::GridConfig& grid, const la::CqiHistory& h)
        : process(p), map(process, grid), history(h) {}

    channel::FadingProcess process;
    channel::RbSnrMap map;
    la::CqiHistory history;
    std::deque<cqi::CqiReport> pending_reports;
    std::vector<long long> buffer;  // queued packet ids, deadline order
    std::vector<int> reported_rb;
    std::vector<int> estimated_rb;
};

class Simulation {
public:
    Simulation(const SimConfig& cfg, std::uint64_t seed, const TraceSink& trace, const TxSink& tx)
        : cfg_(cfg),
          seed_(seed),
          trace_(trace),
          tx_(tx),
          phy_(load_phy(cfg)),
          reporting_(cfg.reporting()),
          minislot_(cfg.minislot()),
          budget_ticks_(cfg.budget_minislots()),
          sch_delay_ticks_(cfg.t_sch_delay_minislots),
          num_rbs_(cfg.grid.num_rbs),
          num_subbands_(reporting_.num_subbands(cfg.grid.num_rbs)) {
        end_tick_ = static_cast<long long>(std::floor(cfg.duration_s / cfg.grid.minislot_s() + 1e-9));
        end_time_ = minislot_ * end_tick_;
        data_res_per_rb_ = static_cast<int>(cfg.grid.rb_subcarriers * cfg.grid.minislot_symbols * 3 / 4);
        sched_cfg_ = sched::SchedulerConfig{&phy_, cfg.target_bler, sched::edf_metric, data_res_per_rb_};

        const channel::FadingProfile profile = cfg.taps_file.empty()
                                                   ? channel::bundled_profile(cfg.profile)
                                                   : channel::load_taps_file(cfg.taps_file, cfg.profile);
        const la::CqiHistory history(cfg.timing(), num_subbands_, cfg.wnd, cfg.cqi_mode);
        for (int u = 0; u < cfg.num_ues; ++u) {
            auto process = channel::make_process(profile, cfg.doppler_hz(),
                                                 substream_seed(seed, {kFadingStream, static_cast<std::uint64_t>(u)}),
                                                 cfg.num_sinusoids);
            ues_.push_back(std::make_unique<UeContext>(process, cfg.grid, history));
            ues_.back()->reported_rb.assign(static_cast<std::size_t>(num_rbs_), 0);
            ues_.back()->estimated_rb.assign(static_cast<std::size_t>(num_rbs_), 0);
        }
        snr_scratch_.resize(static_cast<std::size_t>(num_rbs_));
        metrics_.rb_capacity = end_tick_ * num_rbs_;
    }

    Metrics run() {
        interarrival_ = from_seconds(cfg_.interarrival_ms * 1e-3);
        for (int u = 0; u < cfg_.num_ues; ++u) {
            push(SimTime{0}, EventKind::CqiMeasure, u, 0);
            Rng rng(substream_seed(seed_, {kArrivalStream, static_cast<std::uint64_t>(u)}));
            const SimTime offset{static_cast<SimTime::rep>(uniform01(rng) * static_cast<double>(interarrival_.count()))};
            schedule_arrival(u, offset);
        }

        while (!queue_.empty()) {
            const Event ev = queue_.top();
            queue_.pop();
            switch (ev.kind) {
                case EventKind::CqiMeasure: on_measure(ev); break;
                case EventKind::CqiDeliver: on_deliver(ev); break;
                case EventKind::PacketArrival: on_arrival(ev); break;
                case EventKind::MinislotTick: on_tick(ev.arg); break;
                case EventKind::HarqFeedback: on_feedback(ev); break;
                case EventKind::PacketDeadline: on_deadline(ev.arg); break;
            }
        }

        for (Packet& p : packets_) {
            if (p.state == PacketState::Done) continue;
            if (p.state == PacketState::InFlight) ++metrics_.in_flight_at_end;
            ++metrics_.expired;
            p.state = PacketState::Done;
        }
        return metrics_;
    }

private:
    static phy::PhyTables load_phy(const SimConfig& cfg) {
        const phy::BlerModel model{cfg.bler_slope, cfg.snr_gap_db};
        return phy::PhyTables::from_table(cfg.mcs_table_file.empty()
                                              ? phy::McsTable::bundled(model)
                                              : phy::McsTable::load_file(cfg.mcs_table_file, model));
    }

    SimTime tick_time(long long tick) const { return minislot_ * tick; }

    void push(SimTime t, EventKind kind, int ue, long long arg) { queue_.push({t, kind, next_seq_++, ue, arg}); }

    void request_tick(long long tick) {
        if (pending_ticks_.insert(tick).second) push(tick_time(tick), EventKind::MinislotTick, -1, tick);
    }

    /// The packet can still be put on air at a decision taken on `tick`.
    bool can_send_from(const Packet& p, long long tick) const {
        return tick + sch_delay_ticks_ + 1 <= p.deadline_tick;
    }

    void schedule_arrival(int ue, SimTime at) {
        const long long arrival_tick = (at.count() + minislot_.count() - 1) / minislot_.count();
        if (arrival_tick + budget_ticks_ > end_tick_) return;
        push(at, EventKind::PacketArrival, ue, arrival_tick);
    }

    void on_measure(const Event& ev) {
        UeContext& ue = *ues_[static_cast<std::size_t>(ev.ue)];
        const cqi::ReportTiming timing = cqi::report_timing(reporting_, ev.arg);
        ue.map.snr_db(to_seconds(timing.measure_at), cfg_.geometry_db, snr_scratch_);
        ue.pending_reports.push_back(cqi::measure(snr_scratch_, timing.measure_at, reporting_, phy_, cfg_.target_bler));
        push(timing.deliver_at, EventKind::CqiDeliver, ev.ue, ev.arg);
        const cqi::ReportTiming next = cqi::report_timing(reporting_, ev.arg + 1);
        if (next.measure_at <= end_time_) push(next.measure_at, EventKind::CqiMeasure, ev.ue, ev.arg + 1);
    }

    void on_deliver(const Event& ev) {
        UeContext& ue = *ues_[static_cast<std::size_t>(ev.ue)];
        ue.history.on_report(ue.pending_reports.front());
        ue.pending_reports.pop_front();
    }

    void on_arrival(const Event& ev) {
        const long long arrival_tick = ev.arg;
        const long long id = static_cast<long long>(packets_.size());
        packets_.push_back({ev.ue, cfg_.packet_bits, arrival_tick + budget_ticks_, 0, PacketState::Queued, {}});
        ++metrics_.arrived;
        enqueue(id);
        push(tick_time(arrival_tick + budget_ticks_), EventKind::PacketDeadline, ev.ue, id);
        request_tick(arrival_tick);
        schedule_arrival(ev.ue, ev.time + interarrival_);
    }

    void enqueue(long long id) {
        auto& buffer = ues_[static_cast<std::size_t>(packets_[static_cast<std::size_t>(id)].ue)]->buffer;
        auto pos = std::upper_bound(buffer.begin(), buffer.end(), id, [this](long long a, long long b) {
            return packets_[static_cast<std::size_t>(a)].deadline_tick < packets_[static_cast<std::size_t>(b)].deadline_tick;
        });
        buffer.insert(pos, id);
    }

    void dequeue(const Packet& p, long long id) {
        auto& buffer = ues_[static_cast<std::size_t>(p.ue)]->buffer;
        buffer.erase(std::remove(buffer.begin(), buffer.end(), id), buffer.end());
    }

    std::optional<long long> head_of_line(const UeContext& ue, long long tick) const {
        for (long long id : ue.buffer) {
            if (can_send_from(packets_[static_cast<std::size_t>(id)], tick)) return id;
        }
        return std::nullopt;
    }

    void fill_cqis(int u, UeContext& ue, SimTime now) {
        const auto last = ue.history.last_report();
        for (int rb = 0; rb < num_rbs_; ++rb) ue.reported_rb[rb] = last[reporting_.subband_of(rb)];
        if (cfg_.policy != PolicyKind::Conservative) {
            ue.estimated_rb = ue.reported_rb;
            return;
        }
        std::vector<int> estimate(static_cast<std::size_t>(num_subbands_));
        for (int sb = 0; sb < num_subbands_; ++sb) {
            estimate[sb] = ue.history.estimate_cqi(sb, now);
            if (trace_) {
                TraceRow row{now, u, sb, ue.history.last_cqi(sb), {}, estimate[sb]};
                for (int lag = 1; lag <= ue.history.depth(); ++lag) row.lag_max.push_back(ue.history.lag_max(sb, lag));
                trace_(row);
            }
        }
        for (int rb = 0; rb < num_rbs_; ++rb) ue.estimated_rb[rb] = estimate[reporting_.subband_of(rb)];
    }

    void on_tick(long long tick) {
        pending_ticks_.erase(tick);
        const SimTime now = tick_time(tick);

        std::vector<sched::UeView> views;
        std::vector<long long> hol(ues_.size(), -1);
        for (int u = 0; u < cfg_.num_ues; ++u) {
            UeContext& ue = *ues_[static_cast<std::size_t>(u)];
            if (!ue.history.has_report()) continue;
            const auto head = head_of_line(ue, tick);
            if (!head) continue;
            hol[static_cast<std::size_t>(u)] = *head;
            const Packet& p = packets_[static_cast<std::size_t>(*head)];
            fill_cqis(u, ue, now);
            views.push_back({u, p.bits, tick_time(p.deadline_tick), ue.reported_rb, ue.estimated_rb});
        }

        if (!views.empty()) {
            const auto allocations = cfg_.policy == PolicyKind::Mcs0Best
                                         ? sched::schedule_mcs0_best(views, now, sched_cfg_)
                                         : sched::schedule(views, now, sched_cfg_);
            for (const sched::Allocation& a : allocations) {
                const long long id = hol[static_cast<std::size_t>(a.ue)];
                // One packet per TB, no segmentation.
                if (a.tb_bits < packets_[static_cast<std::size_t>(id)].bits) continue;
                transmit(id, a, tick);
            }
        }

        for (const auto& ue : ues_) {
            for (long long id : ue->buffer) {
                if (can_send_from(packets_[static_cast<std::size_t>(id)], tick + 1)) {
                    request_tick(tick + 1);
                    return;
                }
            }
        }
    }

    void transmit(long long id, const sched::Allocation& a, long long decision_tick) {
        const long long air_tick = decision_tick + sch_delay_ticks_;
        Packet& p = packets_[static_cast<std::size_t>(id)];
        UeContext& ue = *ues_[static_cast<std::size_t>(p.ue)];
        ue.map.snr_db(to_seconds(tick_time(air_tick)), cfg_.geometry_db, snr_scratch_);
        std::vector<double> snrs;
        snrs.reserve(a.rbs.size());
        for (int rb : a.rbs) snrs.push_back(snr_scratch_[static_cast<std::size_t>(rb)]);

        const phy::McsEntry& mcs = phy_.mcs[a.mcs];
        const double eff = p.attempts == 0 ? phy::effective_snr(snrs, mcs.beta)
                                           : harq_combine(p.first_snrs, snrs, mcs.beta);
        const double p_error = phy_.mcs.bler(a.mcs, eff);
        Rng rng(substream_seed(seed_, {kOutcomeStream, static_cast<std::uint64_t>(p.ue),
                                       static_cast<std::uint64_t>(id), static_cast<std::uint64_t>(p.attempts)}));
        const bool ok = phy::draw_outcome(rng, p_error);
        if (tx_) {
            tx_({id, p.ue, p.attempts + 1, decision_tick, air_tick, p.deadline_tick, a.mcs,
                 static_cast<int>(a.rbs.size()), a.tb_bits, eff, ok});
        }

        ++p.attempts;
        ++metrics_.attempts;
        metrics_.mcs_sum += a.mcs;
        metrics_.rbs_used += static_cast<long long>(a.rbs.size());
        dequeue(p, id);

        if (ok) {
            ++metrics_.delivered;
            p.state = PacketState::Done;
            p.first_snrs.clear();
            return;
        }
        if (p.attempts == 1) ++metrics_.first_attempt_failures;
        if (p.attempts >= cfg_.max_attempts) {
            ++metrics_.failed;
            p.state = PacketState::Done;
            p.first_snrs.clear();
            return;
        }
        p.first_snrs = std::move(snrs);
        p.state = PacketState::InFlight;
        // Processed after the tick at the same instant, so the retransmission
        // decision lands on the next tick and goes on air exactly
        // harq_gap mini-slots after attempt 1 ends.
        const long long feedback_tick = air_tick + cfg_.harq_gap_minislots - sch_delay_ticks_;
        push(tick_time(feedback_tick), EventKind::HarqFeedback, p.ue, id);
    }

    void on_feedback(const Event& ev) {
        Packet& p = packets_[static_cast<std::size_t>(ev.arg)];
        if (p.state != PacketState::InFlight) return;
        p.state = PacketState::Queued;
        enqueue(ev.arg);
        const long long tick = ev.time.count() / minislot_.count();
        if (can_send_from(p, tick + 1)) request_tick(tick + 1);
    }

    void on_deadline(long long id) {
        Packet& p = packets_[static_cast<std::size_t>(id)];
        if (p.state == PacketState::Done) return;
        if (p.state == PacketState::Queued) dequeue(p, id);
        p.state = PacketState::Done;
        p.first_snrs.clear();
        ++metrics_.expired;
    }

    const SimConfig& cfg_;
    std::uint64_t seed_;
    const TraceSink& trace_;
    const TxSink& tx_;
    phy::PhyTables phy_;
    cqi::ReportingConfig reporting_;
    SimTime minislot_;
    long long budget_ticks_;
    long long sch_delay_ticks_;
    int num_rbs_;
    int num_subbands_;
    long long end_tick_ = 0;
    SimTime end_time_{0};
    SimTime interarrival_{0};
    int data_res_per_rb_ = phy::kDataResPerRb;
    sched::SchedulerConfig sched_cfg_;

    std::vector<std::unique_ptr<UeContext>> ues_;
    std::vector<Packet> packets_;
    std::vector<double> snr_scratch_;
    std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
    std::set<long long> pending_ticks_;
    std::uint64_t next_seq_ = 0;
    Metrics metrics_;
};

}  // namespace

Metrics run(const SimConfig& config, std::uint64_t seed, const TraceSink& trace, const TxSink& tx) {
    config.validate();
    Simulation sim(config, seed, trace, tx);
    return sim.run();
}

}  // namespace urllc::engine
