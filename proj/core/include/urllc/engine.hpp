#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "urllc/sim_config.hpp"
#include "urllc/sim_time.hpp"

namespace urllc::engine {

/// Event kinds in tie-break order: at equal times, earlier kinds run first.
enum class EventKind : std::uint8_t {
    CqiMeasure,
    CqiDeliver,
    PacketArrival,
    MinislotTick,
    HarqFeedback,
    PacketDeadline,
};

struct Metrics {
    long long arrived = 0;
    long long delivered = 0;
    long long expired = 0;  // deadline passed (includes end-of-run residue)
    long long failed = 0;   // every HARQ attempt failed
    long long in_flight_at_end = 0;
    long long attempts = 0;
    long long first_attempt_failures = 0;
    long long mcs_sum = 0;
    long long rbs_used = 0;
    long long rb_capacity = 0;  // num_rbs * mini-slots in the run

    double plr() const;
    double avg_mcs() const;
    double rb_usage() const;

    bool operator==(const Metrics&) const = default;
};

/// One conservative-estimate evaluation, for the optional debug trace.
struct TraceRow {
    SimTime t{0};
    int ue = 0;
    int subband = 0;
    int last_cqi = 0;
    std::vector<std::optional<int>> lag_max;  // lags 1..K
    int estimate = 0;
};
using TraceSink = std::function<void(const TraceRow&)>;

/// One transmission attempt, reported as it is decided.
struct TxRecord {
    long long packet = 0;
    int ue = 0;
    int attempt = 1;
    long long decision_tick = 0;
    long long air_tick = 0;  // occupies [air_tick, air_tick + 1)
    long long deadline_tick = 0;
    int mcs = 0;
    int num_rbs = 0;
    int tb_bits = 0;
    double effective_snr_db = 0.0;  // after combining, for attempt 2
    bool success = false;
};
using TxSink = std::function<void(const TxRecord&)>;

/// Chase combining: per-attempt EESM effective SNRs (same beta) add in the
/// linear domain. Returns the combined effective SNR in dB.
double harq_combine(std::span<const double> first_snrs_db, std::span<const double> second_snrs_db, double beta);

/// Runs one simulation. Deterministic in (config, seed); config.seed is
/// ignored in favor of `seed`. Throws std::invalid_argument on an invalid
/// config.
Metrics run(const SimConfig& config, std::uint64_t seed, const TraceSink& trace = {}, const TxSink& tx = {});
inline Metrics run(const SimConfig& config) { return run(config, config.seed); }

}  // namespace urllc::engine
