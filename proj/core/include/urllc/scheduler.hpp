#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "urllc/phy.hpp"
#include "urllc/sim_time.hpp"

namespace urllc::sched {

/// What the scheduler sees of one UE in one mini-slot. CQIs are per RB (an
/// RB inherits its subband's value).
struct UeView {
    int id = 0;
    int demand_bits = 0;     // head-of-line packet; 0 = nothing to send
    SimTime hol_deadline{0};
    std::span<const int> reported_cqi;
    std::span<const int> estimated_cqi;
};

struct Allocation {
    int ue = 0;
    std::vector<int> rbs;  // ascending
    int mcs = 0;
    int tb_bits = 0;
    bool is_fallback = false;
};

/// Larger is better. Evaluated once per (UE, RB) per mini-slot.
using Metric = std::function<double(const UeView& ue, int rb, SimTime now)>;

/// Earliest head-of-line deadline first: 1 / (deadline - now).
double edf_metric(const UeView& ue, int rb, SimTime now);

struct RbQuality {
    int rb = 0;
    double snr_db = 0.0;
};

struct TbChoice {
    std::vector<int> rbs;  // in SNR-descending order
    std::optional<int> mcs;
    int tb_bits = 0;
};

/// Maximal-TB prefix search: sort RBs by SNR (descending, ties by RB index),
/// pick the MCS for each prefix from its EESM effective SNR, and return the
/// prefix with the largest TB (ties to the shortest). Empty when no prefix
/// supports any MCS.
TbChoice max_tb_subset(std::span<const RbQuality> rbs, double target_bler, const phy::McsTable& table,
                       int data_res_per_rb = phy::kDataResPerRb);

/// Same walk, but stops at the shortest prefix whose TB covers demand_bits;
/// falls back to the maximal-TB prefix when none does.
TbChoice fit_tb_subset(std::span<const RbQuality> rbs, int demand_bits, double target_bler,
                       const phy::McsTable& table, int data_res_per_rb = phy::kDataResPerRb);

struct SchedulerConfig {
    const phy::PhyTables* phy = nullptr;
    double target_bler = phy::kDefaultTargetBler;
    Metric metric = edf_metric;
    int data_res_per_rb = phy::kDataResPerRb;
};

/// Leader-based RB allocation followed by the deadline fallback.
///
/// Each round: every free RB goes to its leader (best metric among unsatisfied
/// UEs that did not report CQI 0 on it and have not already turned it down),
/// RBs are visited in descending order of the leader's reported CQI, and each
/// UE then keeps the best-fitting prefix of its RBs ranked by estimated CQI.
/// Returned RBs are turned down for that UE and re-offered to others. Rounds
/// stop when no free RB has a leader.
///
/// Allocations whose TB is below the UE's demand are still returned; the
/// caller decides whether a partial TB is useful.
std::vector<Allocation> schedule(std::span<const UeView> ues, SimTime now, const SchedulerConfig& cfg);

/// For every UE whose head-of-line packet is not covered by its allocation and
/// whose MCS is 0 (or that got nothing), try MCS 0 over its RBs plus the
/// fewest free RBs it reported CQI 0 on (best estimated SNR first). UEs are
/// served in metric order. Infeasible UEs are left unchanged.
void deadline_fallback(std::span<const UeView> ues, std::vector<Allocation>& allocations, SimTime now,
                       const SchedulerConfig& cfg);

/// Reference policy: MCS 0 on the best-reported RBs, as few as cover the
/// demand, or every free RB when that is impossible.
std::vector<Allocation> schedule_mcs0_best(std::span<const UeView> ues, SimTime now, const SchedulerConfig& cfg);

}  // namespace urllc::sched
