#include "urllc/scheduler.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace urllc::sched {

namespace {

/// Per-MCS upper bound on mean(exp(-snr_lin / beta)) for the BLER target to
/// hold. Equivalent to comparing the EESM effective SNR against the MCS's
/// required SNR, without a log per (prefix, MCS) pair.
std::vector<double> eesm_bounds(const phy::McsTable& table, double target_bler) {
    const double target = target_bler * (1.0 + phy::kBlerSlack);
    std::vector<double> bounds(static_cast<std::size_t>(table.size()));
    for (int m = 0; m < table.size(); ++m) {
        const double req_db = phy::required_snr_db(table[m], target, table.model().slope_per_db);
        bounds[static_cast<std::size_t>(m)] = std::exp(-std::pow(10.0, req_db / 10.0) / table[m].beta);
    }
    return bounds;
}

std::vector<RbQuality> sorted_by_snr(std::span<const RbQuality> rbs) {
    std::vector<RbQuality> sorted(rbs.begin(), rbs.end());
    std::sort(sorted.begin(), sorted.end(), [](const RbQuality& a, const RbQuality& b) {
        if (a.snr_db != b.snr_db) return a.snr_db > b.snr_db;
        return a.rb < b.rb;
    });
    return sorted;
}

/// Walks the SNR-sorted prefixes; returns the chosen prefix length, its MCS
/// and TB. demand_bits <= 0 means "maximize TB".
TbChoice prefix_search(std::span<const RbQuality> rbs, int demand_bits, double target_bler,
                       const phy::McsTable& table, int data_res_per_rb) {
    const std::vector<RbQuality> sorted = sorted_by_snr(rbs);
    const std::vector<double> bound = eesm_bounds(table, target_bler);
    const int num_mcs = table.size();

    std::vector<double> sum(static_cast<std::size_t>(num_mcs), 0.0);
    std::vector<double> term(static_cast<std::size_t>(num_mcs), 0.0);
    double term_snr = std::numeric_limits<double>::quiet_NaN();

    std::size_t best_len = 0;
    std::optional<int> best_mcs;
    int best_tb = 0;

    for (std::size_t k = 1; k <= sorted.size(); ++k) {
        const double snr = sorted[k - 1].snr_db;
        // Sorted input puts equal SNRs next to each other; CQI-derived SNRs
        // take only a handful of values, so the exp terms are mostly reused.
        if (!(snr == term_snr)) {
            const double lin = std::pow(10.0, snr / 10.0);
            for (int m = 0; m < num_mcs; ++m) term[static_cast<std::size_t>(m)] = std::exp(-lin / table[m].beta);
            term_snr = snr;
        }
        for (int m = 0; m < num_mcs; ++m) sum[static_cast<std::size_t>(m)] += term[static_cast<std::size_t>(m)];

        std::optional<int> mcs;
        for (int m = num_mcs - 1; m >= 0; --m) {
            if (sum[static_cast<std::size_t>(m)] / static_cast<double>(k) <= bound[static_cast<std::size_t>(m)]) {
                mcs = m;
                break;
            }
        }
        const int tb = mcs ? phy::tb_bits(table[*mcs], static_cast<int>(k), data_res_per_rb) : 0;
        if (tb > best_tb) {
            best_tb = tb;
            best_len = k;
            best_mcs = mcs;
        }
        if (demand_bits > 0 && tb >= demand_bits) break;
    }

    TbChoice choice;
    choice.tb_bits = best_tb;
    choice.mcs = best_mcs;
    for (std::size_t i = 0; i < best_len; ++i) choice.rbs.push_back(sorted[i].rb);
    return choice;
}

void check_views(std::span<const UeView> ues) {
    if (ues.empty()) return;
    const auto n = ues.front().reported_cqi.size();
    for (const UeView& ue : ues) {
        if (ue.reported_cqi.size() != n || ue.estimated_cqi.size() != n) {
            throw std::invalid_argument("scheduler: every UE must carry per-RB CQIs for the same grid");
        }
    }
}

/// UE indices ordered by metric on a representative RB (EDF does not depend
/// on the RB), ties by lower id.
std::vector<std::size_t> metric_order(std::span<const UeView> ues, SimTime now, const SchedulerConfig& cfg) {
    std::vector<std::size_t> order(ues.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> score(ues.size());
    for (std::size_t i = 0; i < ues.size(); ++i) score[i] = cfg.metric(ues[i], 0, now);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (score[a] != score[b]) return score[a] > score[b];
        return ues[a].id < ues[b].id;
    });
    return order;
}

}  // namespace

double edf_metric(const UeView& ue, int /*rb*/, SimTime now) {
    const auto slack = (ue.hol_deadline - now).count();
    if (slack <= 0) return std::numeric_limits<double>::infinity();
    return 1.0 / (static_cast<double>(slack) * 1e-9);
}

TbChoice max_tb_subset(std::span<const RbQuality> rbs, double target_bler, const phy::McsTable& table,
                       int data_res_per_rb) {
    return prefix_search(rbs, 0, target_bler, table, data_res_per_rb);
}

TbChoice fit_tb_subset(std::span<const RbQuality> rbs, int demand_bits, double target_bler,
                       const phy::McsTable& table, int data_res_per_rb) {
    return prefix_search(rbs, std::max(demand_bits, 1), target_bler, table, data_res_per_rb);
}

std::vector<Allocation> schedule(std::span<const UeView> ues, SimTime now, const SchedulerConfig& cfg) {
    if (cfg.phy == nullptr) throw std::invalid_argument("scheduler: missing PHY tables");
    check_views(ues);
    if (ues.empty()) return {};

    const phy::PhyTables& phy = *cfg.phy;
    const int num_rbs = static_cast<int>(ues.front().reported_cqi.size());
    const std::size_t num_ues = ues.size();

    // Estimated CQI -> SNR lookup, one entry per CQI level.
    std::array<double, phy::kNumCqi> cqi_snr{};
    for (int c = 0; c < phy::kNumCqi; ++c) cqi_snr[c] = phy::cqi_to_snr_db(c, phy.cqi, phy.mcs, cfg.target_bler);

    struct UeState {
        std::vector<int> rbs;
        std::optional<int> mcs;
        int tb = 0;
        bool done = false;
        std::vector<char> declined;
    };
    std::vector<UeState> state(num_ues);
    std::vector<double> metric(num_ues * static_cast<std::size_t>(num_rbs));
    for (std::size_t u = 0; u < num_ues; ++u) {
        state[u].declined.assign(static_cast<std::size_t>(num_rbs), 0);
        state[u].done = ues[u].demand_bits <= 0;
        if (state[u].done) continue;
        for (int rb = 0; rb < num_rbs; ++rb) metric[u * num_rbs + rb] = cfg.metric(ues[u], rb, now);
    }

    std::vector<int> owner(static_cast<std::size_t>(num_rbs), -1);

    for (;;) {
        // Leaders of every free RB.
        struct Offer {
            int rb;
            std::size_t ue;
            int leader_cqi;
        };
        std::vector<Offer> offers;
        for (int rb = 0; rb < num_rbs; ++rb) {
            if (owner[rb] >= 0) continue;
            std::optional<std::size_t> leader;
            for (std::size_t u = 0; u < num_ues; ++u) {
                const UeState& s = state[u];
                if (s.done || s.declined[rb] || ues[u].reported_cqi[rb] <= 0) continue;
                if (!leader) {
                    leader = u;
                    continue;
                }
                const double a = metric[u * num_rbs + rb];
                const double b = metric[*leader * num_rbs + rb];
                if (a > b || (a == b && ues[u].id < ues[*leader].id)) leader = u;
            }
            if (leader) offers.push_back({rb, *leader, ues[*leader].reported_cqi[rb]});
        }
        if (offers.empty()) break;

        std::stable_sort(offers.begin(), offers.end(), [](const Offer& a, const Offer& b) {
            if (a.leader_cqi != b.leader_cqi) return a.leader_cqi > b.leader_cqi;
            return a.rb < b.rb;
        });

        std::vector<std::vector<int>> offered(num_ues);
        for (const Offer& o : offers) offered[o.ue].push_back(o.rb);

        for (std::size_t u = 0; u < num_ues; ++u) {
            if (offered[u].empty()) continue;
            UeState& s = state[u];
            std::vector<RbQuality> candidates;
            for (int rb : s.rbs) candidates.push_back({rb, cqi_snr[ues[u].estimated_cqi[rb]]});
            for (int rb : offered[u]) candidates.push_back({rb, cqi_snr[ues[u].estimated_cqi[rb]]});

            TbChoice choice = fit_tb_subset(candidates, ues[u].demand_bits, cfg.target_bler, phy.mcs,
                                            cfg.data_res_per_rb);
            std::vector<char> keep(static_cast<std::size_t>(num_rbs), 0);
            for (int rb : choice.rbs) keep[rb] = 1;
            for (const RbQuality& c : candidates) {
                if (keep[c.rb]) {
                    owner[c.rb] = static_cast<int>(u);
                } else {
                    owner[c.rb] = -1;
                    s.declined[c.rb] = 1;
                }
            }
            s.rbs = std::move(choice.rbs);
            s.mcs = choice.mcs;
            s.tb = choice.tb_bits;
            if (s.tb >= ues[u].demand_bits) s.done = true;
        }
    }

    std::vector<Allocation> allocations;
    for (std::size_t u = 0; u < num_ues; ++u) {
        UeState& s = state[u];
        if (s.rbs.empty() || !s.mcs) continue;
        std::sort(s.rbs.begin(), s.rbs.end());
        allocations.push_back({ues[u].id, std::move(s.rbs), *s.mcs, s.tb, false});
    }

    deadline_fallback(ues, allocations, now, cfg);
    return allocations;
}

void deadline_fallback(std::span<const UeView> ues, std::vector<Allocation>& allocations, SimTime now,
                       const SchedulerConfig& cfg) {
    if (cfg.phy == nullptr) throw std::invalid_argument("scheduler: missing PHY tables");
    check_views(ues);
    if (ues.empty()) return;
    const phy::PhyTables& phy = *cfg.phy;
    const int num_rbs = static_cast<int>(ues.front().reported_cqi.size());

    std::vector<char> used(static_cast<std::size_t>(num_rbs), 0);
    for (const Allocation& a : allocations) {
        for (int rb : a.rbs) used[rb] = 1;
    }

    for (std::size_t u : metric_order(ues, now, cfg)) {
        const UeView& ue = ues[u];
        if (ue.demand_bits <= 0) continue;
        auto it = std::find_if(allocations.begin(), allocations.end(),
                               [&](const Allocation& a) { return a.ue == ue.id; });
        const bool has_alloc = it != allocations.end();
        if (has_alloc && (it->tb_bits >= ue.demand_bits || it->mcs != 0)) continue;

        std::vector<RbQuality> spare;
        for (int rb = 0; rb < num_rbs; ++rb) {
            if (used[rb] || ue.reported_cqi[rb] != 0) continue;
            spare.push_back({rb, phy::cqi_to_snr_db(ue.estimated_cqi[rb], phy.cqi, phy.mcs, cfg.target_bler)});
        }
        std::sort(spare.begin(), spare.end(), [](const RbQuality& a, const RbQuality& b) {
            if (a.snr_db != b.snr_db) return a.snr_db > b.snr_db;
            return a.rb < b.rb;
        });

        const int current = has_alloc ? static_cast<int>(it->rbs.size()) : 0;
        const phy::McsEntry& mcs0 = phy.mcs[0];
        std::optional<int> extra;
        for (int j = 1; j <= static_cast<int>(spare.size()); ++j) {
            if (phy::tb_bits(mcs0, current + j, cfg.data_res_per_rb) >= ue.demand_bits) {
                extra = j;
                break;
            }
        }
        if (!extra) continue;

        Allocation grown = has_alloc ? *it : Allocation{ue.id, {}, 0, 0, false};
        for (int j = 0; j < *extra; ++j) {
            grown.rbs.push_back(spare[static_cast<std::size_t>(j)].rb);
            used[spare[static_cast<std::size_t>(j)].rb] = 1;
        }
        std::sort(grown.rbs.begin(), grown.rbs.end());
        grown.mcs = 0;
        grown.tb_bits = phy::tb_bits(mcs0, static_cast<int>(grown.rbs.size()), cfg.data_res_per_rb);
        grown.is_fallback = true;
        if (has_alloc) {
            *it = std::move(grown);
        } else {
            allocations.push_back(std::move(grown));
        }
    }
}

std::vector<Allocation> schedule_mcs0_best(std::span<const UeView> ues, SimTime now, const SchedulerConfig& cfg) {
    if (cfg.phy == nullptr) throw std::invalid_argument("scheduler: missing PHY tables");
    check_views(ues);
    if (ues.empty()) return {};
    const phy::McsEntry& mcs0 = cfg.phy->mcs[0];
    const int num_rbs = static_cast<int>(ues.front().reported_cqi.size());
    std::vector<char> used(static_cast<std::size_t>(num_rbs), 0);

    std::vector<Allocation> allocations;
    for (std::size_t u : metric_order(ues, now, cfg)) {
        const UeView& ue = ues[u];
        if (ue.demand_bits <= 0) continue;
        std::vector<int> free_rbs;
        for (int rb = 0; rb < num_rbs; ++rb) {
            if (!used[rb]) free_rbs.push_back(rb);
        }
        std::stable_sort(free_rbs.begin(), free_rbs.end(),
                         [&](int a, int b) { return ue.reported_cqi[a] > ue.reported_cqi[b]; });
        std::size_t take = free_rbs.size();
        for (std::size_t n = 1; n <= free_rbs.size(); ++n) {
            if (phy::tb_bits(mcs0, static_cast<int>(n), cfg.data_res_per_rb) >= ue.demand_bits) {
                take = n;
                break;
            }
        }
        if (take == 0) continue;
        Allocation a{ue.id, {free_rbs.begin(), free_rbs.begin() + static_cast<std::ptrdiff_t>(take)}, 0, 0, false};
        for (int rb : a.rbs) used[rb] = 1;
        std::sort(a.rbs.begin(), a.rbs.end());
        a.tb_bits = phy::tb_bits(mcs0, static_cast<int>(a.rbs.size()), cfg.data_res_per_rb);
        allocations.push_back(std::move(a));
    }
    return allocations;
}

}  // namespace urllc::sched
