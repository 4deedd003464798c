#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <vector>

#include "urllc/engine.hpp"
#include "urllc/phy.hpp"

using namespace urllc;
using namespace urllc::engine;

namespace {

SimConfig short_config(double seconds = 5.0) {
    SimConfig c;
    c.duration_s = seconds;
    return c;
}

}  // namespace

TEST(HarqCombine, EqualAttemptsGainThreeDb) {
    const std::vector<double> a{7.0, 7.0, 7.0};
    EXPECT_NEAR(harq_combine(a, a, 1.0), 7.0 + 10.0 * std::log10(2.0), 1e-9);
}

TEST(HarqCombine, NegligibleFirstAttempt) {
    const std::vector<double> weak{-80.0};
    const std::vector<double> strong{2.0, 5.0};
    EXPECT_NEAR(harq_combine(weak, strong, 1.5), phy::effective_snr(strong, 1.5), 1e-6);
}

TEST(Engine, CleanChannelDeliversEverythingFirstTime) {
    SimConfig c = short_config();
    c.profile = channel::ProfileKind::Flat;
    c.speed_kmph = 0;
    c.geometry_db = 40;
    const Metrics m = run(c);
    EXPECT_GT(m.arrived, 1000);
    EXPECT_EQ(m.delivered, m.arrived);
    EXPECT_EQ(m.first_attempt_failures, 0);
    EXPECT_EQ(m.attempts, m.arrived);
    EXPECT_EQ(m.plr(), 0.0);
}

TEST(Engine, HopelessChannelLosesEverything) {
    for (PolicyKind policy : {PolicyKind::LastCqi, PolicyKind::Conservative, PolicyKind::Mcs0Best}) {
        SimConfig c = short_config(2.0);
        c.geometry_db = -40;
        c.policy = policy;
        const Metrics m = run(c);
        EXPECT_GT(m.arrived, 0);
        EXPECT_EQ(m.delivered, 0) << to_string(policy);
        EXPECT_EQ(m.plr(), 1.0);
    }
}

TEST(Engine, Deterministic) {
    const SimConfig c = short_config();
    EXPECT_EQ(run(c, 9), run(c, 9));
    EXPECT_NE(run(c, 9), run(c, 10));
}

TEST(Engine, SeedArgumentOverridesConfig) {
    SimConfig a = short_config();
    SimConfig b = a;
    a.seed = 1;
    b.seed = 2;
    EXPECT_EQ(run(a, 4), run(b, 4));
}

TEST(Engine, PacketConservation) {
    for (PolicyKind policy : {PolicyKind::LastCqi, PolicyKind::Conservative, PolicyKind::Mcs0Best}) {
        for (double g : {0.0, 10.0, 25.0}) {
            SimConfig c = short_config();
            c.policy = policy;
            c.geometry_db = g;
            c.num_ues = 2;
            const Metrics m = run(c);
            EXPECT_EQ(m.arrived, m.delivered + m.expired + m.failed + m.in_flight_at_end);
            EXPECT_GE(m.rb_usage(), 0.0);
            EXPECT_LE(m.rb_usage(), 1.0);
            EXPECT_GE(m.avg_mcs(), 0.0);
            EXPECT_LE(m.avg_mcs(), 27.0);
            if (policy == PolicyKind::Mcs0Best) EXPECT_EQ(m.mcs_sum, 0);
        }
    }
}

TEST(Engine, TransmissionTiming) {
    SimConfig c = short_config(10.0);
    c.geometry_db = 3;
    c.policy = PolicyKind::LastCqi;
    std::map<long long, std::vector<TxRecord>> by_packet;
    const Metrics m = run(c, 3, {}, [&](const TxRecord& r) { by_packet[r.packet].push_back(r); });
    long long attempts = 0;
    long long retransmitted = 0;
    for (const auto& [id, txs] : by_packet) {
        ASSERT_LE(txs.size(), 2u);
        attempts += static_cast<long long>(txs.size());
        for (const TxRecord& r : txs) {
            EXPECT_EQ(r.air_tick, r.decision_tick + c.t_sch_delay_minislots);
            EXPECT_LE(r.air_tick + 1, r.deadline_tick);
            EXPECT_EQ(r.tb_bits, phy::tb_bits(phy::McsTable::bundled()[r.mcs], r.num_rbs));
            EXPECT_GE(r.tb_bits, c.packet_bits);
        }
        EXPECT_EQ(txs[0].attempt, 1);
        if (txs.size() == 2) {
            ++retransmitted;
            EXPECT_FALSE(txs[0].success);
            EXPECT_EQ(txs[1].attempt, 2);
            EXPECT_GE(txs[1].air_tick, txs[0].air_tick + 1 + c.harq_gap_minislots);
        }
    }
    EXPECT_EQ(attempts, m.attempts);
    EXPECT_GT(retransmitted, 0);
}

TEST(Engine, StaticChannelMakesConservativeEqualLastCqi) {
    SimConfig c = short_config();
    c.profile = channel::ProfileKind::Flat;
    c.speed_kmph = 0;
    c.geometry_db = 8;
    c.policy = PolicyKind::LastCqi;
    const Metrics last = run(c);
    c.policy = PolicyKind::Conservative;
    EXPECT_EQ(run(c), last);
}

TEST(Engine, InvalidConfigThrows) {
    SimConfig c = short_config();
    c.t_cqi_ms = -1;
    EXPECT_THROW(run(c), std::invalid_argument);
}

TEST(Engine, TraceCoversEveryLag) {
    SimConfig c = short_config(1.0);
    const auto depth = static_cast<std::size_t>(c.timing().history_depth());
    long long rows = 0;
    run(c, 1, [&](const TraceRow& row) {
        ++rows;
        EXPECT_EQ(row.lag_max.size(), depth);
        EXPECT_GE(row.estimate, 0);
        EXPECT_LE(row.estimate, 15);
    });
    EXPECT_GT(rows, 0);
}
