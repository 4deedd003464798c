#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "urllc/cqi_reporting.hpp"

using namespace urllc;
using namespace urllc::cqi;
using namespace std::chrono_literals;

namespace {

const phy::PhyTables& tables() {
    static const phy::PhyTables t = phy::PhyTables::bundled();
    return t;
}

}  // namespace

TEST(Reporting, SubbandLayout) {
    ReportingConfig cfg;
    EXPECT_EQ(cfg.num_subbands(100), 13);
    EXPECT_EQ(cfg.subband_of(0), 0);
    EXPECT_EQ(cfg.subband_of(99), 12);
    cfg.period = SimTime{0};
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Measure, UniformInputGivesUniformCqi) {
    const std::vector<double> snr(100, 10.0);
    const CqiReport r = measure(snr, 5ms, ReportingConfig{}, tables(), 0.1);
    ASSERT_EQ(r.subband_cqi.size(), 13u);
    const int expected = phy::snr_to_cqi(10.0, tables().cqi, tables().mcs, 0.1);
    for (int c : r.subband_cqi) EXPECT_EQ(c, expected);
    EXPECT_EQ(r.measured_at, SimTime{5ms});
    EXPECT_EQ(r.delivered_at, SimTime{5ms} + ReportingConfig{}.delay);
}

TEST(Measure, LinearAverage) {
    const std::vector<double> two{0.0, 10.0};
    const auto avg = subband_snr_db(two, 8);
    ASSERT_EQ(avg.size(), 1u);
    EXPECT_NEAR(avg[0], 10 * std::log10(5.5), 1e-12);
    EXPECT_NEAR(avg[0], 7.40, 5e-3);
}

TEST(Measure, ShortLastSubbandAveragesItsOwnRbs) {
    std::vector<double> snr(10, 0.0);
    snr[8] = 10.0;
    snr[9] = 10.0;
    const auto avg = subband_snr_db(snr, 8);
    ASSERT_EQ(avg.size(), 2u);
    EXPECT_NEAR(avg[0], 0.0, 1e-12);
    EXPECT_NEAR(avg[1], 10.0, 1e-12);
}

TEST(Measure, LinearMeanDominatesDbMean) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> snr(5, 8);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v(8);
        for (double& x : v) x = snr(rng);
        const double db_mean = std::accumulate(v.begin(), v.end(), 0.0) / 8;
        EXPECT_GE(subband_snr_db(v, 8)[0], db_mean - 1e-12);
    }
}

TEST(Measure, DeepFadeIsCqiZero) {
    std::vector<double> snr(100, 15.0);
    for (int rb = 16; rb < 24; ++rb) snr[static_cast<std::size_t>(rb)] = -30.0;
    const CqiReport r = measure(snr, SimTime{0}, ReportingConfig{}, tables(), 0.1);
    EXPECT_EQ(r.subband_cqi[2], 0);
    EXPECT_GT(r.subband_cqi[1], 0);
}

TEST(Schedule, FiveMsOverTwentyMs) {
    ReportingConfig cfg;
    const auto reports = schedule_reports(cfg, 20ms);
    ASSERT_EQ(reports.size(), 5u);
    for (std::size_t i = 0; i < reports.size(); ++i) {
        EXPECT_EQ(reports[i].measure_at, SimTime{5ms} * static_cast<long long>(i));
        EXPECT_GE(reports[i].deliver_at, reports[i].measure_at);
    }
}

TEST(Schedule, DeliveryLagsByTwoMinislots) {
    ReportingConfig cfg;
    cfg.delay = SimTime{142'800} * 2;
    EXPECT_NEAR(to_seconds(report_timing(cfg, 3).deliver_at - report_timing(cfg, 3).measure_at), 0.2856e-3, 1e-15);
}

TEST(Schedule, ZeroLengthRunStillMeasuresOnce) {
    const auto reports = schedule_reports(ReportingConfig{}, SimTime{0});
    ASSERT_EQ(reports.size(), 1u);
    EXPECT_EQ(reports[0].measure_at, SimTime{0});
}
