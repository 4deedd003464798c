#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "urllc/config_io.hpp"
#include "urllc/engine.hpp"
#include "urllc/sweep.hpp"

using namespace urllc;

namespace {

SimConfig tiny() {
    SimConfig c;
    c.duration_s = 0.3;
    return c;
}

std::string csv_of(const std::vector<RunRecord>& rows) {
    std::ostringstream out;
    write_csv(out, rows);
    return out.str();
}

}  // namespace

TEST(Sweep, CellCountAndCoverage) {
    SweepAxes axes = SweepAxes::from_config(tiny());
    for (int g = 0; g <= 28; g += 2) axes.geometry_db.push_back(g);
    axes.geometry_db.erase(axes.geometry_db.begin());  // drop the config's own value
    axes.policies = {PolicyKind::LastCqi, PolicyKind::Conservative, PolicyKind::Mcs0Best};
    axes.seeds = {1, 2, 3, 4, 5};
    ASSERT_EQ(axes.geometry_db.size(), 15u);
    EXPECT_EQ(axes.cells(), 225u);
    const auto rows = sweep(tiny(), axes, {.threads = 2, .on_row = {}});
    ASSERT_EQ(rows.size(), 225u);
    EXPECT_TRUE(std::is_sorted(rows.begin(), rows.end(), record_less));
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_FALSE(rows[i - 1] == rows[i]);
}

TEST(Sweep, SingleCellMatchesRun) {
    SimConfig c = tiny();
    c.seed = 7;
    const auto rows = sweep(c, SweepAxes::from_config(c));
    ASSERT_EQ(rows.size(), 1u);
    const engine::Metrics m = engine::run(c, 7);
    EXPECT_EQ(rows[0].plr, m.plr());
    EXPECT_EQ(rows[0].avg_mcs, m.avg_mcs());
    EXPECT_EQ(rows[0].rb_usage, m.rb_usage());
    EXPECT_EQ(rows[0].packets, m.arrived);
    EXPECT_EQ(rows[0].config_hash, scenario_hash(c));
    EXPECT_EQ(rows[0], run_cell(c));
}

TEST(Sweep, IndependentOfThreadCount) {
    SweepAxes axes = SweepAxes::from_config(tiny());
    axes.geometry_db = {0, 10};
    axes.wnd = {10, 100};
    axes.seeds = {1, 2, 3};
    std::vector<RunRecord> seen;
    SweepOptions one{.threads = 1, .on_row = [&](const RunRecord& r) { seen.push_back(r); }};
    const std::string a = csv_of(sweep(tiny(), axes, one));
    EXPECT_EQ(seen.size(), axes.cells());
    EXPECT_EQ(a, csv_of(sweep(tiny(), axes, {.threads = 4, .on_row = {}})));
    EXPECT_EQ(a, csv_of(sweep(tiny(), axes, {.threads = 1, .on_row = {}})));
}

TEST(Sweep, RejectsEmptyAxisAndInvalidCell) {
    SweepAxes axes = SweepAxes::from_config(tiny());
    axes.seeds.clear();
    EXPECT_THROW(sweep(tiny(), axes), std::invalid_argument);
    axes = SweepAxes::from_config(tiny());
    axes.t_cqi_ms = {5, -1};
    EXPECT_THROW(sweep(tiny(), axes), std::invalid_argument);
}

TEST(Sweep, CellOrderVariesSeedFastest) {
    SweepAxes axes = SweepAxes::from_config(tiny());
    axes.geometry_db = {0, 5};
    axes.seeds = {11, 12};
    EXPECT_EQ(cell_config(tiny(), axes, 0).seed, 11u);
    EXPECT_EQ(cell_config(tiny(), axes, 1).seed, 12u);
    EXPECT_EQ(cell_config(tiny(), axes, 2).geometry_db, 5.0);
    EXPECT_EQ(cell_config(tiny(), axes, 2).seed, 11u);
}

TEST(Csv, RoundTrip) {
    RunRecord r{"0123456789abcdef", PolicyKind::Mcs0Best, -3.5, 100, 2.5, 60, 42, 1.0 / 3.0, 12.75, 0.001, 99};
    RunRecord s = r;
    s.policy = PolicyKind::LastCqi;
    s.plr = 0;
    const std::string text = csv_of({s, r});
    EXPECT_EQ(text.substr(0, text.find('\n')), csv_header());
    std::istringstream in(text);
    const auto back = read_csv(in);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0], s);
    EXPECT_EQ(back[1].config_hash, r.config_hash);
    EXPECT_EQ(back[1].policy, r.policy);
    EXPECT_NEAR(back[1].plr, r.plr, 1e-9);
    EXPECT_EQ(back[1].packets, r.packets);
}

TEST(Csv, MalformedInput) {
    const std::string header(csv_header());
    for (const std::string text : {std::string(), std::string("a,b,c\n"),
                                   header + "\nx,conservative,1,2,3,4,5,6,7,8\n",
                                   header + "\nx,conservative,1,2,3,4,5,6,7,8,nine\n",
                                   header + "\nx,greedy,1,2,3,4,5,6,7,8,9\n"}) {
        std::istringstream in(text);
        EXPECT_THROW(read_csv(in), CsvError) << text;
    }
    EXPECT_THROW(read_csv_file(std::string(URLLC_TEST_TMP) + "/no_such.csv"), CsvError);
}
