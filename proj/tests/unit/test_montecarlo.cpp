#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "tpass/experiments.hpp"
#include "tpass/montecarlo.hpp"

using namespace tpass;

namespace {

SweepSpec make_spec(std::string parameter, std::vector<double> values, std::vector<Scheme> schemes, int trials)
{
    SweepSpec s;
    s.parameter = std::move(parameter);
    s.values = std::move(values);
    s.schemes = std::move(schemes);
    s.trials = trials;
    return s;
}

} // namespace

TEST(MonteCarlo, ScenarioIsReproducible)
{
    SystemParams p;
    p.num_users = 4;
    const auto a = seed_scenario(12, 3, p);
    const auto b = seed_scenario(12, 3, p);
    ASSERT_EQ(a.ues.size(), 4u);
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_EQ(a.ues[k].x, b.ues[k].x);
        EXPECT_EQ(a.ues[k].y, b.ues[k].y);
    }
    EXPECT_NE(seed_scenario(13, 3, p).ues[0].x, a.ues[0].x);
    EXPECT_NE(seed_scenario(12, 4, p).ues[0].x, a.ues[0].x);
}

TEST(MonteCarlo, ScenarioSizeAndRegion)
{
    SystemParams p;
    p.num_users = 6;
    p.feed_x = 5;
    p.region_x = 40;
    p.region_y = 10;
    for (int t = 0; t < 200; ++t) {
        const auto s = seed_scenario(t, 0, p);
        ASSERT_EQ(s.ues.size(), 6u);
        for (const auto& u : s.ues) {
            EXPECT_GE(u.x, 5.0);
            EXPECT_LE(u.x, 45.0);
            EXPECT_GE(u.y, -5.0);
            EXPECT_LE(u.y, 5.0);
            EXPECT_EQ(u.z, 0.0);
        }
    }
}

TEST(MonteCarlo, SmallerDrawIsPrefixOfLarger)
{
    SystemParams p4, p6;
    p4.num_users = 4;
    p6.num_users = 6;
    const auto a = seed_scenario(3, 1, p4);
    const auto b = seed_scenario(3, 1, p6);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(a.ues[k].x, b.ues[k].x);
}

TEST(MonteCarlo, DrawsAreUniform)
{
    SystemParams p;
    const int n = 10000;
    std::vector<double> xs;
    for (int t = 0; t < n; ++t) xs.push_back(seed_scenario(t, 0, p).ues[0].x / p.region_x);
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= n;
    EXPECT_NEAR(mean, 0.5, 0.005);
    std::sort(xs.begin(), xs.end());
    double ks = 0;
    for (int i = 0; i < n; ++i) ks = std::max({ks, std::abs(xs[i] - double(i) / n), std::abs(xs[i] - double(i + 1) / n)});
    EXPECT_LT(ks, 1.63 / std::sqrt(n)); // 1% critical value
}

TEST(MonteCarlo, MeanRecomputableFromRecords)
{
    SystemParams p;
    p.grid_points = 300;
    auto s = make_spec("D_x", {30, 90}, {Scheme::tpass_opt, Scheme::pass_conv}, 20);
    const auto rows = run_sweep(s, p);
    ASSERT_EQ(rows.size(), 4u);
    for (const auto& r : rows) {
        double sum = 0;
        int n = 0;
        for (const auto& t : r.records) {
            if (!t.feasible) continue;
            sum += t.wsr;
            ++n;
        }
        ASSERT_TRUE(r.stats.wsr.mean.has_value());
        EXPECT_NEAR(*r.stats.wsr.mean, sum / n, 1e-12);
        EXPECT_EQ(r.stats.trials, 20);
    }
}

TEST(MonteCarlo, InfeasibleMeanIsAbsent)
{
    SystemParams p;
    p.r0_min = 60;
    p.grid_points = 50;
    auto s = make_spec("P_max", {20}, {Scheme::tpass_opt}, 5);
    const auto rows = run_sweep(s, p);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_FALSE(rows[0].stats.wsr.mean.has_value());
    EXPECT_EQ(rows[0].stats.feasible_fraction(), 0.0);
    EXPECT_TRUE(all_infeasible(rows));
    const auto csv = sweep_table("P_max", rows).str();
    EXPECT_NE(csv.find("P_max,20,1,TPASS-opt,wsr,,,0,5"), std::string::npos) << csv;
}

TEST(MonteCarlo, ThreadCountDoesNotChangeResults)
{
    SystemParams p;
    p.num_pas = 3;
    p.bcd_grid_points = 80;
    auto s = make_spec("D_x", {50}, {Scheme::frfp, Scheme::arap, Scheme::tpass_opt}, 6);
    s.user_counts = {2, 3};
    const auto serial = sweep_table("D_x", run_sweep(s, p)).str();
    s.threads = 3;
    const auto parallel = sweep_table("D_x", run_sweep(s, p)).str();
    EXPECT_EQ(serial, parallel);
}

TEST(MonteCarlo, UnknownSweepParameter)
{
    auto s = make_spec("height", {1}, {Scheme::tpass_opt}, 1);
    try {
        run_sweep(s, SystemParams{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::config_error);
    }
}

TEST(MonteCarlo, SchemeNames)
{
    EXPECT_EQ(parse_scheme("TPASS-opt"), Scheme::tpass_opt);
    EXPECT_EQ(parse_scheme("AR-AP"), Scheme::arap);
    EXPECT_FALSE(parse_scheme("nope").has_value());
}

TEST(Experiments, GainRatioCurvesIncreaseAndBestDominates)
{
    const auto t = fig4_table(SystemParams{});
    ASSERT_EQ(t.header, (std::vector<std::string>{"delta", "D_x", "ratio_best", "ratio_avg"}));
    ASSERT_EQ(t.rows.size(), 600u);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const double best = std::stod(t.rows[i][2]), avg = std::stod(t.rows[i][3]);
        EXPECT_GE(best, avg);
        if (i % 200 != 0) {
            EXPECT_GT(best, std::stod(t.rows[i - 1][2]));
            EXPECT_GT(avg, std::stod(t.rows[i - 1][3]));
        }
    }
}

TEST(Experiments, ConvergenceTableShape)
{
    SystemParams p = preset_params("fig5");
    p.num_pas = 2;
    p.bcd_grid_points = 60;
    p.trials = 3;
    const auto rows = run_sweep(preset_sweep("fig5", p), p);
    const auto t = fig5_table(rows);
    EXPECT_EQ(t.header, (std::vector<std::string>{"iteration", "protocol", "wsr"}));
    EXPECT_FALSE(t.rows.empty());
    EXPECT_EQ(t.rows.front()[0], "0");
}

TEST(Experiments, NineSignificantDigits)
{
    EXPECT_EQ(fmt9(1.0 / 3.0), "0.333333333");
    EXPECT_EQ(fmt9(std::optional<double>{}), "");
}
