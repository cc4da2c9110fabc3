#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tpass/oracle.hpp"
#include "tpass/twouser.hpp"

using namespace tpass;

namespace {

const SystemParams defaults{};
const DerivedConstants consts = derive_constants(defaults);

double grid_best_position(const Point3& ue, const SystemParams& p, int points = 10000)
{
    const oracle::GridSpec g{p.feed_x, p.feed_x + p.region_x, points};
    return oracle::grid_argmax_1d([&](double x) { return oracle::single_pa_gain(ue, x, p); }, g).x_star;
}

} // namespace

TEST(TwoUser, PositionForCentredUe)
{
    const double psi = optimal_pa_position(ue_at(50, 0), consts, defaults);
    EXPECT_NEAR(psi - 50.0, -0.08295644681088575, 1e-12);
    EXPECT_NEAR(psi, grid_best_position(ue_at(50, 0), defaults), 100.0 / 9999);
}

TEST(TwoUser, LosslessWaveguidePutsPaAboveUe)
{
    SystemParams p;
    p.attenuation_db_per_m = 0;
    const auto c = derive_constants(p);
    EXPECT_EQ(optimal_pa_position(ue_at(37.5, 12), c, p), 37.5);
}

TEST(TwoUser, FarOffAxisUeSelectsFeed)
{
    const Point3 ue = ue_at(1.0, 20.0);
    EXPECT_EQ(optimal_pa_position(ue, consts, defaults), 0.0);
    EXPECT_EQ(grid_best_position(ue, defaults), 0.0);
}

TEST(TwoUser, PositionIsGlobalGridMaximizer)
{
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> ux(0, 100), uy(-50, 50);
    const double step = 100.0 / 999;
    for (int i = 0; i < 100; ++i) {
        const Point3 ue = ue_at(ux(gen), uy(gen));
        const double psi = optimal_pa_position(ue, consts, defaults);
        const double grid = grid_best_position(ue, defaults, 1000);
        EXPECT_LE(std::abs(psi - grid), step) << ue.x << "," << ue.y;
        EXPECT_GE(oracle::single_pa_gain(ue, psi, defaults), oracle::single_pa_gain(ue, grid, defaults) * (1 - 1e-12));
    }
}

TEST(TwoUser, GainRatioAgainstChannelModule)
{
    const auto r = gain_ratios(0.5, defaults, consts);
    EXPECT_NEAR(r.ratio_best_case, 7.212810687878146e-7, 1e-18);
    // PA at the feed directly above the UE
    const PaConfig pa{{0.0}, {0.5}};
    const double a1 = effective_wireless(ue_at(0, 0), pa, consts, defaults).gain;
    const double a0 = effective_wired(pa, consts, defaults).gain;
    EXPECT_NEAR(r.ratio_best_case / (a1 / a0), 1.0, 1e-9);
}

TEST(TwoUser, ThresholdNeedsAlmostFullRadiation)
{
    const auto r = gain_ratios(0.5, defaults, consts);
    EXPECT_NEAR(1.0 - r.delta_threshold, 7.2128e-7, 1e-10);
    EXPECT_NEAR(gain_ratios(r.delta_threshold, defaults, consts).ratio_best_case, 1.0, 1e-6);
}

TEST(TwoUser, AverageOverBestRatioIsGeometric)
{
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> len(1, 500), d(0.01, 0.99);
    for (int i = 0; i < 200; ++i) {
        SystemParams p;
        p.region_x = len(gen);
        const auto c = derive_constants(p);
        const auto r = gain_ratios(d(gen), p, c);
        const double x = 2 * c.alpha * p.region_x;
        EXPECT_NEAR(r.ratio_average / r.ratio_best_case, -std::expm1(-x) / x, 1e-12);
        EXPECT_GE(r.ratio_best_case, r.ratio_average);
    }
}

TEST(TwoUser, RatiosVanishWithoutRadiation)
{
    const auto r = gain_ratios(0.0, defaults, consts);
    EXPECT_EQ(r.ratio_best_case, 0.0);
    EXPECT_EQ(r.ratio_average, 0.0);
}

TEST(TwoUser, SicOrderDecision)
{
    EXPECT_EQ(decide_sic_order({0.5, 7.2e-7, 1e-7, 0.99}), SicOrder::wired_strong);
    EXPECT_EQ(decide_sic_order({0.5, 1.0, 0.5, 0.5}), SicOrder::wired_strong);
    EXPECT_EQ(decide_sic_order({0.5, 10.0, 5.0, 0.5}), SicOrder::wireless_strong);
}

TEST(TwoUser, DeltaBoundIsGainEqualityPoint)
{
    const Point3 ue = ue_at(0, 0);
    const double top = delta_upper_bound(ue, 0.0, consts, defaults);
    EXPECT_NEAR(top, gain_ratios(0.5, defaults, consts).delta_threshold, 1e-15);
    const PaConfig pa{{0.0}, {top}};
    const double a1 = effective_wireless(ue, pa, consts, defaults).gain;
    const double a0 = effective_wired(pa, consts, defaults).gain;
    EXPECT_NEAR(a1 / a0, 1.0, 1e-9);
}

TEST(TwoUser, DeltaBoundTendsToOneForVanishingRadiatedGain)
{
    SystemParams p;
    p.carrier_hz = 3e13; // eta shrinks with frequency squared
    const auto c = derive_constants(p);
    EXPECT_GT(delta_upper_bound(ue_at(50, 10), 50.0, c, p), 1.0 - 1e-9);
}

TEST(TwoUser, SolutionSatisfiesInvariants)
{
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> ux(0, 100), uy(-50, 50);
    SystemParams p;
    p.grid_points = 2000;
    const auto c = derive_constants(p);
    for (int i = 0; i < 50; ++i) {
        const Point3 ue = ue_at(ux(gen), uy(gen));
        const auto s = solve_two_user(ue, p);
        ASSERT_TRUE(s.feasible) << s.infeasible_reason;
        EXPECT_GE(s.psi_star, 0.0);
        EXPECT_LE(s.psi_star, 100.0);
        EXPECT_GT(s.delta_star, 0.0);
        EXPECT_LE(s.delta_star, delta_upper_bound(ue, s.psi_star, c, p));
        EXPECT_GT(s.beta_star, 0.0);
        EXPECT_LE(s.beta_star, 0.5);
        EXPECT_GE(s.r_wired, p.r0_min - 1e-9);
        EXPECT_GE(s.r_wireless, p.r1_min - 1e-9);
        EXPECT_NEAR(s.p_wired + s.p_wireless, p.p_max, 1e-15);
        EXPECT_EQ(s.sic_order, SicOrder::wired_strong);
    }
}

TEST(TwoUser, DeltaIsLocalGridMaximum)
{
    SystemParams p;
    p.grid_points = 500;
    const Point3 ue = ue_at(50, 0);
    const auto s = solve_two_user(ue, p);
    ASSERT_TRUE(s.feasible);
    const double top = delta_upper_bound(ue, s.psi_star, derive_constants(p), p);
    const double step = (top - delta_epsilon) / (p.grid_points - 1);
    for (double nb : {s.delta_star - step, s.delta_star + step}) {
        if (nb < delta_epsilon || nb > top) continue;
        const auto n = solve_two_user_fixed_delta(ue, nb, p);
        if (n.feasible) {
            EXPECT_GE(s.sum_rate(), n.sum_rate() - 1e-12);
        }
    }
}

TEST(TwoUser, UnconstrainedDeltaMatchesFineOracle)
{
    SystemParams p;
    p.r0_min = 0;
    p.r1_min = 0;
    p.grid_points = 1000;
    const Point3 ue = ue_at(40, 10);
    const auto s = solve_two_user(ue, p);
    ASSERT_TRUE(s.feasible);
    const auto c = derive_constants(p);
    const double top = delta_upper_bound(ue, s.psi_star, c, p);
    const double a1u = oracle::single_pa_gain(ue, s.psi_star, p);
    const double a0u = std::norm(p.coupler_efficiency * waveguide_coeff(p.region_x, c, p));
    auto rate = [&](double d) {
        const double a1 = d * a1u, a0 = (1 - d) * a0u, b = 0.5;
        return std::log2(1 + a0 * b * p.p_max / p.noise_power) +
               std::log2(1 + a1 * (1 - b) * p.p_max / (a1 * b * p.p_max + p.noise_power));
    };
    const auto ref = oracle::grid_argmax_1d(rate, {delta_epsilon, top, 100000});
    EXPECT_LE(std::abs(s.delta_star - ref.x_star), (top - delta_epsilon) / (p.grid_points - 1) + 1e-12);
    const auto coarse = oracle::grid_argmax_1d(rate, {delta_epsilon, top, p.grid_points});
    EXPECT_NEAR(s.sum_rate(), coarse.f_star, 1e-9);
    EXPECT_LE(s.sum_rate(), ref.f_star + 1e-9);
}

TEST(TwoUser, WeightsDoNotAffectTwoUserSolution)
{
    SystemParams a, b;
    a.grid_points = b.grid_points = 500;
    b.w_wired = 0.9;
    b.w_wireless = 0.1;
    const auto sa = solve_two_user(ue_at(70, -20), a);
    const auto sb = solve_two_user(ue_at(70, -20), b);
    EXPECT_EQ(sa.delta_star, sb.delta_star);
    EXPECT_EQ(sa.beta_star, sb.beta_star);
}

TEST(TwoUser, CornerUeIsServed)
{
    const auto s = solve_two_user(ue_at(100, 50), defaults);
    ASSERT_TRUE(s.feasible);
    EXPECT_GE(s.r_wireless, 1.0 - 1e-9);
    SystemParams p;
    EXPECT_TRUE(oracle::two_user_brute_force(ue_at(100, 50), p, 60).has_value());
}

TEST(TwoUser, UnreachableWiredTargetIsInfeasible)
{
    SystemParams p;
    p.r0_min = 60;
    p.grid_points = 200;
    const auto s = solve_two_user(ue_at(30, 3), p);
    EXPECT_FALSE(s.feasible);
    EXPECT_NE(s.infeasible_reason.find("R0_min"), std::string::npos);
    EXPECT_FALSE(oracle::two_user_brute_force(ue_at(30, 3), p, 50).has_value());
}

TEST(TwoUser, OptimizedDeltaBeatsFixedBaseline)
{
    const Point3 ue = ue_at(50, 0);
    const auto opt = solve_two_user(ue, defaults);
    const auto fixed = solve_two_user_fixed_delta(ue, 0.7, defaults);
    ASSERT_TRUE(opt.feasible);
    ASSERT_TRUE(fixed.feasible);
    EXPECT_GE(opt.sum_rate(), fixed.sum_rate());
}

TEST(TwoUser, RejectsMultiuserParams)
{
    SystemParams p;
    p.num_users = 2;
    EXPECT_THROW(solve_two_user(ue_at(1, 1), p), Error);
}

TEST(TwoUser, ConventionalRateUsesAllPower)
{
    const Point3 ue = ue_at(20, 5);
    const double psi = optimal_pa_position(ue, consts, defaults);
    const double g = 0.7 * oracle::single_pa_gain(ue, psi, defaults);
    EXPECT_NEAR(conventional_pass_rate(ue, 0.7, defaults), std::log2(1 + g * 0.1 / 1e-12), 1e-12);
}
