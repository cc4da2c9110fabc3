#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tpass/channel.hpp"

using namespace tpass;

namespace {

const SystemParams defaults{};
const DerivedConstants consts = derive_constants(defaults);

} // namespace

TEST(Channel, WaveguideCoefficientMagnitudeAndPhase)
{
    const cplx h = waveguide_coeff(100.0, consts, defaults);
    EXPECT_NEAR(std::abs(h), std::pow(10.0, -0.4), 1e-12);
    const double turns = 100.0 / consts.guided_wavelength;
    const double expected_phase = -2 * std::numbers::pi * (turns - std::floor(turns));
    EXPECT_NEAR(std::remainder(std::arg(h) - expected_phase, 2 * std::numbers::pi), 0.0, 1e-6);
}

TEST(Channel, WaveguideCoefficientSymmetricInDirection)
{
    EXPECT_EQ(waveguide_coeff(3.0, 7.5, consts, defaults), waveguide_coeff(7.5, 3.0, consts, defaults));
}

TEST(Channel, LosslessWaveguideHasUnitMagnitude)
{
    SystemParams p;
    p.attenuation_db_per_m = 0;
    const auto c = derive_constants(p);
    EXPECT_NEAR(std::abs(waveguide_coeff(73.0, c, p)), 1.0, 1e-15);
}

TEST(Channel, FreeSpaceMagnitudeFollowsInverseDistance)
{
    const Point3 ue = ue_at(10, 4);
    const Point3 pa = waveguide_point(10, defaults);
    const double r = std::sqrt(16.0 + 9.0);
    EXPECT_NEAR(std::abs(freespace_coeff(ue, pa, consts)), std::sqrt(consts.eta) / r, 1e-15);
}

TEST(Channel, CoincidentUeAndAntennaIsDegenerate)
{
    SystemParams p;
    p.height = 0;
    const auto c = derive_constants(p);
    try {
        freespace_coeff(ue_at(5, 0), waveguide_point(5, p), c);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::degenerate_geometry);
    }
}

TEST(Channel, WiredGainAtDefaults)
{
    const PaConfig none{{50.0}, {0.0}};
    // 0.84^2 * 10^(-0.8)
    EXPECT_NEAR(effective_wired(none, consts, defaults).gain, 0.11183006, 1e-8);
}

TEST(Channel, WiredGainIgnoresPositions)
{
    const PaConfig a{{10.0, 20.0}, {0.3, 0.4}};
    const PaConfig b{{60.0, 99.0}, {0.3, 0.4}};
    EXPECT_EQ(effective_wired(a, consts, defaults).gain, effective_wired(b, consts, defaults).gain);
}

TEST(Channel, SinglePaWirelessGainMatchesHandForm)
{
    const Point3 ue = ue_at(30, 5);
    const double psi = 28.0, delta = 0.3;
    const PaConfig pa{{psi}, {delta}};
    const double dv2 = 4.0 + 25.0 + 9.0;
    const double expected = consts.eta * delta * std::exp(-2 * consts.alpha * psi) / dv2;
    EXPECT_NEAR(effective_wireless(ue, pa, consts, defaults).gain / expected, 1.0, 1e-12);
}

TEST(Channel, TwoAntennasAddCoherently)
{
    const Point3 ue = ue_at(40, 2);
    const PaConfig pa{{39.0, 41.0}, {0.25, 0.5}};
    const cplx t0 = pa_path_term(ue, 39.0, consts, defaults);
    const cplx t1 = pa_path_term(ue, 41.0, consts, defaults);
    const cplx expected = t0 * std::sqrt(0.25) + t1 * std::sqrt(0.5) * std::sqrt(0.75);
    const cplx got = combine_wireless(std::vector<cplx>{t0, t1}, pa.radiation);
    EXPECT_NEAR(std::abs(got - expected), 0.0, 1e-18);
    EXPECT_NEAR(effective_wireless(ue, pa, consts, defaults).gain, std::norm(expected), 1e-24);
}

TEST(Channel, GuidedPowerIsConserved)
{
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> d(1 + trial % 8);
        for (auto& x : d) x = u(gen);
        double residual = 1.0, radiated = 0.0;
        for (double x : d) {
            radiated += x * residual;
            residual *= 1.0 - x;
        }
        const double wired = std::norm(wired_coeff(d, consts, defaults));
        const double guided_end = defaults.coupler_efficiency * defaults.coupler_efficiency *
                                  std::norm(waveguide_coeff(defaults.region_x, consts, defaults));
        EXPECT_NEAR(wired / guided_end, residual, 1e-12);
        EXPECT_NEAR(radiated + residual, 1.0, 1e-12);
    }
}

TEST(Channel, CheckPaReportsViolations)
{
    EXPECT_EQ(check_pa({{10.0, 20.0}, {0.1, 0.2}}, defaults, consts), "");
    EXPECT_EQ(check_pa({{20.0, 10.0}, {0.1, 0.2}}, defaults, consts), "positions not strictly increasing");
    EXPECT_EQ(check_pa({{10.0, 10.001}, {0.1, 0.2}}, defaults, consts), "spacing below minimum");
    EXPECT_EQ(check_pa({{-1.0}, {0.1}}, defaults, consts), "position outside waveguide");
    EXPECT_EQ(check_pa({{1.0}, {1.5}}, defaults, consts), "radiation outside [0,1]");
    EXPECT_EQ(check_pa({{}, {}}, defaults, consts), "no pinching antennas");
}
