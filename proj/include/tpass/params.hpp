#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "tpass/error.hpp"

namespace tpass {

inline constexpr double speed_of_light = 299792458.0;

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

// Power split rule applied per slot by the multiuser optimizer.
//   boundary: beta = min(0.5, beta_max), the unweighted sum-rate optimum.
//   weighted: exact maximizer of w0*R_wired + wk*R_wireless over the
//             feasible interval; equals `boundary` whenever w0 >= wk.
enum class BetaRule { boundary, weighted };

// Order of the block sweeps inside one outer BCD iteration.
enum class SweepOrder { positions_first, radiation_first };

/// Physical and optimization configuration. Powers are linear watts, rates
/// are spectral efficiencies in bit/s/Hz, lengths are meters.
struct SystemParams
{
    double carrier_hz = 28e9;
    double attenuation_db_per_m = 0.08;
    double refractive_index = 1.4;
    double coupler_efficiency = 0.84;
    double p_max = 0.1;       // 20 dBm
    double noise_power = 1e-12; // -90 dBm
    double height = 3.0;
    double region_x = 100.0;  // also the waveguide length
    double region_y = 100.0;
    double feed_x = 0.0;
    int num_pas = 1;
    int num_users = 1;
    double w_wired = 5.0 / 12.0;
    double w_wireless = 7.0 / 12.0;
    double r0_min = 1.0;
    double r1_min = 1.0;
    int grid_points = 10000;
    std::optional<double> min_spacing; // defaults to half a free-space wavelength
    int trials = 100;
    std::uint64_t seed = 1;
    double bandwidth_hz = 180e6; // metadata only

    // Multiuser optimizer settings.
    int bcd_grid_points = 400;
    double bcd_tol = 1e-6;
    int bcd_max_iter = 50;
    int refine_points = 128;
    SweepOrder sweep_order = SweepOrder::positions_first;
    bool bcd_staged = true; // start each protocol from the protocols nested inside it
    BetaRule beta_rule = BetaRule::weighted;
};

struct DerivedConstants
{
    double wavelength;        // m
    double guided_wavelength; // m
    double alpha;             // 1/m, amplitude attenuation in nepers
    double eta;               // m^2, free-space path-gain constant
    double wavenumber;        // rad/m
};

/// Returns one message per violated invariant; empty when valid.
inline std::vector<std::string> check_params(const SystemParams& p)
{
    std::vector<std::string> bad;
    auto req = [&](bool ok, const char* msg) {
        if (!ok) bad.emplace_back(msg);
    };
    req(p.carrier_hz > 0, "f_c must be > 0");
    req(p.attenuation_db_per_m >= 0, "kappa must be >= 0");
    req(p.refractive_index >= 1, "n_eff must be >= 1");
    req(p.coupler_efficiency > 0 && p.coupler_efficiency <= 1, "kappa_c must lie in (0,1]");
    req(p.p_max > 0, "P_max must be > 0");
    req(p.noise_power > 0, "sigma2 must be > 0");
    req(p.height >= 0, "d must be >= 0");
    req(p.region_x > 0, "D_x must be > 0");
    req(p.region_y >= 0, "D_y must be >= 0");
    req(p.num_pas >= 1, "N must be >= 1");
    req(p.num_users >= 1, "K must be >= 1");
    req(p.w_wired >= 0, "w0 must be >= 0");
    req(p.w_wireless >= 0, "w_k must be >= 0");
    req(p.w_wired > 0 || p.w_wireless > 0, "w0 and w_k must not both be zero");
    req(p.r0_min >= 0, "R0_min must be >= 0");
    req(p.r1_min >= 0, "R1_min must be >= 0");
    req(p.grid_points >= 2, "Q_grid must be >= 2");
    req(p.bcd_grid_points >= 2, "Q_bcd must be >= 2");
    req(p.refine_points >= 2, "Q_refine must be >= 2");
    req(p.trials >= 1, "n_trials must be >= 1");
    req(p.bcd_max_iter >= 1, "bcd_max_iter must be >= 1");
    req(p.bcd_tol >= 0, "bcd_tol must be >= 0");
    if (p.min_spacing) {
        req(*p.min_spacing >= 0, "delta_min_spacing must be >= 0");
    }
    if (p.carrier_hz > 0 && p.region_x > 0 && p.num_pas >= 1) {
        const double spacing =
            p.min_spacing.value_or(0.5 * speed_of_light / p.carrier_hz);
        req((p.num_pas - 1) * spacing <= p.region_x,
            "delta_min_spacing: (N-1)*delta_min_spacing exceeds D_x");
    }
    return bad;
}

inline void validate(const SystemParams& p)
{
    const auto bad = check_params(p);
    if (bad.empty()) return;
    std::string msg;
    for (const auto& b : bad) {
        if (!msg.empty()) msg += "; ";
        msg += b;
    }
    throw Error(ErrorKind::invalid_params, msg);
}

inline DerivedConstants derive_constants(const SystemParams& p)
{
    validate(p);
    constexpr double pi = std::numbers::pi;
    DerivedConstants c{};
    c.wavelength = speed_of_light / p.carrier_hz;
    c.guided_wavelength = c.wavelength / p.refractive_index;
    c.alpha = p.attenuation_db_per_m * std::numbers::ln10 / 20.0;
    c.eta = speed_of_light * speed_of_light / (16.0 * pi * pi * p.carrier_hz * p.carrier_hz);
    c.wavenumber = 2.0 * pi / c.wavelength;
    return c;
}

inline double min_spacing(const SystemParams& p, const DerivedConstants& c)
{
    return p.min_spacing.value_or(0.5 * c.wavelength);
}

} // namespace tpass
