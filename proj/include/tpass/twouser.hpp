#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tpass/channel.hpp"
#include "tpass/params.hpp"
#include "tpass/rates.hpp"

namespace tpass {

/// Left end of the radiation grid; zero radiation leaves beta_max undefined.
inline constexpr double delta_epsilon = 1e-9;

struct TwoUserSolution
{
    double psi_star = 0;
    double delta_star = 0;
    double beta_star = 0;
    double p_wired = 0;
    double p_wireless = 0;
    double r_wired = 0;
    double r_wireless = 0;
    SicOrder sic_order = SicOrder::wired_strong;
    bool feasible = false;
    std::string infeasible_reason;

    double sum_rate() const { return r_wired + r_wireless; }
};

struct GainRatioReport
{
    double delta = 0;
    double ratio_best_case = 0; // A1*/A0, PA directly above the UE at the feed
    double ratio_average = 0;   // UE uniform along the waveguide
    double delta_threshold = 0; // smallest delta with ratio_best_case >= 1
};

/// Single-PA position maximizing the radiated gain exp(-2 alpha D_i) / D_v^2.
inline double optimal_pa_position(const Point3& ue, const DerivedConstants& c, const SystemParams& p)
{
    const double alpha = c.alpha;
    const double lo = p.feed_x, hi = p.feed_x + p.region_x;
    const double dz = ue.z - p.height;
    const double cy = ue.y * ue.y + dz * dz;

    double psi;
    if (alpha == 0.0) {
        psi = ue.x;
    } else if (4.0 * alpha * alpha * cy >= 1.0) {
        psi = p.feed_x; // no stationary point, gain falls along the whole guide
    } else {
        // (-1 + s) / (2 alpha) rewritten without cancellation for small alpha
        const double s = std::sqrt(1.0 - 4.0 * alpha * alpha * cy);
        psi = ue.x - 2.0 * alpha * cy / (1.0 + s);
    }
    psi = std::clamp(psi, lo, hi);

    auto gain = [&](double x) { return std::exp(-2.0 * alpha * (x - lo)) / ((x - ue.x) * (x - ue.x) + cy); };
    const double g = gain(psi);
    if (gain(lo) > g) psi = lo;
    if (gain(hi) > std::max(g, gain(lo))) psi = hi;
    return psi;
}

inline GainRatioReport gain_ratios(double delta, const SystemParams& p, const DerivedConstants& c)
{
    constexpr double pi = std::numbers::pi;
    const double x = 2.0 * c.alpha * p.region_x;
    const double geom = (c.wavelength / p.height) * (c.wavelength / p.height) /
                        (16.0 * pi * pi * p.coupler_efficiency * p.coupler_efficiency);
    const double insertion = geom * std::exp(x);
    const double spread = x > 0 ? std::expm1(x) / x : 1.0;
    const double odds = delta / (1.0 - delta);

    GainRatioReport r;
    r.delta = delta;
    r.ratio_best_case = odds * insertion;
    r.ratio_average = odds * geom * spread;
    r.delta_threshold = 1.0 / (1.0 + insertion);
    return r;
}

/// Ties go to the wired user.
inline SicOrder decide_sic_order(const GainRatioReport& report)
{
    return report.ratio_best_case <= 1.0 ? SicOrder::wired_strong : SicOrder::wireless_strong;
}

/// Largest radiation coefficient keeping the wired UE at least as strong as
/// the wireless UE served by a PA at `psi`.
inline double delta_upper_bound(const Point3& ue, double psi, const DerivedConstants& c, const SystemParams& p)
{
    const double d_i = psi - p.feed_x;
    const double d_v = distance(ue, waveguide_point(psi, p));
    const double kc2 = p.coupler_efficiency * p.coupler_efficiency;
    const double q = c.eta * std::exp(2.0 * c.alpha * (p.region_x - d_i)) / (d_v * d_v * kc2);
    return 1.0 / (1.0 + q);
}

struct DeltaChoice
{
    double delta = 0;
    double beta = 0;
    double sum_rate = 0;
    bool feasible = false;
    std::string infeasible_reason;
};

namespace detail {

// Gains of the single-PA link at unit radiation, split from delta.
struct UnitGains
{
    double wireless; // |h_o h_i|^2
    double wired;    // kappa_c^2 |h_i(D_x)|^2
};

inline UnitGains unit_gains(const Point3& ue, double psi, const DerivedConstants& c, const SystemParams& p)
{
    return {std::norm(pa_path_term(ue, psi, c, p)), std::norm(wired_coeff({}, c, p))};
}

} // namespace detail

/// Line search over a grid on [epsilon, delta_diamond] maximizing the sum rate
/// with the closed-form split at each point. Ties keep the smaller delta.
inline DeltaChoice optimize_delta(const Point3& ue, double psi, const SystemParams& p, const DerivedConstants& c)
{
    const double top = delta_upper_bound(ue, psi, c, p);
    const auto unit = detail::unit_gains(ue, psi, c, p);
    const int q = p.grid_points;
    const double lo = std::min(delta_epsilon, top);

    DeltaChoice best;
    double best_f = -HUGE_VAL;
    int wired_bound = 0, wireless_bound = 0;
    for (int i = 0; i < q; ++i) {
        const double delta = lo + (top - lo) * i / (q - 1);
        const double a1 = delta * unit.wireless;
        const double a0 = (1.0 - delta) * unit.wired;
        if (a0 < a1) continue;
        const auto bounds = beta_bounds(a0, a1, p);
        if (!bounds.feasible()) {
            if (bounds.lower() > beta_cap) ++wired_bound;
            else ++wireless_bound;
            continue;
        }
        const double beta = bounds.upper();
        const double z = a1 * p.p_max / p.noise_power;
        const double m = a0 * p.p_max / p.noise_power;
        const double f = (z + 1.0) * (1.0 + m * beta) / (z * beta + 1.0);
        if (f > best_f) {
            best_f = f;
            best.delta = delta;
            best.beta = beta;
            best.feasible = true;
        }
    }
    if (best.feasible) {
        best.sum_rate = std::log2(best_f);
    } else {
        best.infeasible_reason = wired_bound >= wireless_bound
            ? "wired QoS R0_min unattainable for every delta on the grid"
            : "wireless QoS R1_min unattainable for every delta on the grid";
    }
    return best;
}

namespace detail {

inline void require_two_user(const SystemParams& p)
{
    if (p.num_pas != 1 || p.num_users != 1) {
        throw Error(ErrorKind::invalid_params, "two-user solver requires N=1 and K=1");
    }
}

inline TwoUserSolution finish_two_user(double psi, double delta, const Point3& ue, const SystemParams& p,
                                       const DerivedConstants& c)
{
    TwoUserSolution s;
    s.psi_star = psi;
    s.delta_star = delta;
    s.sic_order = decide_sic_order(gain_ratios(delta, p, c));
    const auto unit = unit_gains(ue, psi, c, p);
    const double a1 = delta * unit.wireless;
    const double a0 = (1.0 - delta) * unit.wired;
    if (a0 < a1) {
        s.infeasible_reason = "SIC: wireless gain exceeds wired gain";
        return s;
    }
    const auto beta = optimal_beta(a0, a1, p);
    if (!beta) {
        const auto b = beta_bounds(a0, a1, p);
        s.infeasible_reason = b.lower() > beta_cap ? "wired QoS R0_min" : "wireless QoS R1_min";
        return s;
    }
    const auto r = slot_rates(a0, a1, *beta, p);
    s.beta_star = *beta;
    s.p_wired = r.p_wired;
    s.p_wireless = r.p_wireless;
    s.r_wired = r.r_wired;
    s.r_wireless = r.r_wireless;
    s.feasible = true;
    return s;
}

} // namespace detail

/// Position from the closed form, radiation by line search, split in closed form.
inline TwoUserSolution solve_two_user(const Point3& ue, const SystemParams& p)
{
    detail::require_two_user(p);
    const auto c = derive_constants(p);
    const double psi = optimal_pa_position(ue, c, p);
    const auto choice = optimize_delta(ue, psi, p, c);
    if (!choice.feasible) {
        TwoUserSolution s;
        s.psi_star = psi;
        s.infeasible_reason = choice.infeasible_reason;
        return s;
    }
    return detail::finish_two_user(psi, choice.delta, ue, p, c);
}

/// Same pipeline with the radiation coefficient pinned to `delta`.
inline TwoUserSolution solve_two_user_fixed_delta(const Point3& ue, double delta, const SystemParams& p)
{
    detail::require_two_user(p);
    const auto c = derive_constants(p);
    return detail::finish_two_user(optimal_pa_position(ue, c, p), delta, ue, p, c);
}

/// Wireless-only PASS: one PA at the optimal position radiating `delta` of
/// the guided power, all transmit power to the wireless UE, no wired user.
inline double conventional_pass_rate(const Point3& ue, double delta, const SystemParams& p)
{
    const auto c = derive_constants(p);
    const double psi = optimal_pa_position(ue, c, p);
    const double gain = delta * detail::unit_gains(ue, psi, c, p).wireless;
    return std::log2(1.0 + gain * p.p_max / p.noise_power);
}

} // namespace tpass
