#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "tpass/error.hpp"
#include "tpass/params.hpp"

namespace tpass {

/// Smallest power split treated as nonzero; closes the open interval (0, 0.5].
inline constexpr double beta_floor = 1e-12;
inline constexpr double beta_cap = 0.5;

struct SlotSolution
{
    double beta = 0;
    double p_wired = 0;
    double p_wireless = 0;
    double r_wired = 0;
    double r_wireless = 0;
    bool sic_feasible = false;
};

/// Rates of one H-NOMA slot with the wired UE decoding first (strong user).
inline SlotSolution slot_rates(double gain_wired, double gain_wireless, double beta, const SystemParams& p)
{
    SlotSolution s;
    s.beta = beta;
    s.p_wired = beta * p.p_max;
    s.p_wireless = p.p_max - s.p_wired;
    s.r_wired = std::log2(1.0 + gain_wired * s.p_wired / p.noise_power);
    s.r_wireless = std::log2(1.0 + gain_wireless * s.p_wireless / (gain_wireless * s.p_wired + p.noise_power));
    s.sic_feasible = gain_wired >= gain_wireless;
    return s;
}

struct BetaBounds
{
    double lo; // wired QoS
    double hi; // wireless QoS, before the 0.5 cap

    double upper() const { return std::min(hi, beta_cap); }
    double lower() const { return std::max(lo, beta_floor); }
    bool feasible() const { return lower() <= upper(); }
};

inline BetaBounds beta_bounds(double gain_wired, double gain_wireless, const SystemParams& p)
{
    const double t0 = std::exp2(p.r0_min) - 1.0;
    const double t1 = std::exp2(p.r1_min);
    BetaBounds b{};
    b.lo = gain_wired > 0 ? t0 * p.noise_power / (gain_wired * p.p_max)
                          : (t0 > 0 ? HUGE_VAL : 0.0);
    const double snr = gain_wireless * p.p_max;
    b.hi = snr > 0 ? (snr - (t1 - 1.0) * p.noise_power) / (snr * t1) : -HUGE_VAL;
    return b;
}

/// Largest feasible split, min(0.5, beta_max). Empty when the QoS interval is
/// empty. Throws order_violation unless the wired UE is the strong user.
inline std::optional<double> optimal_beta(double gain_wired, double gain_wireless, const SystemParams& p)
{
    if (gain_wired < gain_wireless) {
        throw Error(ErrorKind::order_violation, "wired gain below wireless gain");
    }
    const auto b = beta_bounds(gain_wired, gain_wireless, p);
    if (!b.feasible()) return std::nullopt;
    return b.upper();
}

/// Exact maximizer of w_wired*R_wired + w_wireless*R_wireless over the QoS
/// interval. The sign of the derivative is that of the affine function
///   (w0 m - wk z) + beta m z (w0 - wk),   m, z = wired, wireless SNR at P_max,
/// so the optimum is an endpoint or the single root of that function.
inline std::optional<double> weighted_beta(double gain_wired, double gain_wireless, double w_wired,
                                           double w_wireless, const SystemParams& p)
{
    if (gain_wired < gain_wireless) {
        throw Error(ErrorKind::order_violation, "wired gain below wireless gain");
    }
    const auto b = beta_bounds(gain_wired, gain_wireless, p);
    if (!b.feasible()) return std::nullopt;
    const double lo = b.lower(), hi = b.upper();
    const double m = gain_wired * p.p_max / p.noise_power;
    const double z = gain_wireless * p.p_max / p.noise_power;
    const double c0 = w_wired * m - w_wireless * z;
    const double c1 = m * z * (w_wired - w_wireless);
    auto slope = [&](double beta) { return c0 + c1 * beta; };
    if (slope(lo) >= 0 && slope(hi) >= 0) return hi;
    if (slope(lo) <= 0 && slope(hi) <= 0) {
        // non-increasing, unless constant where the larger split is kept
        return (slope(lo) == 0 && slope(hi) == 0) ? hi : lo;
    }
    if (c1 < 0) return std::clamp(-c0 / c1, lo, hi); // + then -: interior max
    // - then +: minimum inside, compare endpoints
    auto utility = [&](double beta) {
        return w_wired * std::log2(1.0 + m * beta) +
               w_wireless * std::log2((1.0 + z) / (1.0 + z * beta));
    };
    return utility(hi) >= utility(lo) ? hi : lo;
}

inline std::optional<double> choose_beta(BetaRule rule, double gain_wired, double gain_wireless,
                                         const SystemParams& p)
{
    if (rule == BetaRule::boundary) return optimal_beta(gain_wired, gain_wireless, p);
    return weighted_beta(gain_wired, gain_wireless, p.w_wired, p.w_wireless, p);
}

// General two-user NOMA rates under either decoding order, used to justify the
// fixed order; the optimizers always run with the wired UE as strong user.
enum class SicOrder { wired_strong, wireless_strong };

struct OrderRates
{
    double r_wired;
    double r_wireless;
    bool sic_ok; // the strong user decodes the weak user's stream at its rate
};

inline OrderRates rates_under_order(SicOrder order, double gain_wired, double gain_wireless,
                                    double p_wired, double p_wireless, double noise)
{
    auto sinr = [&](double g, double own, double other) { return g * own / (g * other + noise); };
    OrderRates r{};
    if (order == SicOrder::wired_strong) {
        r.r_wired = std::log2(1.0 + gain_wired * p_wired / noise);
        r.r_wireless = std::log2(1.0 + sinr(gain_wireless, p_wireless, p_wired));
        r.sic_ok = r.r_wireless <= std::log2(1.0 + sinr(gain_wired, p_wireless, p_wired)) + 1e-12;
    } else {
        r.r_wireless = std::log2(1.0 + gain_wireless * p_wireless / noise);
        r.r_wired = std::log2(1.0 + sinr(gain_wired, p_wired, p_wireless));
        r.sic_ok = r.r_wired <= std::log2(1.0 + sinr(gain_wireless, p_wired, p_wireless)) + 1e-12;
    }
    return r;
}

} // namespace tpass
