#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "tpass/channel.hpp"
#include "tpass/error.hpp"
#include "tpass/params.hpp"

// Brute-force reference solvers. Nothing here calls the closed forms of
// rates.hpp, twouser.hpp or multiuser.hpp; rates and constraints are
// re-evaluated from their definitions on plain grids.

namespace tpass::oracle {

struct GridSpec
{
    double lo = 0;
    double hi = 1;
    int points = 10000;

    double at(int i) const { return lo + (hi - lo) * i / (points - 1); }
    double step() const { return (hi - lo) / (points - 1); }
};

struct Argmax1d
{
    double x_star;
    double f_star;
};

/// Exhaustive search; ties resolve to the smallest x.
inline Argmax1d grid_argmax_1d(const std::function<double(double)>& objective, const GridSpec& spec)
{
    if (spec.points < 2 || !(spec.hi > spec.lo)) throw Error(ErrorKind::invalid_params, "grid needs points >= 2 and hi > lo");
    Argmax1d best{spec.lo, objective(spec.lo)};
    for (int i = 1; i < spec.points; ++i) {
        const double x = spec.at(i);
        const double f = objective(x);
        if (f > best.f_star) best = {x, f};
    }
    return best;
}

/// |coefficient|^2 of a single PA at abscissa psi radiating all guided power.
inline double single_pa_gain(const Point3& ue, double psi, const SystemParams& p)
{
    const auto c = derive_constants(p);
    PaConfig pa{{psi}, {1.0}};
    return effective_wireless(ue, pa, c, p).gain;
}

struct BetaOracle
{
    double beta;
    double objective;
};

/// Grid over [lo, 0.5] of w0 R_wired + wk R_wireless subject to both QoS
/// targets, wired UE decoding first. `lo` is the smallest split considered.
inline std::optional<BetaOracle> beta_grid_argmax(double gain_wired, double gain_wireless, double w_wired,
                                                  double w_wireless, const SystemParams& p, double lo,
                                                  int points = 10000)
{
    const GridSpec g{lo, 0.5, points};
    std::optional<BetaOracle> best;
    for (int i = 0; i < points; ++i) {
        const double beta = g.at(i);
        const double pw = beta * p.p_max, pl = (1.0 - beta) * p.p_max;
        const double r0 = std::log2(1.0 + gain_wired * pw / p.noise_power);
        const double r1 = std::log2(1.0 + gain_wireless * pl / (gain_wireless * pw + p.noise_power));
        if (r0 < p.r0_min || r1 < p.r1_min) continue;
        const double f = w_wired * r0 + w_wireless * r1;
        if (!best || f > best->objective) best = BetaOracle{beta, f};
    }
    return best;
}

struct TwoUserOracle
{
    double psi;
    double delta;
    double beta;
    double sum_rate;
    bool wired_strong; // decoding order of the best tuple
};

/// Product grid over psi x delta x beta. Both decoding orders are tried; a
/// tuple counts when both QoS targets hold and the strong user can decode
/// the weak user's stream. The weak user always receives at least half the
/// power.
inline std::optional<TwoUserOracle> two_user_brute_force(const Point3& ue, const SystemParams& p, int resolution = 200)
{
    if (resolution < 2) throw Error(ErrorKind::invalid_params, "resolution must be >= 2");
    const auto c = derive_constants(p);
    const GridSpec psi_grid{p.feed_x, p.feed_x + p.region_x, resolution};
    const GridSpec delta_grid{0.0, 1.0, resolution};
    const GridSpec beta_grid{0.0, 1.0, resolution};
    const double noise = p.noise_power;

    std::optional<TwoUserOracle> best;
    for (int i = 0; i < resolution; ++i) {
        const double psi = psi_grid.at(i);
        for (int j = 0; j < resolution; ++j) {
            const double delta = delta_grid.at(j);
            const PaConfig pa{{psi}, {delta}};
            const double a1 = effective_wireless(ue, pa, c, p).gain;
            const double a0 = effective_wired(pa, c, p).gain;
            for (int l = 0; l < resolution; ++l) {
                const double beta = beta_grid.at(l);
                const double pw = beta * p.p_max, pl = p.p_max - pw;
                for (int order = 0; order < 2; ++order) {
                    const bool wired_strong = order == 0;
                    double r0, r1;
                    bool sic;
                    if (wired_strong) {
                        if (beta > 0.5) continue;
                        r1 = std::log2(1.0 + a1 * pl / (a1 * pw + noise));
                        r0 = std::log2(1.0 + a0 * pw / noise);
                        sic = std::log2(1.0 + a0 * pl / (a0 * pw + noise)) >= r1;
                    } else {
                        if (beta < 0.5) continue;
                        r0 = std::log2(1.0 + a0 * pw / (a0 * pl + noise));
                        r1 = std::log2(1.0 + a1 * pl / noise);
                        sic = std::log2(1.0 + a1 * pw / (a1 * pl + noise)) >= r0;
                    }
                    if (!sic || r0 < p.r0_min || r1 < p.r1_min) continue;
                    const double sum = r0 + r1;
                    if (!best || sum > best->sum_rate) best = TwoUserOracle{psi, delta, beta, sum, wired_strong};
                }
            }
        }
    }
    return best;
}

struct TimeOracle
{
    std::vector<double> tau;
    double wsr;
};

/// Exhaustive grid over the simplex with step 1/resolution. Slot k carries
/// rates (r_wired[k], r_wireless[k]); every slot must deliver R1_min on
/// average and the wired UE R0_min in total.
inline std::optional<TimeOracle> simplex_grid_time(std::span<const double> r_wired, std::span<const double> r_wireless,
                                                   double w_wired, double w_wireless, const SystemParams& p,
                                                   int resolution = 200)
{
    const std::size_t k_count = r_wired.size();
    if (k_count == 0 || k_count > 4 || r_wireless.size() != k_count) {
        throw Error(ErrorKind::invalid_params, "simplex oracle supports 1..4 slots");
    }
    std::optional<TimeOracle> best;
    std::vector<int> units(k_count, 0);
    std::vector<double> tau(k_count);

    auto evaluate = [&] {
        double wsr = 0, wired = 0;
        for (std::size_t k = 0; k < k_count; ++k) {
            tau[k] = static_cast<double>(units[k]) / resolution;
            if (tau[k] * r_wireless[k] < p.r1_min - 1e-12) return;
            wired += tau[k] * r_wired[k];
            wsr += tau[k] * (w_wired * r_wired[k] + w_wireless * r_wireless[k]);
        }
        if (wired < p.r0_min - 1e-12) return;
        if (!best || wsr > best->wsr) best = TimeOracle{tau, wsr};
    };

    // enumerate compositions of `resolution` into k_count parts
    std::function<void(std::size_t, int)> rec = [&](std::size_t k, int left) {
        if (k + 1 == k_count) {
            units[k] = left;
            evaluate();
            return;
        }
        for (int u = 0; u <= left; ++u) {
            units[k] = u;
            rec(k + 1, left - u);
        }
    };
    rec(0, resolution);
    return best;
}

} // namespace tpass::oracle
