#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tpass/channel.hpp"
#include "tpass/params.hpp"
#include "tpass/rates.hpp"
#include "tpass/twouser.hpp"

namespace tpass {

enum class ProtocolKind { frfp, frap, arfp, arap };

inline constexpr ProtocolKind all_protocols[] = {ProtocolKind::frfp, ProtocolKind::frap, ProtocolKind::arfp,
                                                 ProtocolKind::arap};

inline const char* to_string(ProtocolKind k)
{
    switch (k) {
        case ProtocolKind::frfp: return "FRFP";
        case ProtocolKind::frap: return "FRAP";
        case ProtocolKind::arfp: return "ARFP";
        case ProtocolKind::arap: return "ARAP";
    }
    return "?";
}

inline std::optional<ProtocolKind> parse_protocol(std::string_view s)
{
    std::string up;
    for (char ch : s) {
        if (ch != '-' && ch != '_') up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
    }
    for (auto k : all_protocols) {
        if (up == to_string(k)) return k;
    }
    return std::nullopt;
}

/// Which PA variables a protocol shares across the TDMA slots.
struct FeasibleSet
{
    bool shared_positions;
    bool shared_radiation;
};

constexpr FeasibleSet protocol_feasible_set(ProtocolKind k)
{
    switch (k) {
        case ProtocolKind::frfp: return {true, true};
        case ProtocolKind::frap: return {false, true};
        case ProtocolKind::arfp: return {true, false};
        case ProtocolKind::arap: return {false, false};
    }
    return {true, true};
}

struct SlotRates
{
    double r_wired;
    double r_wireless;
};

struct TimeAllocation
{
    std::vector<double> tau;
    double wsr = 0;
    bool feasible = false;
    std::string reason;
};

namespace detail {

enum class AllocStatus { ok, zero_rate, budget, wired_qos };

inline const char* alloc_reason(AllocStatus s)
{
    switch (s) {
        case AllocStatus::ok: return "";
        case AllocStatus::zero_rate: return "a wireless slot has zero rate";
        case AllocStatus::budget: return "time budget: sum of minimum shares exceeds 1";
        case AllocStatus::wired_qos: return "wired QoS R0_min unreachable within the time budget";
    }
    return "";
}

struct AllocResult
{
    AllocStatus status;
    double wsr;
    double min_share_sum;
    double wired_best; // largest wired rate any allocation can reach
};

// Minimum shares for the wireless QoS, remaining budget to the best slot.
// When that leaves the wired UE short, the leftover is split between the
// pair of slots that meets R0_min exactly at the highest utility (the
// vertices of the remaining two-constraint LP). `tau` may be empty;
// otherwise it receives the allocation.
inline AllocResult allocate(std::span<const SlotRates> r, double w_wired, double w_wireless, const SystemParams& p,
                            std::span<double> tau)
{
    const std::size_t k_count = r.size();
    AllocResult out{AllocStatus::ok, 0.0, 0.0, 0.0};
    double wired_min = 0.0, r0_top = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) {
        if (!(r[k].r_wireless > 0)) {
            out.status = AllocStatus::zero_rate;
            out.min_share_sum = HUGE_VAL;
            return out;
        }
        const double t_min = p.r1_min / r[k].r_wireless;
        out.min_share_sum += t_min;
        wired_min += t_min * r[k].r_wired;
        r0_top = std::max(r0_top, r[k].r_wired);
    }
    const double left = std::max(0.0, 1.0 - out.min_share_sum);
    out.wired_best = wired_min + left * r0_top;
    if (out.min_share_sum > 1.0 + 1e-12) {
        out.status = AllocStatus::budget;
        return out;
    }
    if (out.wired_best < p.r0_min - 1e-12) {
        out.status = AllocStatus::wired_qos;
        return out;
    }

    auto utility = [&](std::size_t k) { return w_wired * r[k].r_wired + w_wireless * r[k].r_wireless; };
    const double deficit = p.r0_min - wired_min;
    // extra share per slot; the best single slot first, then mixed pairs
    std::size_t a = 0, b = 0;
    double share_a = left, best = -HUGE_VAL;
    for (std::size_t k = 0; k < k_count; ++k) {
        if (left * r[k].r_wired >= deficit - 1e-12 && left * utility(k) > best) {
            best = left * utility(k);
            a = b = k;
            share_a = left;
        }
    }
    for (std::size_t i = 0; i < k_count; ++i) {
        for (std::size_t j = 0; j < k_count; ++j) {
            if (!(r[i].r_wired > r[j].r_wired)) continue;
            const double si = (deficit - left * r[j].r_wired) / (r[i].r_wired - r[j].r_wired);
            if (!(si > 0.0 && si < left)) continue;
            const double v = si * utility(i) + (left - si) * utility(j);
            if (v > best) {
                best = v;
                a = i;
                b = j;
                share_a = si;
            }
        }
    }
    for (std::size_t k = 0; k < k_count; ++k) {
        double t = p.r1_min / r[k].r_wireless;
        if (k == a) t += share_a;
        if (k == b && b != a) t += left - share_a;
        out.wsr += t * utility(k);
        if (!tau.empty()) tau[k] = t;
    }
    if (!tau.empty()) {
        // one slot absorbs rounding so the shares sum to one
        double others = 0.0;
        for (std::size_t k = 0; k < k_count; ++k) {
            if (k != b) others += tau[k];
        }
        tau[b] = 1.0 - others;
    }
    return out;
}

} // namespace detail

/// Closed-form TDMA shares for fixed per-slot rates. Ties for the slot that
/// receives the leftover budget go to the lowest index.
inline TimeAllocation time_allocation(std::span<const SlotRates> rates, double w_wired, double w_wireless,
                                      const SystemParams& p)
{
    TimeAllocation ta;
    ta.tau.assign(rates.size(), 0.0);
    const auto res = detail::allocate(rates, w_wired, w_wireless, p, ta.tau);
    ta.feasible = res.status == detail::AllocStatus::ok;
    if (ta.feasible) {
        ta.wsr = res.wsr;
    } else {
        ta.tau.clear();
        ta.reason = detail::alloc_reason(res.status);
    }
    return ta;
}

/// Spacing used for PA clusters: the smallest whole number of guided
/// wavelengths not below the minimum spacing, so neighbours add in phase
/// along the waveguide.
inline double phase_aligned_spacing(const SystemParams& p, const DerivedConstants& c)
{
    const double ratio = min_spacing(p, c) / c.guided_wavelength;
    return c.guided_wavelength * std::max(1.0, std::ceil(ratio - 1e-12));
}

/// PA positions serving one UE: a phase-aligned cluster centred on the
/// single-PA optimum, then coordinate-wise grid refinement of each position
/// inside a one-spacing window (order and minimum spacing preserved).
inline std::vector<double> refine_positions_per_slot(const Point3& ue, std::span<const double> radiation,
                                                     const SystemParams& p, const DerivedConstants& c)
{
    const auto n_pa = radiation.size();
    const double spacing = min_spacing(p, c);
    if (n_pa * spacing > p.region_x) {
        throw Error(ErrorKind::spacing_infeasible, "N * delta_min_spacing exceeds D_x");
    }
    const double lo = p.feed_x, hi = p.feed_x + p.region_x;
    const double step = phase_aligned_spacing(p, c);
    const double span_len = step * static_cast<double>(n_pa - 1);
    if (span_len > p.region_x) {
        throw Error(ErrorKind::spacing_infeasible, "phase-aligned cluster longer than D_x");
    }

    const double center = optimal_pa_position(ue, c, p);
    const double start = std::clamp(center - 0.5 * span_len, lo, hi - span_len);
    std::vector<double> pos(n_pa);
    for (std::size_t n = 0; n < n_pa; ++n) pos[n] = start + step * static_cast<double>(n);
    if (n_pa == 1) return pos;

    std::vector<cplx> terms(n_pa);
    for (std::size_t n = 0; n < n_pa; ++n) terms[n] = pa_path_term(ue, pos[n], c, p);
    double gain = std::norm(combine_wireless(terms, radiation));

    const int points = p.refine_points;
    for (int sweep = 0; sweep < 50; ++sweep) {
        const double before = gain;
        for (std::size_t n = 0; n < n_pa; ++n) {
            const double w_lo = std::max({pos[n] - 0.5 * step, lo, n > 0 ? pos[n - 1] + spacing : lo});
            const double w_hi = std::min({pos[n] + 0.5 * step, hi, n + 1 < n_pa ? pos[n + 1] - spacing : hi});
            if (!(w_hi > w_lo)) continue;
            const cplx keep = terms[n];
            double best_x = pos[n];
            cplx best_term = keep;
            for (int i = 0; i < points; ++i) {
                const double x = w_lo + (w_hi - w_lo) * i / (points - 1);
                terms[n] = pa_path_term(ue, x, c, p);
                const double g = std::norm(combine_wireless(terms, radiation));
                if (g > gain) {
                    gain = g;
                    best_x = x;
                    best_term = terms[n];
                }
            }
            pos[n] = best_x;
            terms[n] = best_term;
        }
        if (gain - before <= 1e-12 * gain) break;
    }
    return pos;
}

struct ProtocolSolution
{
    ProtocolKind kind = ProtocolKind::frfp;
    std::vector<PaConfig> pa_per_slot;
    std::vector<SlotSolution> slots;
    std::vector<double> tau;
    double wsr = 0;
    bool feasible = false;
    bool converged = false; // stop rule fired before bcd_max_iter
    int iterations = 0;
    std::vector<double> wsr_trace; // entry 0 is the initial layout; 0 while infeasible
    std::string infeasible_reason;
};

namespace detail {

struct Merit
{
    bool feasible = false;
    double value = -HUGE_VAL; // WSR when feasible, minus the violation otherwise
};

inline bool better(const Merit& a, const Merit& b)
{
    if (a.feasible != b.feasible) return a.feasible;
    return a.value > b.value;
}

struct SlotGains
{
    double wired;
    double wireless;
};

struct SlotScore
{
    bool sic_ok = false;
    bool qos_ok = false;
    double beta = 0;
    SlotRates rates{0, 0};
    double violation = 0; // per-slot QoS shortfall when !qos_ok
};

inline SlotScore score_slot(const SlotGains& g, const SystemParams& p)
{
    SlotScore s;
    s.sic_ok = g.wired >= g.wireless;
    if (!s.sic_ok) return s;
    const auto beta = choose_beta(p.beta_rule, g.wired, g.wireless, p);
    if (beta) {
        s.qos_ok = true;
        s.beta = *beta;
    } else {
        const auto b = beta_bounds(g.wired, g.wireless, p);
        s.beta = std::clamp(b.lo, beta_floor, beta_cap);
        if (b.lower() > beta_cap) s.violation += std::log2(b.lower() / beta_cap);
        s.violation += 1.0;
    }
    const auto r = slot_rates(g.wired, g.wireless, s.beta, p);
    s.rates = {r.r_wired, r.r_wireless};
    if (!s.qos_ok) s.violation += std::max(0.0, p.r1_min - r.r_wireless);
    return s;
}

// Empty when some slot breaks the strong-user condition (candidate pruned).
inline std::optional<Merit> aggregate(std::span<const SlotScore> slots, const SystemParams& p,
                                      std::vector<SlotRates>& scratch)
{
    scratch.resize(slots.size());
    bool all_ok = true;
    double violation = 0;
    for (std::size_t k = 0; k < slots.size(); ++k) {
        if (!slots[k].sic_ok) return std::nullopt;
        all_ok = all_ok && slots[k].qos_ok;
        violation += slots[k].violation;
        scratch[k] = slots[k].rates;
        // a zero rate would make the minimum share infinite
        scratch[k].r_wireless = std::max(scratch[k].r_wireless, 1e-12);
    }
    const auto res = allocate(scratch, p.w_wired, p.w_wireless, p, {});
    if (all_ok && res.status == AllocStatus::ok) return Merit{true, res.wsr};
    violation += std::max(0.0, res.min_share_sum - 1.0);
    if (p.r0_min > 0) violation += std::max(0.0, p.r0_min - res.wired_best) / std::max(p.r0_min, 1.0);
    return Merit{false, -violation};
}

class BcdEngine
{
public:
    // `start` seeds the layout with a solution from a protocol whose feasible
    // set is contained in this one; otherwise the uniform layout is used.
    BcdEngine(ProtocolKind kind, std::span<const Point3> ues, const SystemParams& p,
              const ProtocolSolution* start = nullptr)
        : kind_(kind), set_(protocol_feasible_set(kind)), p_(p), c_(derive_constants(p)),
          ues_(ues.begin(), ues.end()), k_count_(ues.size()), n_pa_(static_cast<std::size_t>(p.num_pas)),
          spacing_(min_spacing(p, c_)), lo_(p.feed_x), hi_(p.feed_x + p.region_x)
    {
        if (k_count_ == 0) throw Error(ErrorKind::invalid_params, "no wireless UEs");
        if (static_cast<double>(n_pa_) * spacing_ > p.region_x + 1e-12) {
            throw Error(ErrorKind::spacing_infeasible, "N * delta_min_spacing exceeds D_x");
        }
        const int q = p.bcd_grid_points;
        grid_delta_.resize(q);
        for (int i = 0; i < q; ++i) grid_delta_[i] = delta_epsilon + (1.0 - delta_epsilon) * i / (q - 1);
        grid_x_.resize(q);
        grid_terms_.resize(static_cast<std::size_t>(q) * k_count_);
        for (int i = 0; i < q; ++i) {
            grid_x_[i] = lo_ + (hi_ - lo_) * i / (q - 1);
            for (std::size_t k = 0; k < k_count_; ++k) {
                grid_terms_[i * k_count_ + k] = pa_path_term(ues_[k], grid_x_[i], c_, p_);
            }
        }
        initialize(start);
    }

    ProtocolSolution run(int max_iter)
    {
        ProtocolSolution sol;
        sol.kind = kind_;
        auto merit = current_merit();
        if (!merit) {
            sol.infeasible_reason = "SIC: initial layout violates the strong-user condition";
            return sol;
        }
        merit_ = *merit;
        sol.wsr_trace.push_back(trace_value());
        for (int it = 1; it <= max_iter; ++it) {
            const Merit prev = merit_;
            if (p_.sweep_order == SweepOrder::positions_first) {
                position_block();
                radiation_block();
            } else {
                radiation_block();
                position_block();
            }
            sol.iterations = it;
            sol.wsr_trace.push_back(trace_value());
            if (merit_.feasible != prev.feasible) continue;
            const double gain = merit_.value - prev.value;
            if (gain <= p_.bcd_tol * std::max(std::abs(prev.value), 1e-300)) {
                sol.converged = true;
                break;
            }
        }
        finish(sol);
        return sol;
    }

private:
    void initialize(const ProtocolSolution* start)
    {
        pos_.assign(k_count_, std::vector<double>(n_pa_));
        rad_.assign(k_count_, std::vector<double>(n_pa_));
        terms_.assign(k_count_, std::vector<cplx>(n_pa_));
        const double cell = p_.region_x / static_cast<double>(n_pa_);
        for (std::size_t k = 0; k < k_count_; ++k) {
            if (start) {
                pos_[k] = start->pa_per_slot[k].positions;
                rad_[k] = start->pa_per_slot[k].radiation;
            } else {
                for (std::size_t n = 0; n < n_pa_; ++n) {
                    pos_[k][n] = lo_ + (static_cast<double>(n) + 0.5) * cell;
                    rad_[k][n] = std::min(0.5, 1.0 / static_cast<double>(n_pa_ - n));
                }
            }
            refresh_terms(k);
        }
        scores_.resize(k_count_);
        for (std::size_t k = 0; k < k_count_; ++k) scores_[k] = score_slot(gains(k), p_);
    }

    void refresh_terms(std::size_t k)
    {
        for (std::size_t n = 0; n < n_pa_; ++n) terms_[k][n] = pa_path_term(ues_[k], pos_[k][n], c_, p_);
    }

    SlotGains gains(std::size_t k) const
    {
        return {std::norm(wired_coeff(rad_[k], c_, p_)), std::norm(combine_wireless(terms_[k], rad_[k]))};
    }

    std::optional<Merit> current_merit() { return aggregate(scores_, p_, scratch_); }

    double trace_value() const { return merit_.feasible ? merit_.value : 0.0; }

    // Adaptive blocks also try the shared move first, so every protocol
    // searches at least the directions of the protocols it contains.
    void position_block()
    {
        shared_position_block();
        if (!set_.shared_positions) per_slot_position_block();
    }

    void radiation_block()
    {
        shared_radiation_block();
        if (!set_.shared_radiation) per_slot_radiation_block();
    }

    // Wireless channel of slot k with PA m moved to abscissa x (path term given).
    cplx moved_channel(std::size_t k, std::size_t m, double x, cplx term) const
    {
        cplx h{0.0, 0.0};
        double residual = 1.0;
        bool placed = false;
        auto add = [&](cplx t, double d) {
            h += t * (std::sqrt(d) * residual);
            residual *= std::sqrt(1.0 - d);
        };
        for (std::size_t n = 0; n < n_pa_; ++n) {
            if (n == m) continue;
            if (!placed && x < pos_[k][n]) {
                add(term, rad_[k][m]);
                placed = true;
            }
            add(terms_[k][n], rad_[k][n]);
        }
        if (!placed) add(term, rad_[k][m]);
        return h;
    }

    // PA m moved to x in every slot keeps the minimum spacing everywhere.
    // Slots with their own layouts must also keep the PA order, otherwise
    // re-sorting would tear the radiation vectors apart.
    bool spacing_ok(std::size_t m, double x) const
    {
        for (const auto& pos : pos_) {
            for (std::size_t n = 0; n < n_pa_; ++n) {
                if (n != m && std::abs(x - pos[n]) < spacing_ - 1e-12) return false;
            }
            if (!set_.shared_positions) {
                if (m > 0 && x < pos[m - 1]) return false;
                if (m + 1 < n_pa_ && x > pos[m + 1]) return false;
            }
        }
        return true;
    }

    bool at_everywhere(std::size_t m, double x) const
    {
        return std::all_of(pos_.begin(), pos_.end(), [&](const auto& pos) { return pos[m] == x; });
    }

    void sort_by_position()
    {
        for (std::size_t k = 0; k < k_count_; ++k) {
            std::vector<std::size_t> idx(n_pa_);
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return pos_[k][a] < pos_[k][b]; });
            auto permute = [&](auto& v) {
                auto copy = v;
                for (std::size_t n = 0; n < n_pa_; ++n) v[n] = copy[idx[n]];
            };
            permute(pos_[k]);
            permute(rad_[k]);
            permute(terms_[k]);
        }
    }

    void shared_position_block()
    {
        std::vector<SlotScore> trial(k_count_);
        for (std::size_t m = 0; m < n_pa_; ++m) {
            Merit best = merit_;
            std::optional<std::size_t> best_q;
            std::vector<SlotScore> best_scores;
            for (std::size_t q = 0; q < grid_x_.size(); ++q) {
                const double x = grid_x_[q];
                if (at_everywhere(m, x) || !spacing_ok(m, x)) continue;
                bool pruned = false;
                for (std::size_t k = 0; k < k_count_ && !pruned; ++k) {
                    const double wired = std::norm(wired_coeff(rad_[k], c_, p_));
                    const double wl = std::norm(moved_channel(k, m, x, grid_terms_[q * k_count_ + k]));
                    trial[k] = score_slot({wired, wl}, p_);
                    pruned = !trial[k].sic_ok;
                }
                if (pruned) continue;
                const auto merit = aggregate(trial, p_, scratch_);
                if (merit && better(*merit, best)) {
                    best = *merit;
                    best_q = q;
                    best_scores = trial;
                }
            }
            if (best_q) {
                for (std::size_t k = 0; k < k_count_; ++k) {
                    pos_[k][m] = grid_x_[*best_q];
                    terms_[k][m] = grid_terms_[*best_q * k_count_ + k];
                }
                scores_ = best_scores;
                merit_ = best;
                sort_by_position();
            }
        }
    }

    void per_slot_position_block()
    {
        for (std::size_t k = 0; k < k_count_; ++k) {
            const auto old_pos = pos_[k];
            const auto old_terms = terms_[k];
            const auto old_score = scores_[k];
            pos_[k] = refine_positions_per_slot(ues_[k], rad_[k], p_, c_);
            refresh_terms(k);
            scores_[k] = score_slot(gains(k), p_);
            const auto merit = aggregate(scores_, p_, scratch_);
            if (merit && better(*merit, merit_)) {
                merit_ = *merit;
            } else {
                pos_[k] = old_pos;
                terms_[k] = old_terms;
                scores_[k] = old_score;
            }
        }
    }

    // Line search over the radiation of PA m in the slots listed in `slots`.
    void radiation_search(std::size_t m, std::span<const std::size_t> slots)
    {
        std::vector<SlotScore> trial = scores_;
        Merit best = merit_;
        std::optional<double> best_delta;
        std::vector<SlotScore> best_scores;
        for (double d : grid_delta_) {
            if (std::all_of(slots.begin(), slots.end(), [&](auto k) { return rad_[k][m] == d; })) continue;
            bool pruned = false;
            for (auto k : slots) {
                const double keep = rad_[k][m];
                rad_[k][m] = d;
                trial[k] = score_slot(gains(k), p_);
                rad_[k][m] = keep;
                if (!trial[k].sic_ok) {
                    pruned = true;
                    break;
                }
            }
            if (pruned) continue;
            const auto merit = aggregate(trial, p_, scratch_);
            if (merit && better(*merit, best)) {
                best = *merit;
                best_delta = d;
                best_scores = trial;
            }
        }
        if (best_delta) {
            for (auto k : slots) rad_[k][m] = *best_delta;
            scores_ = best_scores;
            merit_ = best;
        }
    }

    void shared_radiation_block()
    {
        std::vector<std::size_t> all(k_count_);
        std::iota(all.begin(), all.end(), std::size_t{0});
        for (std::size_t m = 0; m < n_pa_; ++m) radiation_search(m, all);
    }

    void per_slot_radiation_block()
    {
        for (std::size_t k = 0; k < k_count_; ++k) {
            const std::size_t one[] = {k};
            for (std::size_t m = 0; m < n_pa_; ++m) radiation_search(m, one);
        }
    }

    void finish(ProtocolSolution& sol)
    {
        sol.feasible = merit_.feasible;
        sol.wsr = merit_.feasible ? merit_.value : 0.0;
        std::vector<SlotRates> rates(k_count_);
        for (std::size_t k = 0; k < k_count_; ++k) {
            sol.pa_per_slot.push_back({pos_[k], rad_[k]});
            const auto g = gains(k);
            sol.slots.push_back(slot_rates(g.wired, g.wireless, scores_[k].beta, p_));
            rates[k] = scores_[k].rates;
        }
        if (sol.feasible) {
            const auto ta = time_allocation(rates, p_.w_wired, p_.w_wireless, p_);
            sol.tau = ta.tau;
            return;
        }
        for (std::size_t k = 0; k < k_count_; ++k) {
            if (!scores_[k].qos_ok) {
                const auto g = gains(k);
                const auto b = beta_bounds(g.wired, g.wireless, p_);
                sol.infeasible_reason = "slot " + std::to_string(k) +
                    (b.lower() > beta_cap ? ": wired QoS R0_min" : ": wireless QoS R1_min");
                return;
            }
        }
        sol.infeasible_reason = time_allocation(rates, p_.w_wired, p_.w_wireless, p_).reason;
    }

    ProtocolKind kind_;
    FeasibleSet set_;
    SystemParams p_;
    DerivedConstants c_;
    std::vector<Point3> ues_;
    std::size_t k_count_;
    std::size_t n_pa_;
    double spacing_;
    double lo_, hi_;

    std::vector<double> grid_delta_;
    std::vector<double> grid_x_;
    std::vector<cplx> grid_terms_; // [q * K + k]

    std::vector<std::vector<double>> pos_;
    std::vector<std::vector<double>> rad_;
    std::vector<std::vector<cplx>> terms_;
    std::vector<SlotScore> scores_;
    std::vector<SlotRates> scratch_;
    Merit merit_;
};

} // namespace detail

/// Element-wise block-coordinate ascent of the WSR for one protocol. Power
/// split and time shares are recomputed in closed form after every update;
/// candidates breaking the strong-user condition or the spacing are skipped.
namespace detail {

// Continues BCD for `kind` from `prev`, splicing the traces so the result
// reads as one run that enlarged its feasible set part way through.
inline ProtocolSolution continue_bcd(ProtocolKind kind, std::span<const Point3> ues, const SystemParams& p,
                                     const ProtocolSolution& prev)
{
    auto sol = BcdEngine(kind, ues, p, &prev).run(std::max(0, p.bcd_max_iter - prev.iterations));
    std::vector<double> trace = prev.wsr_trace;
    trace.insert(trace.end(), sol.wsr_trace.begin() + 1, sol.wsr_trace.end());
    sol.wsr_trace = std::move(trace);
    sol.iterations += prev.iterations;
    return sol;
}

inline bool solution_better(const ProtocolSolution& a, const ProtocolSolution& b)
{
    if (a.feasible != b.feasible) return a.feasible;
    return a.wsr > b.wsr;
}

} // namespace detail

/// Runs the requested protocols on one scenario. With `bcd_staged` each
/// protocol starts from the best solution of the protocols nested inside it
/// (FR-FP, then FR-AP and AR-FP, then AR-AP), so a more flexible protocol
/// never ends below a less flexible one. Stages are shared across `kinds`.
inline std::vector<ProtocolSolution> bcd_optimize_all(std::span<const ProtocolKind> kinds,
                                                      std::span<const Point3> ues, const SystemParams& p)
{
    auto want = [&](ProtocolKind k) { return std::find(kinds.begin(), kinds.end(), k) != kinds.end(); };
    std::optional<ProtocolSolution> frfp, frap, arfp, arap;
    if (!p.bcd_staged) {
        std::vector<ProtocolSolution> out;
        for (auto k : kinds) out.push_back(detail::BcdEngine(k, ues, p).run(p.bcd_max_iter));
        return out;
    }
    const bool need_frap = want(ProtocolKind::frap) || want(ProtocolKind::arap);
    const bool need_arfp = want(ProtocolKind::arfp) || want(ProtocolKind::arap);
    frfp = detail::BcdEngine(ProtocolKind::frfp, ues, p).run(p.bcd_max_iter);
    if (need_frap) frap = detail::continue_bcd(ProtocolKind::frap, ues, p, *frfp);
    if (need_arfp) arfp = detail::continue_bcd(ProtocolKind::arfp, ues, p, *frfp);
    if (want(ProtocolKind::arap)) {
        const auto& seed = detail::solution_better(*arfp, *frap) ? *arfp : *frap;
        arap = detail::continue_bcd(ProtocolKind::arap, ues, p, seed);
    }
    std::vector<ProtocolSolution> out;
    for (auto k : kinds) {
        switch (k) {
            case ProtocolKind::frfp: out.push_back(*frfp); break;
            case ProtocolKind::frap: out.push_back(*frap); break;
            case ProtocolKind::arfp: out.push_back(*arfp); break;
            case ProtocolKind::arap: out.push_back(*arap); break;
        }
    }
    return out;
}

inline ProtocolSolution bcd_optimize(ProtocolKind kind, std::span<const Point3> ues, const SystemParams& p)
{
    const ProtocolKind one[] = {kind};
    return std::move(bcd_optimize_all(one, ues, p).front());
}

} // namespace tpass
