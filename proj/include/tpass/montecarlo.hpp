#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "tpass/channel.hpp"
#include "tpass/error.hpp"
#include "tpass/multiuser.hpp"
#include "tpass/params.hpp"
#include "tpass/twouser.hpp"

namespace tpass {

struct Scenario
{
    int trial_id = 0;
    int sweep_index = 0;
    std::uint64_t seed = 0;
    std::vector<Point3> ues;
};

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Seed of one trial, a pure function of its coordinates.
inline std::uint64_t trial_seed(std::uint64_t base, int trial_id, int sweep_index)
{
    std::uint64_t h = splitmix64(base);
    h = splitmix64(h ^ static_cast<std::uint64_t>(trial_id));
    h = splitmix64(h ^ (static_cast<std::uint64_t>(sweep_index) << 32));
    return h;
}

/// K = p.num_users UEs uniform over the service region, drawn in order
/// x_0, y_0, x_1, y_1, ... so a smaller K sees a prefix of a larger draw.
inline Scenario seed_scenario(int trial_id, int sweep_index, const SystemParams& p)
{
    Scenario s;
    s.trial_id = trial_id;
    s.sweep_index = sweep_index;
    s.seed = trial_seed(p.seed, trial_id, sweep_index);
    std::mt19937_64 gen(s.seed);
    auto unit = [&] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
    s.ues.reserve(static_cast<std::size_t>(p.num_users));
    for (int k = 0; k < p.num_users; ++k) {
        const double x = p.feed_x + p.region_x * unit();
        const double y = p.region_y * (unit() - 0.5);
        s.ues.push_back(ue_at(x, y));
    }
    return s;
}

enum class Scheme { tpass_opt, tpass_fixed, pass_conv, pass_full, frfp, frap, arfp, arap };

inline const char* to_string(Scheme s)
{
    switch (s) {
        case Scheme::tpass_opt: return "TPASS-opt";
        case Scheme::tpass_fixed: return "TPASS-fixed";
        case Scheme::pass_conv: return "PASS-conv";
        case Scheme::pass_full: return "PASS-full";
        case Scheme::frfp: return "FRFP";
        case Scheme::frap: return "FRAP";
        case Scheme::arfp: return "ARFP";
        case Scheme::arap: return "ARAP";
    }
    return "?";
}

inline std::optional<Scheme> parse_scheme(std::string_view name)
{
    for (auto s : {Scheme::tpass_opt, Scheme::tpass_fixed, Scheme::pass_conv, Scheme::pass_full}) {
        if (name == to_string(s)) return s;
    }
    if (const auto k = parse_protocol(name)) {
        switch (*k) {
            case ProtocolKind::frfp: return Scheme::frfp;
            case ProtocolKind::frap: return Scheme::frap;
            case ProtocolKind::arfp: return Scheme::arfp;
            case ProtocolKind::arap: return Scheme::arap;
        }
    }
    return std::nullopt;
}

inline bool is_multiuser(Scheme s) { return s >= Scheme::frfp; }

inline ProtocolKind protocol_of(Scheme s)
{
    switch (s) {
        case Scheme::frap: return ProtocolKind::frap;
        case Scheme::arfp: return ProtocolKind::arfp;
        case Scheme::arap: return ProtocolKind::arap;
        default: return ProtocolKind::frfp;
    }
}

struct SweepSpec
{
    std::string parameter; // D_x, P_max (dBm), delta or K
    std::vector<double> values;
    std::vector<Scheme> schemes;
    int trials = 100;
    std::vector<int> user_counts; // multiuser K per point; empty means params.num_users
    double fixed_delta = 0.7;     // radiation of TPASS-fixed and PASS-conv
    int threads = 1;
};

struct TrialRecord
{
    int trial_id = 0;
    bool feasible = false;
    double wsr = 0;        // sum rate for the two-user schemes
    double r_wired = 0;    // long-term rate for multiuser schemes
    double r_wireless = 0; // mean long-term rate per wireless UE for multiuser schemes
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace;
};

struct Moments
{
    std::optional<double> mean; // absent when no sample
    std::optional<double> stddev;
};

/// Ordered two-pass mean and sample deviation; bit-stable for a fixed order.
inline Moments moments(const std::vector<double>& xs)
{
    Moments m;
    if (xs.empty()) return m;
    double sum = 0;
    for (double x : xs) sum += x;
    const double mean = sum / static_cast<double>(xs.size());
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    m.mean = mean;
    m.stddev = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    return m;
}

struct AggregateStats
{
    int trials = 0;
    int feasible = 0;
    Moments wsr;                // feasible trials
    Moments r_wired;            // feasible trials
    Moments r_wireless;         // feasible trials
    Moments r_wireless_all;     // all trials, infeasible counted as zero
    Moments iterations;         // all trials
    std::vector<double> trace;  // mean over feasible trials, padded with final values

    double feasible_fraction() const { return trials > 0 ? static_cast<double>(feasible) / trials : 0.0; }
};

inline AggregateStats aggregate_records(const std::vector<TrialRecord>& recs)
{
    AggregateStats a;
    a.trials = static_cast<int>(recs.size());
    std::vector<double> wsr, r0, r1, r1_all, iters;
    std::size_t longest = 0;
    for (const auto& r : recs) {
        iters.push_back(r.iterations);
        r1_all.push_back(r.feasible ? r.r_wireless : 0.0);
        if (!r.feasible) continue;
        ++a.feasible;
        wsr.push_back(r.wsr);
        r0.push_back(r.r_wired);
        r1.push_back(r.r_wireless);
        longest = std::max(longest, r.trace.size());
    }
    a.wsr = moments(wsr);
    a.r_wired = moments(r0);
    a.r_wireless = moments(r1);
    a.r_wireless_all = moments(r1_all);
    a.iterations = moments(iters);
    if (longest > 0) {
        a.trace.assign(longest, 0.0);
        for (std::size_t i = 0; i < longest; ++i) {
            double sum = 0;
            for (const auto& r : recs) {
                if (!r.feasible || r.trace.empty()) continue;
                sum += r.trace[std::min(i, r.trace.size() - 1)];
            }
            a.trace[i] = sum / a.feasible;
        }
    }
    return a;
}

inline TrialRecord record_from(int trial_id, const ProtocolSolution& sol)
{
    TrialRecord rec;
    rec.trial_id = trial_id;
    rec.feasible = sol.feasible;
    rec.iterations = sol.iterations;
    rec.converged = sol.converged;
    rec.trace = sol.wsr_trace;
    if (sol.feasible) {
        rec.wsr = sol.wsr;
        double wired = 0, wireless = 0;
        for (std::size_t k = 0; k < sol.slots.size(); ++k) {
            wired += sol.tau[k] * sol.slots[k].r_wired;
            wireless += sol.tau[k] * sol.slots[k].r_wireless;
        }
        rec.r_wired = wired;
        rec.r_wireless = wireless / static_cast<double>(sol.slots.size());
    }
    return rec;
}

/// One trial of one scheme. `p` already carries the swept value.
inline TrialRecord run_trial(Scheme scheme, const Scenario& sc, const SystemParams& p, double fixed_delta)
{
    TrialRecord rec;
    rec.trial_id = sc.trial_id;
    if (!is_multiuser(scheme)) {
        SystemParams two = p;
        two.num_pas = 1;
        two.num_users = 1;
        const Point3 ue = sc.ues.front();
        if (scheme == Scheme::pass_conv || scheme == Scheme::pass_full) {
            const double delta = scheme == Scheme::pass_conv ? fixed_delta : 1.0;
            rec.r_wireless = conventional_pass_rate(ue, delta, two);
            rec.wsr = rec.r_wireless;
            rec.feasible = true;
            return rec;
        }
        const auto sol = scheme == Scheme::tpass_opt ? solve_two_user(ue, two)
                                                     : solve_two_user_fixed_delta(ue, fixed_delta, two);
        rec.feasible = sol.feasible;
        if (sol.feasible) {
            rec.r_wired = sol.r_wired;
            rec.r_wireless = sol.r_wireless;
            rec.wsr = sol.sum_rate();
        }
        return rec;
    }

    const std::span<const Point3> ues(sc.ues.data(), static_cast<std::size_t>(p.num_users));
    return record_from(sc.trial_id, bcd_optimize(protocol_of(scheme), ues, p));
}

struct SweepRow
{
    double value;
    int users;
    Scheme scheme;
    AggregateStats stats;
    std::vector<TrialRecord> records;
};

/// Parameters at one sweep point.
inline SystemParams apply_sweep_value(SystemParams p, const std::string& parameter, double value)
{
    if (parameter == "D_x") p.region_x = value;
    else if (parameter == "P_max") p.p_max = dbm_to_watt(value);
    else if (parameter == "K") p.num_users = static_cast<int>(value);
    else if (parameter != "delta") throw Error(ErrorKind::config_error, "unknown sweep parameter '" + parameter + "'");
    return p;
}

inline void check_sweep(const SweepSpec& spec)
{
    if (spec.values.empty()) throw Error(ErrorKind::config_error, "sweep has no values");
    if (spec.schemes.empty()) throw Error(ErrorKind::config_error, "sweep has no schemes");
    if (spec.trials < 1) throw Error(ErrorKind::config_error, "sweep needs trials >= 1");
    apply_sweep_value({}, spec.parameter, spec.values.front());
    if (spec.parameter == "K") {
        for (double v : spec.values) {
            if (v < 1 || v != std::floor(v)) throw Error(ErrorKind::config_error, "K values must be positive integers");
        }
    }
}

// Runs fn(i) for i in [0, n) on up to `threads` workers.
template <class Fn>
void parallel_for(int n, int threads, Fn&& fn)
{
    threads = std::clamp(threads, 1, std::max(n, 1));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int i = next++; i < n && !failed; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

/// One row per (sweep value, K, scheme). Each trial draws one scenario
/// shared by every scheme and K at that sweep point; results do not depend
/// on the thread count.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, const SystemParams& base)
{
    check_sweep(spec);
    validate(base);
    std::vector<SweepRow> rows;
    for (std::size_t s = 0; s < spec.values.size(); ++s) {
        const double value = spec.values[s];
        SystemParams point = apply_sweep_value(base, spec.parameter, value);
        const double delta = spec.parameter == "delta" ? value : spec.fixed_delta;

        std::vector<int> ks;
        if (spec.parameter == "K") ks = {point.num_users};
        else if (!spec.user_counts.empty()) ks = spec.user_counts;
        else ks = {point.num_users};
        const int k_max = *std::max_element(ks.begin(), ks.end());

        struct Cell
        {
            int users;
            Scheme scheme;
        };
        std::vector<Cell> cells;
        for (int k : ks) {
            for (auto sch : spec.schemes) {
                if (!is_multiuser(sch)) continue;
                cells.push_back({k, sch});
            }
        }
        // two-user schemes do not depend on K; run them once
        for (auto sch : spec.schemes) {
            if (is_multiuser(sch)) continue;
            cells.push_back({1, sch});
        }

        std::vector<std::vector<TrialRecord>> recs(cells.size(), std::vector<TrialRecord>(spec.trials));
        SystemParams draw = point;
        draw.num_users = k_max;
        parallel_for(spec.trials, spec.threads, [&](int t) {
            const auto sc = seed_scenario(t, static_cast<int>(s), draw);
            for (int k : ks) {
                // all protocols at one K in a single call so BCD stages are shared
                std::vector<std::size_t> idx;
                std::vector<ProtocolKind> kinds;
                for (std::size_t c = 0; c < cells.size(); ++c) {
                    if (!is_multiuser(cells[c].scheme) || cells[c].users != k) continue;
                    idx.push_back(c);
                    kinds.push_back(protocol_of(cells[c].scheme));
                }
                if (kinds.empty()) continue;
                SystemParams q = point;
                q.num_users = k;
                const auto sols = bcd_optimize_all(kinds, std::span<const Point3>(sc.ues.data(), std::size_t(k)), q);
                for (std::size_t i = 0; i < idx.size(); ++i) recs[idx[i]][t] = record_from(t, sols[i]);
            }
            for (std::size_t c = 0; c < cells.size(); ++c) {
                if (is_multiuser(cells[c].scheme)) continue;
                recs[c][t] = run_trial(cells[c].scheme, sc, point, delta);
            }
        });
        for (std::size_t c = 0; c < cells.size(); ++c) {
            SweepRow row{value, cells[c].users, cells[c].scheme, aggregate_records(recs[c]), std::move(recs[c])};
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

} // namespace tpass
