#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "tpass/error.hpp"
#include "tpass/montecarlo.hpp"
#include "tpass/params.hpp"
#include "tpass/twouser.hpp"

// Experiment presets and their CSV tables.
//
// Sweep CSVs are long format, one record per (value, K, scheme, metric):
//
//   parameter,value,K,scheme,metric,mean,std,feasible_fraction,trials
//
// metric is one of wsr, rate_wired, rate_wireless (feasible trials only),
// rate_wireless_all (infeasible trials count as zero) and, for the
// multiuser protocols, iterations. Empty mean/std cells mean no feasible
// trial. Two-user schemes report K = 1 and wsr is their sum rate.

namespace tpass {

inline std::string fmt9(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline std::string fmt9(const std::optional<double>& v) { return v ? fmt9(*v) : std::string(); }

struct CsvTable
{
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string str() const
    {
        std::string out;
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i) out += ',';
                out += cells[i];
            }
            out += '\n';
        };
        line(header);
        for (const auto& r : rows) line(r);
        return out;
    }
};

/// Writes through a sibling temporary file and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::io_error, "cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        if (!out) throw Error(ErrorKind::io_error, "write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorKind::io_error, "cannot rename into '" + path.string() + "'");
    }
}

inline const std::vector<std::string>& experiment_names()
{
    static const std::vector<std::string> names = {"fig4", "fig5", "fig6", "fig7", "fig8", "fig9",
                                                   "custom-sweep", "solve-once"};
    return names;
}

inline bool is_experiment(const std::string& name)
{
    for (const auto& n : experiment_names()) {
        if (n == name) return true;
    }
    return false;
}

/// Defaults an experiment starts from before config files and overrides.
inline SystemParams preset_params(const std::string& experiment)
{
    SystemParams p;
    if (experiment == "fig5" || experiment == "fig7" || experiment == "fig9") p.num_pas = 8;
    if (experiment == "fig5") p.num_users = 4;
    return p;
}

inline std::vector<double> range_values(double first, double last, double step)
{
    std::vector<double> v;
    const int n = static_cast<int>(std::floor((last - first) / step + 1e-9)) + 1;
    for (int i = 0; i < n; ++i) v.push_back(first + step * i);
    return v;
}

inline std::vector<Scheme> two_user_schemes()
{
    return {Scheme::tpass_opt, Scheme::tpass_fixed, Scheme::pass_conv};
}

inline std::vector<Scheme> protocol_schemes() { return {Scheme::frfp, Scheme::frap, Scheme::arfp, Scheme::arap}; }

/// Sweep behind a figure preset; `p.trials` sets the trial count.
inline SweepSpec preset_sweep(const std::string& experiment, const SystemParams& p)
{
    SweepSpec s;
    s.trials = p.trials;
    if (experiment == "fig5") {
        s.parameter = "K";
        s.values = {static_cast<double>(p.num_users)};
        s.schemes = protocol_schemes();
    } else if (experiment == "fig6") {
        s.parameter = "D_x";
        s.values = range_values(20, 100, 10);
        s.schemes = two_user_schemes();
    } else if (experiment == "fig7") {
        s.parameter = "D_x";
        s.values = range_values(20, 100, 20);
        s.schemes = protocol_schemes();
        s.user_counts = {4, 6};
    } else if (experiment == "fig8") {
        s.parameter = "P_max";
        s.values = range_values(0, 30, 5);
        s.schemes = two_user_schemes();
    } else if (experiment == "fig9") {
        s.parameter = "P_max";
        s.values = range_values(10, 30, 5);
        s.schemes = protocol_schemes();
        s.user_counts = {4, 6};
    } else {
        throw Error(ErrorKind::config_error, "no sweep preset for '" + experiment + "'");
    }
    return s;
}

/// Radiation values for the gain-ratio curves: 200 points evenly spaced in
/// log-odds between 1e-6 and 1 - 1e-9.
inline std::vector<double> fig4_deltas(int points = 200)
{
    const double a = std::log(1e-6 / (1 - 1e-6));
    const double b = std::log((1 - 1e-9) / 1e-9);
    std::vector<double> v;
    for (int i = 0; i < points; ++i) {
        const double t = a + (b - a) * i / (points - 1);
        v.push_back(1.0 / (1.0 + std::exp(-t)));
    }
    return v;
}

inline CsvTable fig4_table(const SystemParams& base, const std::vector<double>& lengths = {10, 50, 100})
{
    CsvTable t{{"delta", "D_x", "ratio_best", "ratio_avg"}, {}};
    for (double len : lengths) {
        SystemParams p = base;
        p.region_x = len;
        const auto c = derive_constants(p);
        for (double d : fig4_deltas()) {
            const auto r = gain_ratios(d, p, c);
            t.rows.push_back({fmt9(d), fmt9(len), fmt9(r.ratio_best_case), fmt9(r.ratio_average)});
        }
    }
    return t;
}

inline CsvTable sweep_table(const std::string& parameter, const std::vector<SweepRow>& rows)
{
    CsvTable t{{"parameter", "value", "K", "scheme", "metric", "mean", "std", "feasible_fraction", "trials"}, {}};
    for (const auto& r : rows) {
        const auto& a = r.stats;
        auto emit = [&](const char* metric, const Moments& m) {
            t.rows.push_back({parameter, fmt9(r.value), std::to_string(r.users), to_string(r.scheme), metric,
                              fmt9(m.mean), fmt9(m.stddev), fmt9(a.feasible_fraction()), std::to_string(a.trials)});
        };
        emit("wsr", a.wsr);
        emit("rate_wired", a.r_wired);
        emit("rate_wireless", a.r_wireless);
        emit("rate_wireless_all", a.r_wireless_all);
        if (is_multiuser(r.scheme)) emit("iterations", a.iterations);
    }
    return t;
}

/// Trial-averaged convergence traces; iteration 0 is the initial layout.
inline CsvTable fig5_table(const std::vector<SweepRow>& rows)
{
    CsvTable t{{"iteration", "protocol", "wsr"}, {}};
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.stats.trace.size(); ++i) {
            t.rows.push_back({std::to_string(i), to_string(r.scheme), fmt9(r.stats.trace[i])});
        }
    }
    return t;
}

inline bool all_infeasible(const std::vector<SweepRow>& rows)
{
    for (const auto& r : rows) {
        if (r.stats.feasible > 0) return false;
    }
    return true;
}

} // namespace tpass
