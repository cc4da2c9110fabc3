#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tpass/error.hpp"
#include "tpass/params.hpp"

// Key-value configuration files.
//
//   # comment
//   P_max = 20 dBm
//   sigma2 = 1e-12 W
//   D_x = 100
//
// One `key = value` per line. Power keys (P_max, sigma2) take an optional
// unit suffix `W` or `dBm`; everything else is a bare number or keyword.

namespace tpass {

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_number(std::string_view key, std::string_view text)
{
    const std::string s(trim(text));
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw Error(ErrorKind::config_error, std::string(key) + ": not a number: '" + s + "'");
    }
    if (used != s.size()) throw Error(ErrorKind::config_error, std::string(key) + ": trailing text in '" + s + "'");
    return v;
}

inline double parse_power(std::string_view key, std::string_view text)
{
    auto t = trim(text);
    auto ends_with = [&](std::string_view suffix) {
        return t.size() >= suffix.size() && t.substr(t.size() - suffix.size()) == suffix;
    };
    if (ends_with("dBm")) return dbm_to_watt(parse_number(key, t.substr(0, t.size() - 3)));
    if (ends_with("W")) return parse_number(key, t.substr(0, t.size() - 1));
    return parse_number(key, t);
}

inline int parse_int(std::string_view key, std::string_view text)
{
    const double v = parse_number(key, text);
    if (v != static_cast<double>(static_cast<long long>(v))) {
        throw Error(ErrorKind::config_error, std::string(key) + ": expected an integer");
    }
    return static_cast<int>(v);
}

inline std::string fmt_exact(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct KeyBinding
{
    const char* key;
    std::function<void(SystemParams&, std::string_view)> set;
    std::function<std::string(const SystemParams&)> get;
};

inline const std::vector<KeyBinding>& key_bindings()
{
    auto num = [](double SystemParams::*field) {
        return KeyBinding{nullptr,
                          [field](SystemParams& p, std::string_view v) { p.*field = parse_number("", v); },
                          [field](const SystemParams& p) { return fmt_exact(p.*field); }};
    };
    auto named = [](const char* key, KeyBinding b) {
        b.key = key;
        // re-bind setters so error messages name the key
        auto inner = b.set;
        b.set = [key, inner](SystemParams& p, std::string_view v) {
            try {
                inner(p, v);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::config_error) throw;
                throw Error(ErrorKind::config_error, std::string(key) + ": invalid value '" + std::string(v) + "'");
            }
        };
        return b;
    };
    auto power = [](double SystemParams::*field) {
        return KeyBinding{nullptr,
                          [field](SystemParams& p, std::string_view v) { p.*field = parse_power("", v); },
                          [field](const SystemParams& p) { return fmt_exact(p.*field) + " W"; }};
    };
    auto integer = [](int SystemParams::*field) {
        return KeyBinding{nullptr,
                          [field](SystemParams& p, std::string_view v) { p.*field = parse_int("", v); },
                          [field](const SystemParams& p) { return std::to_string(p.*field); }};
    };

    static const std::vector<KeyBinding> table = {
        named("f_c", num(&SystemParams::carrier_hz)),
        named("kappa", num(&SystemParams::attenuation_db_per_m)),
        named("n_eff", num(&SystemParams::refractive_index)),
        named("kappa_c", num(&SystemParams::coupler_efficiency)),
        named("P_max", power(&SystemParams::p_max)),
        named("sigma2", power(&SystemParams::noise_power)),
        named("d", num(&SystemParams::height)),
        named("D_x", num(&SystemParams::region_x)),
        named("D_y", num(&SystemParams::region_y)),
        named("psi0_x", num(&SystemParams::feed_x)),
        named("N", integer(&SystemParams::num_pas)),
        named("K", integer(&SystemParams::num_users)),
        named("w0", num(&SystemParams::w_wired)),
        named("w_k", num(&SystemParams::w_wireless)),
        named("R0_min", num(&SystemParams::r0_min)),
        named("R1_min", num(&SystemParams::r1_min)),
        named("Q_grid", integer(&SystemParams::grid_points)),
        named("delta_min_spacing",
              KeyBinding{nullptr,
                         [](SystemParams& p, std::string_view v) {
                             if (trim(v) == "auto") p.min_spacing.reset();
                             else p.min_spacing = parse_number("", v);
                         },
                         [](const SystemParams& p) {
                             return p.min_spacing ? fmt_exact(*p.min_spacing) : std::string("auto");
                         }}),
        named("n_trials", integer(&SystemParams::trials)),
        named("rng_seed",
              KeyBinding{nullptr,
                         [](SystemParams& p, std::string_view v) {
                             const auto t = trim(v);
                             std::uint64_t s = 0;
                             auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), s);
                             if (ec != std::errc() || ptr != t.data() + t.size()) {
                                 throw Error(ErrorKind::config_error, "bad seed");
                             }
                             p.seed = s;
                         },
                         [](const SystemParams& p) { return std::to_string(p.seed); }}),
        named("bandwidth", num(&SystemParams::bandwidth_hz)),
        named("Q_bcd", integer(&SystemParams::bcd_grid_points)),
        named("bcd_tol", num(&SystemParams::bcd_tol)),
        named("bcd_max_iter", integer(&SystemParams::bcd_max_iter)),
        named("Q_refine", integer(&SystemParams::refine_points)),
        named("sweep_order",
              KeyBinding{nullptr,
                         [](SystemParams& p, std::string_view v) {
                             const auto t = trim(v);
                             if (t == "positions_first") p.sweep_order = SweepOrder::positions_first;
                             else if (t == "radiation_first") p.sweep_order = SweepOrder::radiation_first;
                             else throw Error(ErrorKind::config_error, "bad sweep order");
                         },
                         [](const SystemParams& p) {
                             return std::string(p.sweep_order == SweepOrder::positions_first ? "positions_first"
                                                                                              : "radiation_first");
                         }}),
        named("bcd_staged",
              KeyBinding{nullptr,
                         [](SystemParams& p, std::string_view v) {
                             const auto t = trim(v);
                             if (t == "true" || t == "1") p.bcd_staged = true;
                             else if (t == "false" || t == "0") p.bcd_staged = false;
                             else throw Error(ErrorKind::config_error, "expected true or false");
                         },
                         [](const SystemParams& p) { return std::string(p.bcd_staged ? "true" : "false"); }}),
        named("beta_rule",
              KeyBinding{nullptr,
                         [](SystemParams& p, std::string_view v) {
                             const auto t = trim(v);
                             if (t == "weighted") p.beta_rule = BetaRule::weighted;
                             else if (t == "boundary") p.beta_rule = BetaRule::boundary;
                             else throw Error(ErrorKind::config_error, "bad beta rule");
                         },
                         [](const SystemParams& p) {
                             return std::string(p.beta_rule == BetaRule::weighted ? "weighted" : "boundary");
                         }}),
    };
    return table;
}

} // namespace detail

/// Sets one field from its textual value. Throws config_error on unknown keys
/// or malformed values.
inline void set_param(SystemParams& p, std::string_view key, std::string_view value)
{
    for (const auto& b : detail::key_bindings()) {
        if (key == b.key) {
            b.set(p, value);
            return;
        }
    }
    throw Error(ErrorKind::config_error, "unknown key '" + std::string(key) + "'");
}

/// Applies `key=value` (as given on the command line).
inline void apply_override(SystemParams& p, std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw Error(ErrorKind::config_error, "override '" + std::string(assignment) + "' lacks '='");
    }
    set_param(p, detail::trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

inline SystemParams parse_config(std::istream& in, SystemParams p = {})
{
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = detail::trim(view);
        if (view.empty()) continue;
        try {
            apply_override(p, view);
        } catch (const Error& e) {
            throw Error(ErrorKind::config_error, "line " + std::to_string(lineno) + ": " + e.message());
        }
    }
    return p;
}

inline SystemParams load_config(const std::string& path, SystemParams p = {})
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io_error, "cannot open config file '" + path + "'");
    return parse_config(in, p);
}

/// Every key with its current value, in table order.
inline std::vector<std::pair<std::string, std::string>> dump_config(const SystemParams& p)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& b : detail::key_bindings()) out.emplace_back(b.key, b.get(p));
    return out;
}

inline std::string to_config_text(const SystemParams& p)
{
    std::ostringstream os;
    for (const auto& [k, v] : dump_config(p)) os << k << " = " << v << '\n';
    return os.str();
}

} // namespace tpass
