// tpass: run the pinching-antenna experiments and write CSV + manifest.
//
//   tpass fig8 --out results
//   tpass --experiment fig7 --config configs/defaults.conf --trials 200
//   tpass solve-once --ue 50,0
//   tpass custom-sweep --sweep-param D_x --values 20,60,100 --schemes TPASS-opt,ARAP --users 4

#include <chrono>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tpass/tpass.hpp"

#ifndef TPASS_VERSION
#define TPASS_VERSION "unknown"
#endif

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

enum Exit { ok = 0, failure = 1, config = 2, io = 3, infeasible = 4 };

struct Options
{
    std::string experiment;
    std::string config_path;
    std::string out_dir = ".";
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> protocols;
    bool full_scale = false;
    std::vector<std::string> overrides;
    std::string ue = "50,0";
    int threads = 1;
    std::string sweep_param;
    std::vector<double> values;
    std::vector<std::string> schemes;
    std::vector<int> users;
    double fixed_delta = 0.7;
};

std::vector<double> parse_pair(const std::string& text)
{
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) v.push_back(tpass::detail::parse_number("--ue", item));
    if (v.size() != 2) throw tpass::Error(tpass::ErrorKind::config_error, "--ue expects X,Y");
    return v;
}

json derived_json(const tpass::SystemParams& p)
{
    const auto c = tpass::derive_constants(p);
    return {{"wavelength_m", c.wavelength},
            {"guided_wavelength_m", c.guided_wavelength},
            {"alpha_per_m", c.alpha},
            {"eta_m2", c.eta},
            {"wavenumber_rad_per_m", c.wavenumber},
            {"min_spacing_m", tpass::min_spacing(p, c)}};
}

json config_json(const tpass::SystemParams& p)
{
    json j = json::object();
    for (const auto& [k, v] : tpass::dump_config(p)) j[k] = v;
    return j;
}

std::vector<tpass::Scheme> parse_schemes(const std::vector<std::string>& names)
{
    std::vector<tpass::Scheme> out;
    for (const auto& n : names) {
        const auto s = tpass::parse_scheme(n);
        if (!s) throw tpass::Error(tpass::ErrorKind::config_error, "unknown scheme '" + n + "'");
        out.push_back(*s);
    }
    return out;
}

json solution_json(const tpass::TwoUserSolution& s, const tpass::Point3& ue)
{
    return {{"ue_x", ue.x},
            {"ue_y", ue.y},
            {"psi_star", s.psi_star},
            {"delta_star", s.delta_star},
            {"beta_star", s.beta_star},
            {"p_wired", s.p_wired},
            {"p_wireless", s.p_wireless},
            {"r_wired", s.r_wired},
            {"r_wireless", s.r_wireless},
            {"sum_rate", s.sum_rate()},
            {"sic_order", s.sic_order == tpass::SicOrder::wired_strong ? "WiredStrong" : "WirelessStrong"},
            {"feasible", s.feasible},
            {"infeasible_reason", s.infeasible_reason}};
}

int run(const Options& opt, const std::vector<std::string>& argv)
{
    const auto started = std::chrono::steady_clock::now();
    if (!tpass::is_experiment(opt.experiment)) {
        throw tpass::Error(tpass::ErrorKind::config_error, "unknown experiment '" + opt.experiment + "'");
    }

    auto params = tpass::preset_params(opt.experiment);
    if (!opt.config_path.empty()) params = tpass::load_config(opt.config_path, params);
    for (const auto& o : opt.overrides) tpass::apply_override(params, o);
    if (opt.full_scale) {
        params.trials = 1000;
        params.bcd_grid_points = params.grid_points;
    }
    if (opt.trials) params.trials = *opt.trials;
    if (opt.seed) params.seed = *opt.seed;
    tpass::validate(params);

    const fs::path out_dir(opt.out_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (!fs::is_directory(out_dir)) {
        throw tpass::Error(tpass::ErrorKind::io_error, "cannot create output directory '" + opt.out_dir + "'");
    }

    json manifest;
    manifest["tool"] = "tpass";
    manifest["version"] = TPASS_VERSION;
    manifest["experiment"] = opt.experiment;
    manifest["command_line"] = argv;
    manifest["config"] = config_json(params);
    manifest["derived"] = derived_json(params);

    tpass::CsvTable table;
    bool nothing_feasible = false;

    if (opt.experiment == "fig4") {
        table = tpass::fig4_table(params);
    } else if (opt.experiment == "solve-once") {
        const auto xy = parse_pair(opt.ue);
        const auto ue = tpass::ue_at(xy[0], xy[1]);
        const auto sol = tpass::solve_two_user(ue, params);
        const auto j = solution_json(sol, ue);
        std::cout << j.dump(2) << '\n';
        table.header = {"field", "value"};
        for (const auto& [k, v] : j.items()) {
            table.rows.push_back({k, v.is_number() ? tpass::fmt9(v.get<double>()) : v.is_string() ? v.get<std::string>() : v.dump()});
        }
        manifest["solution"] = j;
        nothing_feasible = !sol.feasible;
    } else {
        tpass::SweepSpec spec;
        if (opt.experiment == "custom-sweep") {
            spec.parameter = opt.sweep_param;
            spec.values = opt.values;
            spec.schemes = parse_schemes(opt.schemes.empty() ? std::vector<std::string>{"TPASS-opt"} : opt.schemes);
            spec.user_counts = opt.users;
            spec.trials = params.trials;
        } else {
            spec = tpass::preset_sweep(opt.experiment, params);
            if (!opt.protocols.empty()) {
                const auto chosen = parse_schemes(opt.protocols);
                for (auto s : chosen) {
                    if (!tpass::is_multiuser(s)) {
                        throw tpass::Error(tpass::ErrorKind::config_error, "--protocols takes FRFP, FRAP, ARFP, ARAP");
                    }
                }
                if (tpass::is_multiuser(spec.schemes.front())) spec.schemes = chosen;
            }
            if (!opt.users.empty() && opt.experiment != "fig5") spec.user_counts = opt.users;
        }
        spec.fixed_delta = opt.fixed_delta;
        spec.threads = opt.threads;
        std::cerr << "tpass: " << opt.experiment << ": " << spec.values.size() << " point(s) x " << spec.trials
                  << " trial(s)\n";
        const auto rows = tpass::run_sweep(spec, params);
        table = opt.experiment == "fig5" ? tpass::fig5_table(rows) : tpass::sweep_table(spec.parameter, rows);
        nothing_feasible = tpass::all_infeasible(rows);

        json sweep;
        sweep["parameter"] = spec.parameter;
        sweep["values"] = spec.values;
        std::vector<std::string> names;
        for (auto s : spec.schemes) names.emplace_back(tpass::to_string(s));
        sweep["schemes"] = names;
        sweep["user_counts"] = spec.user_counts;
        sweep["trials"] = spec.trials;
        sweep["fixed_delta"] = spec.fixed_delta;
        manifest["sweep"] = sweep;
    }

    const fs::path csv = out_dir / (opt.experiment + ".csv");
    const fs::path man = out_dir / (opt.experiment + ".manifest.json");
    tpass::write_file_atomic(csv, table.str());
    manifest["outputs"] = {csv.string(), man.string()};
    manifest["runtime_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    tpass::write_file_atomic(man, manifest.dump(2) + "\n");
    std::cerr << "tpass: wrote " << csv.string() << '\n';

    if (nothing_feasible) {
        std::cerr << "tpass: infeasible-experiment: no feasible trial at any point\n";
        return Exit::infeasible;
    }
    return Exit::ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Pinching-antenna (T-PASS) experiments"};
    Options opt;
    std::string positional;
    app.add_option("experiment_name", positional, "fig4|fig5|fig6|fig7|fig8|fig9|custom-sweep|solve-once");
    app.add_option("--experiment", opt.experiment, "Experiment to run (alternative to the positional name)");
    app.add_option("--config", opt.config_path, "Key-value config file");
    app.add_option("--trials", opt.trials, "Monte Carlo trials per sweep point")->check(CLI::PositiveNumber);
    app.add_option("--seed", opt.seed, "Base RNG seed");
    app.add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
    app.add_option("--protocols", opt.protocols, "Multiuser protocols to run (FRFP,FRAP,ARFP,ARAP)")->delimiter(',');
    app.add_flag("--full-scale", opt.full_scale, "1000 trials and full-resolution BCD grids");
    app.add_option("--set", opt.overrides, "Override a config key, KEY=VALUE (repeatable)");
    app.add_option("--ue", opt.ue, "Wireless UE position X,Y for solve-once")->capture_default_str();
    app.add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--sweep-param", opt.sweep_param, "custom-sweep: D_x, P_max (dBm), delta or K");
    app.add_option("--values", opt.values, "custom-sweep: comma-separated values")->delimiter(',');
    app.add_option("--schemes", opt.schemes,
                   "custom-sweep: TPASS-opt,TPASS-fixed,PASS-conv,PASS-full,FRFP,FRAP,ARFP,ARAP")
        ->delimiter(',');
    app.add_option("--users", opt.users, "Multiuser K values per sweep point")->delimiter(',');
    app.add_option("--delta", opt.fixed_delta, "Radiation of the fixed-delta baselines")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? Exit::ok : Exit::config;
    }
    if (opt.experiment.empty()) opt.experiment = positional;
    if (opt.experiment.empty()) {
        std::cerr << "tpass: config-error: no experiment given\n" << app.help();
        return Exit::config;
    }

    try {
        return run(opt, std::vector<std::string>(argv, argv + argc));
    } catch (const tpass::Error& e) {
        std::cerr << "tpass: " << e.what() << '\n';
        return e.kind() == tpass::ErrorKind::io_error ? Exit::io : Exit::config;
    } catch (const std::exception& e) {
        std::cerr << "tpass: error: " << e.what() << '\n';
        return Exit::failure;
    }
}
