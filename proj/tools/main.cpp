// Command-line front end: single cycles, cycle-time sweeps, stochastic
// trajectory dumps and an invariant check battery, all driven by one config
// file (INI dialect or JSON).

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinotto/cycle.hpp"
#include "spinotto/errors.hpp"
#include "spinotto/io.hpp"
#include "spinotto/sweep.hpp"

namespace {

using spinotto::Config;
using spinotto::OutputFormat;
using ordered_json = nlohmann::ordered_json;

struct GlobalArgs {
    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
};

Config load(const GlobalArgs& g) {
    Config cfg = g.config_path.empty() ? spinotto::default_config()
                                       : spinotto::load_config(g.config_path);
    if (g.seed)
        cfg.sweep.seed = *g.seed;
    return cfg;
}

void emit(const GlobalArgs& g, const std::string& content) {
    if (g.out_path.empty())
        std::cout << content;
    else
        spinotto::write_text_file(g.out_path, content);
}

int cmd_cycle(const GlobalArgs& g, bool limit) {
    Config cfg = load(g);
    spinotto::CycleRecord rec;
    if (limit) {
        auto res = spinotto::find_limit_cycle(cfg.sweep.base);
        rec = res.record;
        std::cerr << "limit cycle converged in " << res.iterations
                  << " iterations, residual " << spinotto::format_number(res.residual) << "\n";
    } else {
        rec = spinotto::run_cycle(cfg.sweep.base);
    }
    emit(g, spinotto::cycle_to_json(rec));
    return 0;
}

int cmd_sweep(const GlobalArgs& g, const std::string& plot_script_path) {
    Config cfg = load(g);
    spinotto::SweepResult result = spinotto::run_sweep(cfg.sweep);

    OutputFormat fmt = spinotto::parse_format(g.format);
    std::string content =
        fmt == OutputFormat::csv ? spinotto::to_csv(result) : spinotto::to_json(result);
    emit(g, content);

    if (!plot_script_path.empty()) {
        std::string data = g.out_path.empty() ? std::string("sweep.csv") : g.out_path;
        spinotto::write_text_file(plot_script_path, spinotto::emit_plot_script(data));
    }

    if (!g.out_path.empty()) {
        std::cout << "rows: " << result.rows.size() << "\n";
        if (result.argmax_power) {
            const auto& best = result.rows[*result.argmax_power].record;
            std::cout << "max power: " << spinotto::format_number(best.power)
                      << " nK/ms at tau_cycle " << spinotto::format_number(best.tau_cycle_ms)
                      << " ms (n_spin " << spinotto::format_number(best.n_spin) << ")\n";
        }
        if (result.fano_crossing_ms)
            std::cout << "fano crossing: " << spinotto::format_number(*result.fano_crossing_ms)
                      << " ms\n";
    }
    return 0;
}

int cmd_trajectories(const GlobalArgs& g, std::size_t n_override) {
    Config cfg = load(g);
    const spinotto::CycleSpec& spec = cfg.sweep.base;
    std::size_t n = n_override > 0 ? n_override : (cfg.sweep.n_traj > 0 ? cfg.sweep.n_traj : 1000);

    spinotto::ContactPhase hot{spinotto::Direction::heating, spec.tau_h_ms, spec.field.b1_mG,
                               spec.rates};
    spinotto::ContactPhase cold{spinotto::Direction::cooling, spec.tau_c_ms, spec.field.b2_mG,
                                spec.rates};

    spinotto::CycleRecord model = spinotto::run_cycle(spec);

    OutputFormat fmt = spinotto::parse_format(g.format);
    const double lambda = spec.coupling.lambda;

    double sw = 0.0, sw2 = 0.0, sq = 0.0, sq2 = 0.0;
    std::ostringstream csv;
    ordered_json rows = ordered_json::array();
    if (fmt == OutputFormat::csv)
        csv << "traj,level_a,level_b,level_d,quanta_h,quanta_c,work\n";

    for (std::size_t j = 0; j < n; ++j) {
        spinotto::SplitMix64 rng(spinotto::SplitMix64::derive_stream(cfg.sweep.seed, j));
        double u = rng.next_unit();
        int a = spinotto::constants::n_levels - 1;
        double acc = 0.0;
        for (int i = 0; i < spinotto::constants::n_levels; ++i) {
            acc += spec.initial[i];
            if (u < acc) {
                a = i;
                break;
            }
        }
        auto up = spinotto::sample_trajectory(a, hot, rng);
        auto down = spinotto::sample_trajectory(up.final_level, cold, rng);
        double w = lambda * (spec.field.b1_mG * up.quanta() - spec.field.b2_mG * down.quanta());
        double q = up.quanta() + down.quanta();
        sw += w;
        sw2 += w * w;
        sq += q;
        sq2 += q * q;
        if (fmt == OutputFormat::csv) {
            csv << j << ',' << a << ',' << up.final_level << ',' << down.final_level << ','
                << up.quanta() << ',' << down.quanta() << ','
                << spinotto::format_number(w) << '\n';
        } else {
            ordered_json r;
            r["traj"] = j;
            r["level_a"] = a;
            r["level_b"] = up.final_level;
            r["level_d"] = down.final_level;
            r["quanta_h"] = up.quanta();
            r["quanta_c"] = down.quanta();
            r["work"] = std::stod(spinotto::format_number(w));
            rows.push_back(r);
        }
    }

    double N = static_cast<double>(n);
    double mean_w = sw / N, mean_q = sq / N;
    double var_w = n > 1 ? (sw2 - sw * sw / N) / (N - 1.0) : 0.0;
    double var_q = n > 1 ? (sq2 - sq * sq / N) / (N - 1.0) : 0.0;

    if (fmt == OutputFormat::csv) {
        emit(g, csv.str());
        std::cerr << "n " << n << "  mean work " << spinotto::format_number(mean_w)
                  << "  var work " << spinotto::format_number(var_w) << "  mean quanta "
                  << spinotto::format_number(mean_q) << " (model "
                  << spinotto::format_number(model.n_spin) << ")\n";
    } else {
        ordered_json out;
        out["metadata"]["seed"] = cfg.sweep.seed;
        out["metadata"]["rng"] = spinotto::SplitMix64::algorithm;
        out["metadata"]["n_traj"] = n;
        out["summary"]["mean_work"] = std::stod(spinotto::format_number(mean_w));
        out["summary"]["var_work"] = std::stod(spinotto::format_number(var_w));
        out["summary"]["mean_quanta"] = std::stod(spinotto::format_number(mean_q));
        out["summary"]["var_quanta"] = std::stod(spinotto::format_number(var_q));
        out["summary"]["model_n_spin"] = std::stod(spinotto::format_number(model.n_spin));
        out["summary"]["model_w"] = std::stod(spinotto::format_number(model.w));
        out["rows"] = rows;
        emit(g, out.dump(2) + "\n");
    }
    return 0;
}

int cmd_check(const GlobalArgs& g) {
    Config cfg = load(g);
    const spinotto::CycleSpec& spec = cfg.sweep.base;
    int failures = 0;
    auto report = [&failures](const std::string& name, bool ok, const std::string& detail) {
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << name;
        if (!detail.empty())
            std::cout << " (" << detail << ")";
        std::cout << "\n";
        if (!ok)
            ++failures;
    };

    // Probability conservation under the rate equations.
    {
        spinotto::SplitMix64 rng(cfg.sweep.seed);
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            double tau = 1.0 + 600.0 * rng.next_unit();
            auto dirn = k % 2 == 0 ? spinotto::Direction::heating : spinotto::Direction::cooling;
            spinotto::ContactPhase ph{dirn, tau,
                                      dirn == spinotto::Direction::heating ? spec.field.b1_mG
                                                                           : spec.field.b2_mG,
                                      spec.rates};
            auto out = spinotto::evolve_master(spec.initial, ph);
            worst = std::max(worst, std::abs(out.total() - 1.0));
        }
        report("probability conservation", worst <= 1e-9,
               "max |sum p - 1| = " + spinotto::format_number(worst));
    }

    // Limit cycle: closure, first law, efficiencies, collision identity.
    try {
        auto lim = spinotto::find_limit_cycle(spec);
        const auto& rec = lim.record;
        report("limit-cycle closure", rec.closed,
               "residual " + spinotto::format_number(rec.closure_residual));

        double fl = spinotto::first_law_residual(rec);
        double scale = std::max(std::abs(rec.q_h), std::abs(rec.w));
        bool ok_fl = scale == 0.0 || std::abs(fl) / scale <= 1e-9;
        report("first law", ok_fl, "relative residual " +
                                       spinotto::format_number(scale > 0 ? fl / scale : 0.0));

        double eta_ref = spinotto::closed_cycle_efficiency(spec.field, spec.coupling);
        bool ok_eta = rec.eta && std::abs(*rec.eta - eta_ref) <= 1e-10;
        report("efficiency matches closed-cycle value", ok_eta,
               rec.eta ? "eta = " + spinotto::format_number(*rec.eta) : "eta absent");

        double ei_ref = spinotto::otto_efficiency_bound(spec.field);
        bool ok_ei = rec.eta_int && std::abs(*rec.eta_int - ei_ref) <= 1e-10;
        report("internal efficiency matches field ratio", ok_ei,
               rec.eta_int ? "eta_int = " + spinotto::format_number(*rec.eta_int)
                           : "eta_int absent");

        double dn_h = spinotto::mean_level(rec.dist_b) - spinotto::mean_level(rec.dist_a);
        double dn_c = spinotto::mean_level(rec.dist_c) - spinotto::mean_level(rec.dist_d);
        bool ok_n = std::abs(rec.n_heating - dn_h) <= 1e-9 && std::abs(rec.n_cooling - dn_c) <= 1e-9;
        report("collision count identity", ok_n,
               "n_spin = " + spinotto::format_number(rec.n_spin));

        double leak_closed =
            spinotto::heat_leak(rec.dist_a, rec.dist_b, spec.field, spec.coupling);
        bool ok_leak = std::abs(leak_closed - rec.q_l) <=
                       1e-12 * std::max(1.0, std::abs(rec.q_l));
        report("heat-leak identity", ok_leak,
               "q_l = " + spinotto::format_number(rec.q_l));

        report("ramp adiabaticity", rec.ramp_down.passes && rec.ramp_up.passes,
               "max A = " + spinotto::format_number(
                                std::max(rec.ramp_down.a_max, rec.ramp_up.a_max)) +
                   " vs threshold " + spinotto::format_number(spec.adiabaticity_threshold));
    } catch (const spinotto::Error& e) {
        report("limit-cycle convergence", false, e.what());
    }

    return failures == 0 ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"endoreversible collisional spin engine simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalArgs g;
    app.add_option("--config", g.config_path, "configuration file (INI dialect or JSON)");
    std::uint64_t seed_arg = 0;
    auto* seed_opt = app.add_option("--seed", seed_arg, "override the RNG master seed");
    app.add_option("--out", g.out_path, "output file (default: stdout)");
    app.add_option("--format", g.format, "output format: csv or json")->capture_default_str();

    bool limit = false;
    auto* cyc = app.add_subcommand("cycle", "run one cycle and print its record");
    cyc->add_flag("--limit-cycle", limit, "converge to the limit cycle first");

    std::string plot_script;
    auto* swp = app.add_subcommand("sweep", "sweep cycle times and export observables");
    swp->add_option("--plot-script", plot_script, "also write a gnuplot script to this path");

    std::size_t n_traj = 0;
    auto* trj = app.add_subcommand("trajectories", "dump stochastic full-cycle trajectories");
    trj->add_option("--n", n_traj, "number of trajectories (overrides config)");

    auto* chk = app.add_subcommand("check", "run the invariant battery on a config");

    CLI11_PARSE(app, argc, argv);
    if (seed_opt->count() > 0)
        g.seed = seed_arg;

    try {
        if (cyc->parsed())
            return cmd_cycle(g, limit);
        if (swp->parsed())
            return cmd_sweep(g, plot_script);
        if (trj->parsed())
            return cmd_trajectories(g, n_traj);
        if (chk->parsed())
            return cmd_check(g);
    } catch (const spinotto::Error& e) {
        nlohmann::ordered_json err;
        err["error"]["category"] = e.category();
        err["error"]["message"] = e.what();
        std::cerr << err.dump() << "\n";
        if (e.category() == "config" || e.category() == "domain")
            return 2;
        if (e.category() == "simulation")
            return 3;
        return 4;
    } catch (const std::exception& e) {
        nlohmann::ordered_json err;
        err["error"]["category"] = "internal";
        err["error"]["message"] = e.what();
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 0;
}
