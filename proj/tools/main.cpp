#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "lognls/config.hpp"
#include "lognls/random_fields.hpp"
#include "lognls/studies.hpp"

namespace fs = std::filesystem;
using namespace lognls;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRefusal = 2;
constexpr int kExitNumerical = 3;

std::string dstr(double x) { return format_double(x); }

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw error("cannot create output directory " + dir + ": " + ec.message());
}

RadialGrid grid_of(const RunConfig& cfg) {
    return build_grid(cfg.problem.N, cfg.grid.R, cfg.grid.M);
}

int run_solve(const RunConfig& cfg, const std::string& level) {
    RadialGrid g = grid_of(cfg);
    SolveReport rep;
    if (level == "global") rep = solve_global_min(cfg.problem, g, cfg.solver);
    else if (level == "local") rep = solve_local_min(cfg.problem, g, cfg.solver);
    else if (level == "mp") rep = solve_mountain_pass(cfg.problem, g, cfg.solver);
    else if (level == "pcmax") rep = solve_pc_max(cfg.problem, g, cfg.solver);
    else throw error("unknown level '" + level + "' (use global|local|mp|pcmax)");

    ensure_dir(cfg.output.directory);
    const std::string base = cfg.output.directory + "/solve_" + rep.level_name;
    if (cfg.output.structured_text) {
        std::vector<std::pair<std::string, std::string>> kv;
        kv.emplace_back("level", rep.level_name);
        kv.emplace_back("converged", rep.converged ? "true" : "false");
        kv.emplace_back("iterations", std::to_string(rep.iterations));
        kv.emplace_back("I", dstr(rep.breakdown.I));
        kv.emplace_back("P", dstr(rep.breakdown.P));
        kv.emplace_back("lambda", dstr(rep.breakdown.lambda));
        kv.emplace_back("residual_grad", dstr(rep.residual_grad));
        kv.emplace_back("residual_P", dstr(rep.residual_P));
        kv.emplace_back("mass2", dstr(rep.breakdown.components.mass2));
        kv.emplace_back("kinetic", dstr(rep.breakdown.components.kinetic));
        kv.emplace_back("entropy", dstr(rep.breakdown.components.entropy));
        kv.emplace_back("entA", dstr(rep.breakdown.components.entA));
        kv.emplace_back("entB", dstr(rep.breakdown.components.entB));
        kv.emplace_back("lp", dstr(rep.breakdown.components.lp));
        if (!rep.message.empty()) kv.emplace_back("message", rep.message);
        write_report(base + "_report.txt", "solve", kv, cfg);
    }
    if (cfg.output.csv) write_trace_csv(base + "_trace.csv", rep.trace);
    save_field(g, rep.state, base + "_field.txt");

    std::cout << "level=" << rep.level_name << " converged=" << (rep.converged ? "yes" : "no")
              << " I=" << rep.breakdown.I << " lambda=" << rep.breakdown.lambda
              << " P=" << rep.breakdown.P << " iters=" << rep.iterations << "\n";
    return rep.converged ? kExitOk : kExitNumerical;
}

int run_thresholds(const RunConfig& cfg) {
    const Thresholds t = thresholds(cfg.problem);
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("gamma_p", dstr(t.gamma_p));
    kv.emplace_back("p_gamma_p", dstr(cfg.problem.p_gamma()));
    auto put = [&kv](const char* name, const std::optional<double>& v) {
        kv.emplace_back(name, v ? dstr(*v) : "n/a");
    };
    put("C_gn", t.C_gn);
    put("S_sob", t.S_sob);
    put("k0", t.k0);
    put("c0", t.c0);
    put("D", t.D);
    put("c_masscrit", t.c_masscrit);
    for (const auto& [k, v] : kv) std::cout << k << " = " << v << "\n";
    ensure_dir(cfg.output.directory);
    if (cfg.output.structured_text)
        write_report(cfg.output.directory + "/thresholds_report.txt", "thresholds", kv, cfg);
    return kExitOk;
}

int run_gnconst(const RunConfig& cfg) {
    const ProblemParams& prm = cfg.problem;
    std::vector<std::pair<std::string, std::string>> kv;
    if (prm.sobolev_critical()) {
        const double S = sobolev_constant(prm.N);
        kv.emplace_back("S_sob", dstr(S));
        kv.emplace_back("C_gn", dstr(std::pow(S, -0.5)));
    } else {
        const WeinsteinProfile& w = weinstein_profile(prm.N, prm.p);
        kv.emplace_back("C_gn", dstr(w.C));
        kv.emplace_back("Q0", dstr(w.q0));
        kv.emplace_back("Q_mass2", dstr(w.mass2));
        kv.emplace_back("Q_kinetic", dstr(w.kinetic));
        kv.emplace_back("Q_lp", dstr(w.lp));
        kv.emplace_back("ode_residual", dstr(w.ode_residual));
    }
    for (const auto& [k, v] : kv) std::cout << k << " = " << v << "\n";
    ensure_dir(cfg.output.directory);
    if (cfg.output.structured_text)
        write_report(cfg.output.directory + "/gnconst_report.txt", "gnconst", kv, cfg);
    return kExitOk;
}

int run_fiber(const RunConfig& cfg, const std::string& family, const std::string& field_path,
              double s_lo, double s_hi, int samples) {
    RadialGrid g = grid_of(cfg);
    Field u;
    if (!field_path.empty()) {
        auto [gl, ul] = load_field(field_path);
        g = std::move(gl);
        u = std::move(ul);
        if (g.N != cfg.problem.N) throw error("field file dimension differs from config N");
    } else if (family == "gaussian") {
        u = sample_gaussian(g, cfg.problem.c);
    } else if (family == "bubble") {
        u = normalize_mass(g, sample_bubble(g, 1.0, 0.25 * g.R), cfg.problem.c);
    } else if (family == "weinstein") {
        u = normalize_mass(g, weinstein_ground_state(cfg.problem.N, cfg.problem.p, g),
                           cfg.problem.c);
    } else {
        throw error("unknown family '" + family + "' (use gaussian|bubble|weinstein)");
    }

    const Functionals f = eval_functionals(u, g, cfg.problem);
    const FiberCoefficients fc = FiberCoefficients::from(f, cfg.problem);
    const FiberRoots roots = fiber_roots(fc);

    ensure_dir(cfg.output.directory);
    if (cfg.output.csv) {
        std::ofstream out(cfg.output.directory + "/fiber_samples.csv");
        out << "s,psi,dpsi,ddpsi\n";
        for (int i = 0; i < samples; ++i) {
            const double s = s_lo + (s_hi - s_lo) * i / (samples - 1);
            const FiberPoint pt = fiber_eval(fc, s);
            out << dstr(s) << "," << dstr(pt.psi) << "," << dstr(pt.dpsi) << ","
                << dstr(pt.ddpsi) << "\n";
        }
    }
    std::vector<std::pair<std::string, std::string>> kv;
    const char* kind_name = "";
    switch (roots.kind) {
        case RootKind::none: kind_name = "none"; break;
        case RootKind::single_min: kind_name = "single_min"; break;
        case RootKind::single_max: kind_name = "single_max"; break;
        case RootKind::tangent: kind_name = "tangent"; break;
        case RootKind::pair: kind_name = "pair"; break;
        case RootKind::unclassified: kind_name = "unclassified"; break;
    }
    kv.emplace_back("kind", kind_name);
    kv.emplace_back("s_u", roots.s_u ? dstr(*roots.s_u) : "n/a");
    kv.emplace_back("t_u", roots.t_u ? dstr(*roots.t_u) : "n/a");
    kv.emplace_back("ddpsi_s", roots.s_u ? dstr(roots.dd_s) : "n/a");
    kv.emplace_back("ddpsi_t", roots.t_u ? dstr(roots.dd_t) : "n/a");
    kv.emplace_back("min_dpsi", dstr(roots.min_dpsi));
    kv.emplace_back("P", dstr(assemble_P(f, cfg.problem)));
    kv.emplace_back("I", dstr(assemble_I(f, cfg.problem)));
    for (const auto& [k, v] : kv) std::cout << k << " = " << v << "\n";
    if (cfg.output.structured_text)
        write_report(cfg.output.directory + "/fiber_report.txt", "fiber", kv, cfg);
    return kExitOk;
}

int run_study(const RunConfig& cfg, const std::string& kind) {
    ensure_dir(cfg.output.directory);
    const ProblemParams& prm = cfg.problem;

    if (kind == "continuation") {
        RadialGrid g = grid_of(cfg);
        std::vector<double> mus = {0.1, 0.01, 0.001};
        const ContinuationReport rep = continuation_mu_to_zero(prm, g, mus, cfg.solver);
        std::ofstream out(cfg.output.directory + "/continuation.csv");
        out << "mu,error_H1,lambda_gap,energy_gap,solved\n";
        bool all = true;
        for (size_t i = 0; i < rep.mus.size(); ++i) {
            out << dstr(rep.mus[i]) << "," << dstr(rep.errors_H1[i]) << ","
                << dstr(rep.lambda_gap[i]) << "," << dstr(rep.energy_gap[i]) << ","
                << (rep.solved[i] ? "1" : "0") << "\n";
            all = all && rep.solved[i];
        }
        std::cout << "continuation monotone=" << (rep.monotone ? "yes" : "no")
                  << " all_solved=" << (all ? "yes" : "no") << "\n";
        return all ? kExitOk : kExitNumerical;
    }
    if (kind == "nonexistence") {
        RadialGrid g = grid_of(cfg);
        const ScanReport rep = nonexistence_scan(prm, g, 1000, cfg.seed);
        std::cout << "nonexistence pass=" << (rep.pass ? "yes" : "no")
                  << " min_margin=" << rep.min_margin << "\n";
        std::ofstream out(cfg.output.directory + "/nonexistence.csv");
        out << "trial,margin\n";
        for (size_t i = 0; i < rep.margins.size(); ++i)
            out << i << "," << dstr(rep.margins[i]) << "\n";
        return rep.pass ? kExitOk : kExitNumerical;
    }
    if (kind == "unbounded") {
        RadialGrid g = grid_of(cfg);
        DemoOptions dopts;
        const DemoReport rep = unboundedness_demo(prm, g, dopts);
        std::ofstream out(cfg.output.directory + "/unbounded.csv");
        out << "n,I,P,mass2,bump_kinetic\n";
        for (const DemoPoint& pt : rep.points)
            out << pt.n << "," << dstr(pt.I) << "," << dstr(pt.P) << "," << dstr(pt.mass2)
                << "," << dstr(pt.bump_kinetic) << "\n";
        std::cout << "unbounded pass=" << (rep.pass ? "yes" : "no") << " " << rep.message << "\n";
        return rep.pass ? kExitOk : kExitNumerical;
    }
    if (kind == "gap") {
        RadialGrid g = grid_of(cfg);
        const GapReport rep = critical_gap_check(prm, g, cfg.solver);
        std::cout << "gap pass=" << (rep.pass ? "yes" : "no") << " m_plus=" << rep.m_plus
                  << " m_minus=" << rep.m_minus << " bound=" << rep.bound
                  << " margin=" << rep.margin << "\n";
        std::vector<std::pair<std::string, std::string>> kv = {
            {"m_plus", dstr(rep.m_plus)},   {"m_minus", dstr(rep.m_minus)},
            {"S", dstr(rep.S)},             {"bound", dstr(rep.bound)},
            {"margin", dstr(rep.margin)},   {"pass", rep.pass ? "true" : "false"},
        };
        if (cfg.output.structured_text)
            write_report(cfg.output.directory + "/gap_report.txt", "gap", kv, cfg);
        return rep.pass ? kExitOk : kExitNumerical;
    }
    if (kind == "regime") {
        const auto table = regime_map({1.0, -1.0}, {prm.N}, {prm.p}, {prm.mu}, {prm.c});
        std::ofstream out(cfg.output.directory + "/regime.csv");
        out << "alpha,N,p,mu,c,verdict,solver_level\n";
        for (const RegimeEntry& e : table) {
            out << dstr(e.alpha) << "," << e.N << "," << dstr(e.p) << "," << dstr(e.mu) << ","
                << dstr(e.c) << ",\"" << e.verdict << "\"," << e.solver_level << "\n";
            std::cout << "alpha=" << e.alpha << " -> " << e.verdict << "\n";
        }
        return kExitOk;
    }
    if (kind == "growth") {
        const double q = 2.0 + 2.0 / prm.N;
        const GrowthProbeReport rep = growth_probe_B(prm.N, q);
        std::cout << "growth q=" << rep.q << " sup=" << rep.sup_ratio << " at s=" << rep.arg_s
                  << " pass=" << (rep.pass ? "yes" : "no") << "\n";
        return rep.pass ? kExitOk : kExitNumerical;
    }
    throw error("unknown study kind '" + kind + "'");
}

int run_sweep(const std::vector<std::string>& config_paths, const std::string& out_dir,
              const std::string& level, int workers) {
    if (config_paths.empty()) throw error("sweep: no configs given");
    ensure_dir(out_dir);
    std::vector<int> codes(config_paths.size(), kExitOk);
    std::atomic<size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= config_paths.size()) return;
            try {
                RunConfig cfg = load_config(config_paths[i]);
                cfg.output.directory = out_dir + "/run" + std::to_string(i);
                codes[i] = run_solve(cfg, level);
            } catch (const regime_error&) {
                codes[i] = kExitRefusal;
            } catch (const std::exception&) {
                codes[i] = kExitNumerical;
            }
        }
    };
    const int nw = std::max(1, std::min<int>(workers, static_cast<int>(config_paths.size())));
    std::vector<std::thread> pool;
    for (int t = 0; t < nw; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    int rc = kExitOk;
    for (size_t i = 0; i < codes.size(); ++i) {
        std::cout << "run" << i << " (" << config_paths[i] << "): exit " << codes[i] << "\n";
        rc = std::max(rc, codes[i]);
    }
    return rc;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"radial variational solver for the logarithmic Schrodinger equation "
                 "with a power perturbation"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    long seed = -1;

    auto add_common = [&](CLI::App* sub, bool config_required = true) {
        sub->add_option("--config", config_path, "config file")->required(config_required);
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--seed", seed, "seed (overrides config)");
    };

    auto* solve = app.add_subcommand("solve", "compute a constrained critical point");
    std::string level = "global";
    solve->add_option("--level", level, "global|local|mp|pcmax");
    add_common(solve);

    auto* fiber = app.add_subcommand("fiber", "sample a fiber map and report its roots");
    std::string family = "gaussian", field_path;
    double fs_lo = -3.0, fs_hi = 3.0;
    int fsamples = 601;
    fiber->add_option("--family", family, "gaussian|bubble|weinstein");
    fiber->add_option("--field", field_path, "field file to analyze instead of a family");
    fiber->add_option("--s-lo", fs_lo);
    fiber->add_option("--s-hi", fs_hi);
    fiber->add_option("--samples", fsamples);
    add_common(fiber);

    auto* thr = app.add_subcommand("thresholds", "print the applicable gates");
    add_common(thr);

    auto* gnc = app.add_subcommand("gnconst", "compute the best GN/Sobolev constant");
    add_common(gnc);

    auto* study = app.add_subcommand("study", "run a reproducible experiment driver");
    std::string kind = "regime";
    study->add_option("--kind", kind, "continuation|nonexistence|unbounded|gap|regime|growth");
    add_common(study);

    auto* sweep = app.add_subcommand("sweep", "run several configs concurrently");
    std::vector<std::string> sweep_configs;
    int workers = 2;
    std::string sweep_level = "global";
    sweep->add_option("--configs", sweep_configs, "config files")->required();
    sweep->add_option("--level", sweep_level, "solver level for every run");
    sweep->add_option("--workers", workers, "worker cap");
    sweep->add_option("--out", out_dir, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) return run_sweep(sweep_configs, out_dir, sweep_level, workers);

        RunConfig cfg = load_config(config_path);
        if (!out_dir.empty()) cfg.output.directory = out_dir;
        if (seed >= 0) {
            cfg.seed = static_cast<std::uint64_t>(seed);
            cfg.solver.seed = cfg.seed;
        }
        if (solve->parsed()) return run_solve(cfg, level);
        if (fiber->parsed()) return run_fiber(cfg, family, field_path, fs_lo, fs_hi, fsamples);
        if (thr->parsed()) return run_thresholds(cfg);
        if (gnc->parsed()) return run_gnconst(cfg);
        if (study->parsed()) return run_study(cfg, kind);
    } catch (const regime_error& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return kExitRefusal;
    } catch (const config_error& e) {
        std::cerr << "config error (line " << e.line << "): " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
