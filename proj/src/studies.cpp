#include "lognls/studies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "lognls/random_fields.hpp"
#include "lognls/summation.hpp"

namespace lognls {

namespace {

double gausson_lambda(int N, double c) {
    return -N - std::log(std::pow(M_PI, 0.5 * N) / (c * c));
}

double gausson_energy(int N, double c) {
    return 0.5 * c * c * (N + 1.0 + std::log(std::pow(M_PI, 0.5 * N) / (c * c)));
}

bool non_increasing(const std::vector<double>& v) {
    for (size_t i = 0; i + 1 < v.size(); ++i)
        if (v[i + 1] > 1.05 * v[i] + 1e-14) return false;
    return true;
}

} // namespace

ContinuationReport continuation_mu_to_zero(const ProblemParams& prm_base, const RadialGrid& g,
                                           const std::vector<double>& mus,
                                           const SolveOptions& opts) {
    if (std::abs(prm_base.alpha - 1.0) > 1e-12)
        throw regime_error("continuation_mu_to_zero: requires alpha = 1");
    ContinuationReport rep;
    const Field w0 = sample_gaussian(g, prm_base.c);
    const double lam0 = gausson_lambda(prm_base.N, prm_base.c);
    const double m0 = gausson_energy(prm_base.N, prm_base.c);
    const double pbar = prm_base.p_mass_critical();

    Field prev;
    bool have_prev = false;
    for (double mu : mus) {
        ProblemParams prm = prm_base;
        prm.mu = mu;
        rep.mus.push_back(mu);
        SolveReport sr;
        bool ok = true;
        try {
            const Field* init = have_prev ? &prev : nullptr;
            const bool supercrit = prm.p > pbar + 1e-12 || prm.sobolev_critical();
            if (mu > 0.0 && supercrit)
                sr = solve_local_min(prm, g, opts, init);
            else
                sr = solve_global_min(prm, g, opts, init);
            ok = sr.converged;
        } catch (const error&) {
            ok = false;
        }
        rep.solved.push_back(ok);
        if (!ok) {
            rep.errors_H1.push_back(std::numeric_limits<double>::quiet_NaN());
            rep.lambda_gap.push_back(std::numeric_limits<double>::quiet_NaN());
            rep.energy_gap.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        Field diff = sr.state;
        for (int i = 0; i < g.M; ++i) diff.v[i] -= w0.v[i];
        const double h1 = std::sqrt(kinetic_energy(g, diff) + mass2(g, diff));
        rep.errors_H1.push_back(h1);
        rep.lambda_gap.push_back(std::abs(sr.breakdown.lambda - lam0));
        rep.energy_gap.push_back(std::abs(sr.breakdown.I - m0));
        prev = sr.state;
        have_prev = true;
    }
    rep.monotone = non_increasing(rep.errors_H1) && non_increasing(rep.lambda_gap) &&
                   non_increasing(rep.energy_gap);
    return rep;
}

ScanReport nonexistence_scan(const ProblemParams& prm, const RadialGrid& g, int trials,
                             std::uint64_t seed) {
    if (std::abs(prm.alpha + 1.0) > 1e-12)
        throw regime_error("nonexistence_scan: requires alpha = -1");
    const bool hyp_ii = prm.mu <= 0.0;
    const bool hyp_i = prm.mu > 0.0 && std::abs(prm.p - prm.p_mass_critical()) < 1e-12;
    if (!hyp_i && !hyp_ii)
        throw regime_error("nonexistence_scan: needs mu <= 0 or p = 2 + 4/N with mu > 0");

    ScanReport rep;
    rep.trials = trials;
    rep.min_margin = std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(seed);
    for (int t = 0; t < trials; ++t) {
        Field u;
        if (hyp_i && t == 0) {
            // The GN-tight member decides the sharp mass-critical gate.
            u = normalize_mass(g, weinstein_ground_state(prm.N, prm.p, g), prm.c);
        } else {
            u = random_field_on_sphere(g, rng, prm.c);
        }
        const Functionals f = eval_functionals(u, g, prm);
        const FiberRoots roots = fiber_roots(FiberCoefficients::from(f, prm));
        rep.margins.push_back(roots.min_dpsi);
        rep.min_margin = std::min(rep.min_margin, roots.min_dpsi);
    }
    rep.pass = rep.min_margin > 0.0;
    return rep;
}

DemoReport unboundedness_demo(const ProblemParams& prm, const RadialGrid& g,
                              const DemoOptions& dopts) {
    if (std::abs(prm.alpha + 1.0) > 1e-12 || !(prm.mu > 0.0) || !(prm.p_gamma() < 2.0))
        throw regime_error("unboundedness_demo: requires alpha = -1, mu > 0, 2 < p < 2 + 4/N");
    const double D = D_gate(prm);
    if (!(prm.c >= D))
        throw regime_error("unboundedness_demo: requires c >= D");

    DemoReport rep;
    rep.floor = dopts.floor;

    const double c2 = prm.c * prm.c;
    const double eta = dopts.eta_fraction * c2;
    const double core_mass = std::sqrt(c2 - 0.5 * eta);

    // Concentrated near-optimal core with P < 0 under the full-c convention.
    Field core = normalize_mass(g, weinstein_ground_state(prm.N, prm.p, g), core_mass);
    {
        const FiberCoefficients fc = FiberCoefficients::from(eval_functionals(core, g, prm), prm);
        const FiberRoots roots = fiber_roots(fc);
        if (!roots.s_u || !roots.t_u) {
            rep.message = "core fiber has no P<0 window; lower eta_fraction (c too close to D)";
            return rep;
        }
        // I decreases along the fiber between the roots; stop just short of
        // the right root to keep a strict P < 0 margin.
        const double t = *roots.s_u - 0.05 * (*roots.s_u - *roots.t_u);
        core = dilate_normalized(g, core, t, core_mass);
    }
    const double P_core = assemble_P(eval_functionals(core, g, prm), prm);
    if (!(P_core < 0.0)) {
        rep.message = "core lost the P < 0 margin after regridding";
        return rep;
    }

    double core_end = 0.0;
    {
        double vmax = 0.0;
        for (double x : core.v) vmax = std::max(vmax, std::abs(x));
        for (int i = 0; i < g.M; ++i)
            if (std::abs(core.v[i]) > 1e-10 * vmax) core_end = g.r[i];
    }
    const double rho0 = (dopts.rho0 > 0.0) ? dopts.rho0 : 1.5 * core_end + 2.0 * g.h;
    if (rho0 < core_end + 2.0 * g.h)
        throw error("unboundedness_demo: bump overlaps the core; increase rho0 or R");

    bool all_P_ok = true;
    double best_I = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= dopts.n_max; ++n) {
        const double rho = rho0 * n * n;
        const double width = dopts.width0 * n;
        if (rho + width > g.R - 2.0 * g.h) {
            std::ostringstream os;
            os << "bump for n = " << n << " exceeds the domain; increase R beyond "
               << rho + width;
            throw error("unboundedness_demo: " + os.str());
        }
        Field bump = make_field(g);
        for (int i = 0; i < g.M; ++i) {
            const double x = (g.r[i] - rho) / width;
            if (x > 0.0 && x < 1.0) {
                const double s = std::sin(M_PI * x);
                bump.v[i] = s * s;
            }
        }
        bump = normalize_mass(g, bump, std::sqrt(0.5 * eta));

        Field un = core;
        for (int i = 0; i < g.M; ++i) un.v[i] += bump.v[i];
        const Functionals f = eval_functionals(un, g, prm);
        DemoPoint pt;
        pt.n = n;
        pt.I = assemble_I(f, prm);
        pt.P = assemble_P(f, prm);
        pt.mass2 = f.mass2;
        pt.bump_kinetic = kinetic_energy(g, bump);
        rep.points.push_back(pt);
        if (pt.P > 0.0) all_P_ok = false;
        best_I = std::min(best_I, pt.I);
    }
    rep.pass = all_P_ok && best_I < dopts.floor;
    if (!rep.pass && rep.message.empty())
        rep.message = all_P_ok ? "floor not reached within n_max" : "P(u_n) went positive";
    return rep;
}

GapReport critical_gap_check(const ProblemParams& prm, const RadialGrid& g,
                             const SolveOptions& opts) {
    if (std::abs(prm.alpha - 1.0) > 1e-12 || !(prm.mu > 0.0) || !prm.sobolev_critical())
        throw regime_error("critical_gap_check: requires alpha = 1, mu > 0, p = 2*");
    const double c0 = c0_gate(prm);
    if (!(prm.c < c0)) throw regime_error("critical_gap_check: requires c < c0");

    GapReport rep;
    rep.plus_report = solve_local_min(prm, g, opts);
    rep.minus_report = solve_mountain_pass(prm, g, opts);
    rep.m_plus = rep.plus_report.breakdown.I;
    rep.m_minus = rep.minus_report.breakdown.I;
    rep.S = sobolev_constant(prm.N);
    rep.bound = rep.m_plus +
                std::pow(prm.mu, -0.5 * (prm.N - 2)) * std::pow(rep.S, 0.5 * prm.N) / prm.N;
    rep.margin = rep.bound - rep.m_minus;
    rep.pass = rep.plus_report.converged && rep.minus_report.converged && rep.margin > 0.0;
    return rep;
}

std::vector<RegimeEntry> regime_map(const std::vector<double>& alphas, const std::vector<int>& Ns,
                                    const std::vector<double>& ps, const std::vector<double>& mus,
                                    const std::vector<double>& cs) {
    std::vector<RegimeEntry> table;
    for (double alpha : alphas)
        for (int N : Ns)
            for (double p : ps)
                for (double mu : mus)
                    for (double c : cs) {
                        RegimeEntry e;
                        e.alpha = alpha;
                        e.N = N;
                        e.p = p;
                        e.mu = mu;
                        e.c = c;
                        const double pbar = 2.0 + 4.0 / N;
                        const double twostar =
                            (N >= 3) ? 2.0 * N / (N - 2.0) : std::numeric_limits<double>::infinity();
                        const bool mass_crit = std::abs(p - pbar) < 1e-12;
                        const bool sob_crit = N >= 3 && std::abs(p - twostar) < 1e-12;

                        auto gate = [&](const char* which) -> std::optional<double> {
                            try {
                                ProblemParams q{N, alpha, mu, p, c};
                                const Thresholds t = thresholds(q);
                                if (which[0] == 'c') return t.c0;
                                if (which[0] == 'D') return t.D;
                                return t.c_masscrit;
                            } catch (const error&) {
                                return std::nullopt;
                            }
                        };

                        if (std::abs(alpha - 1.0) < 1e-12) {
                            if (mu <= 0.0) {
                                e.verdict = "Thm 1.1(i): global minimizer";
                                e.solver_level = "global";
                                if (N >= 3 && p > twostar + 1e-12)
                                    e.verdict += " (p beyond 2*: outside the H1 framework)";
                            } else if (p < pbar - 1e-12) {
                                e.verdict = "Thm 1.1(ii): global minimizer";
                                e.solver_level = "global";
                            } else if (mass_crit) {
                                auto bound = gate("m");
                                if (bound && c < *bound) {
                                    e.verdict = "Thm 1.1(iii): global minimizer (c below mass-critical bound)";
                                    e.solver_level = "global";
                                } else {
                                    e.verdict = "mass-critical bound exceeded: no analyzed result";
                                }
                            } else if (sob_crit || p < twostar - 1e-12) {
                                auto c0 = gate("c");
                                const char* thm = sob_crit ? "Thm 1.3" : "Thm 1.2";
                                if (c0 && c < *c0) {
                                    e.verdict = std::string(thm) + ": two solutions (m+, m-)";
                                    e.solver_level = "local|mp";
                                } else if (c0 && std::abs(c - *c0) < 1e-12 * *c0) {
                                    e.verdict = std::string(thm) +
                                                " borderline c = c0: local minimum exists, multiplicity needs c < c0";
                                    e.solver_level = "local";
                                } else {
                                    e.verdict = "c above c0: convex-concave geometry lost, no analyzed result";
                                }
                            } else {
                                e.verdict = "p beyond 2*: outside the analyzed range";
                            }
                        } else if (std::abs(alpha + 1.0) < 1e-12) {
                            std::string tail = "; Thm 1.51(iii): no positive radial solution (statement)";
                            if (mu <= 0.0) {
                                e.verdict = "Thm 1.51(ii): no critical points" + tail;
                            } else if (mass_crit) {
                                auto bound = gate("m");
                                if (bound && c < *bound)
                                    e.verdict = "Thm 1.51(i): no critical points" + tail;
                                else
                                    e.verdict = "mass-critical bound exceeded: scan informative only" + tail;
                            } else if (p < pbar - 1e-12) {
                                auto Dv = gate("D");
                                const double pexcl = 2.0 + 8.0 / (N * (N + 2.0));
                                if (Dv && c < *Dv) {
                                    e.verdict = "Lemma 7.1: P_c empty, no constrained critical points" + tail;
                                } else if (Dv) {
                                    e.verdict = "Thm 1.5 regime: P_c maximizer (inf I on P_c = -infinity)";
                                    if (std::abs(p - pexcl) < 1e-9)
                                        e.verdict += " [p = 2+8/(N(N+2)) excluded]";
                                    else
                                        e.solver_level = "pcmax";
                                    e.verdict += tail;
                                } else {
                                    e.verdict = "D gate unavailable" + tail;
                                }
                            } else {
                                e.verdict = "alpha = -1 with p gamma_p > 2: outside the analyzed regimes" + tail;
                            }
                        } else {
                            e.verdict = "alpha not in {1, -1}: outside the paper's cases";
                        }
                        table.push_back(std::move(e));
                    }
    return table;
}

GrowthProbeReport growth_probe_B(int N, double q, double s_lo, double s_hi, int samples) {
    if (!(q > 2.0) || !(q < 2.0 + 4.0 / N))
        throw error("growth_probe_B: q must lie in the open interval (2, 2 + 4/N)");
    GrowthProbeReport rep;
    rep.q = q;
    const double llo = std::log(s_lo), lhi = std::log(s_hi);
    int arg = 0;
    double best = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double s = std::exp(llo + (lhi - llo) * i / (samples - 1));
        const double ratio = entB_of(s) / std::pow(s, q);
        if (ratio > best) {
            best = ratio;
            arg = i;
        }
    }
    rep.sup_ratio = best;
    rep.arg_s = std::exp(llo + (lhi - llo) * arg / (samples - 1));
    rep.interior = arg > 0 && arg < samples - 1;
    rep.pass = std::isfinite(best) && rep.interior;
    return rep;
}

} // namespace lognls
