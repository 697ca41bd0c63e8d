#include "lognls/solvers.hpp"

#include <cmath>
#include <sstream>

#include "lognls/summation.hpp"

namespace lognls {

namespace {

constexpr double kTauMax = 8.0;
constexpr double kTauMin = 1e-13;
constexpr double kArmijo = 1e-4;
// Energy comparisons saturate at rounding noise near a critical point; the
// guard keeps the line search from collapsing tau on unmeasurable decreases.
constexpr double kEnergyNoise = 4e-15;

std::vector<double> confining_potential(const RadialGrid& g) {
    std::vector<double> q(g.M);
    for (int i = 0; i < g.M; ++i) q[i] = g.r[i] * g.r[i];
    return q;
}

double tangent_residual(const RadialGrid& g, const Field& u, const Field& grad,
                        const Functionals& f, const ProblemParams& prm) {
    const double lambda = (prm.alpha * f.entropy + prm.mu * f.lp - f.kinetic) / f.mass2;
    Accumulator acc;
    for (int i = 0; i < g.M; ++i) {
        const double ri = grad.v[i] + lambda * u.v[i];
        acc.add(g.w[i] * ri * ri);
    }
    return std::sqrt(acc.value()) / std::sqrt(f.mass2);
}

Field tangent_project(const RadialGrid& g, const Field& vec, const Field& u, double c2) {
    Field out = vec;
    const double coef = dot(g, vec, u) / c2;
    for (int i = 0; i < g.M; ++i) out.v[i] -= coef * u.v[i];
    return out;
}

bool nonneg_up_to_rounding(const Field& u) {
    double vmax = 0.0;
    for (double x : u.v) vmax = std::max(vmax, std::abs(x));
    const double floor = -1e-12 * vmax;
    for (double x : u.v) {
        if (x < floor) return false;
    }
    return true;
}

// Positive-cone projection.  For the discrete functional I(|u|) <= I(u):
// the face-difference kinetic obeys | |u_i|-|u_j| | <= |u_i-u_j| and every
// other term is even in u, so this is itself a descent operation and keeps
// flows started from positive data nonnegative.
void positive_project(Field& u) {
    for (double& x : u.v) x = std::abs(x);
}

int auto_stride(long max_iter) { return static_cast<int>(std::max<long>(1, max_iter / 2000)); }

void push_trace(std::vector<TracePoint>& tr, long iter, double I, double P, int stride) {
    if (iter % stride == 0) tr.push_back({iter, I, P});
}

struct MinimizeSetup {
    Field init;
    std::string level_name;
    bool guard_enabled = false;
    double k0 = 0.0;
};

SolveReport run_minimize(const ProblemParams& prm, const RadialGrid& g, const SolveOptions& opts,
                         const MinimizeSetup& setup) {
    opts.validate();
    SolveReport rep;
    rep.level_name = setup.level_name;
    const int stride = opts.trace_stride > 0 ? opts.trace_stride : auto_stride(opts.max_iter);
    const double c2 = prm.c * prm.c;

    Field u = normalize_mass(g, setup.init, prm.c);
    const bool positive_flow = nonneg_up_to_rounding(u);
    const std::vector<double> pot = confining_potential(g);
    EnergyBreakdown eb = eval_energy(u, g, prm);
    double tau = opts.step0;
    int guard_trips = 0;
    long iter = 0;

    push_trace(rep.trace, 0, eb.I, eb.P, 1);
    for (iter = 1; iter <= opts.max_iter; ++iter) {
        if (setup.guard_enabled &&
            eb.components.kinetic > (1.0 - opts.guard_margin) * setup.k0) {
            // Rescale back into V_{k0}: pick the deeper of the fiber minimum
            // and the dilation that lands at 0.8 k0.
            if (++guard_trips > opts.guard_cap) {
                rep.message = "V_k0 guard tripped more than guard_cap times";
                break;
            }
            const FiberCoefficients fc = FiberCoefficients::from(eb.components, prm);
            const FiberRoots roots = fiber_roots(fc);
            double s = 0.5 * std::log(0.8 * setup.k0 / eb.components.kinetic);
            if (roots.s_u && *roots.s_u > s) s = *roots.s_u;
            u = dilate_normalized(g, u, s, prm.c);
            eb = eval_energy(u, g, prm);
            continue;
        }

        const Field grad = eval_gradient(u, g, prm);
        const double res = tangent_residual(g, u, grad, eb.components, prm);
        const double resP = std::abs(eb.P) / (1.0 + eb.components.kinetic);
        if (res < opts.tol_grad) {
            rep.converged = resP < opts.tol_P;
            rep.residual_grad = res;
            rep.residual_P = resP;
            if (!rep.converged) rep.message = "gradient converged but Pohozaev residual above tol_P";
            break;
        }

        Field gtan = grad;
        {
            const double lambda =
                (prm.alpha * eb.components.entropy + prm.mu * eb.components.lp -
                 eb.components.kinetic) / eb.components.mass2;
            for (int i = 0; i < g.M; ++i) gtan.v[i] += lambda * u.v[i];
        }
        Field dir = tangent_project(g, helmholtz_solve(g, gtan, 1.0, &pot), u, c2);
        const double slope = dot(g, gtan, dir);
        if (!(slope > 0.0)) {
            rep.message = "preconditioned direction lost descent slope";
            break;
        }

        bool accepted = false;
        while (tau >= kTauMin) {
            Field cand = u;
            for (int i = 0; i < g.M; ++i) cand.v[i] -= tau * dir.v[i];
            if (positive_flow) positive_project(cand);
            cand = normalize_mass(g, cand, prm.c);
            EnergyBreakdown cand_eb = eval_energy(cand, g, prm);
            const double want = kArmijo * tau * slope;
            const double noise = kEnergyNoise * (1.0 + std::abs(eb.I));
            // strict Armijo while the decrease is measurable, flat-to-rounding
            // acceptance once it is not
            const bool ok = (want > noise) ? (cand_eb.I <= eb.I - want)
                                           : (cand_eb.I <= eb.I + noise);
            if (ok) {
                u = std::move(cand);
                eb = cand_eb;
                accepted = true;
                tau = std::min(tau * 2.0, kTauMax);
                break;
            }
            tau *= opts.backtrack;
        }
        if (!accepted) {
            rep.residual_grad = res;
            rep.residual_P = resP;
            rep.message = "line search stalled before reaching tol_grad";
            break;
        }
        push_trace(rep.trace, iter, eb.I, eb.P, stride);
    }
    if (iter > opts.max_iter) {
        iter = opts.max_iter;
        rep.message = "iteration cap reached";
        const Field grad = eval_gradient(u, g, prm);
        rep.residual_grad = tangent_residual(g, u, grad, eb.components, prm);
        rep.residual_P = std::abs(eb.P) / (1.0 + eb.components.kinetic);
    }
    rep.trace.push_back({iter, eb.I, eb.P});
    rep.iterations = iter;
    rep.state = std::move(u);
    rep.breakdown = eb;
    return rep;
}

// ---- fiber-envelope engine (mountain pass / Pc maximizer) ----

struct EnvelopeSetup {
    Field init;
    std::string level_name;
    bool maximize = false;
};

// Envelope value Psi at the Psi'' < 0 root; empty when the root is lost.
std::optional<double> envelope_value(const Functionals& f, const ProblemParams& prm) {
    const FiberCoefficients fc = FiberCoefficients::from(f, prm);
    const FiberRoots roots = fiber_roots(fc);
    if (!roots.t_u) return std::nullopt;
    return fiber_eval(fc, *roots.t_u).psi;
}

SolveReport run_envelope(const ProblemParams& prm, const RadialGrid& g, const SolveOptions& opts,
                         const EnvelopeSetup& setup) {
    opts.validate();
    SolveReport rep;
    rep.level_name = setup.level_name;
    const int stride = opts.trace_stride > 0 ? opts.trace_stride : auto_stride(opts.max_iter);
    const double c2 = prm.c * prm.c;
    const double sign = setup.maximize ? -1.0 : 1.0; // internally always descend sign*J

    Field u = normalize_mass(g, setup.init, prm.c);
    const bool positive_flow = nonneg_up_to_rounding(u);
    const std::vector<double> pot = confining_potential(g);
    double tau = opts.step0;
    long iter = 0;
    int root_losses = 0;

    Functionals f = eval_functionals(u, g, prm);
    for (iter = 1; iter <= opts.max_iter; ++iter) {
        FiberCoefficients fc = FiberCoefficients::from(f, prm);
        FiberRoots roots = fiber_roots(fc);
        if (!roots.t_u) {
            if (++root_losses > 20) {
                rep.message = "fiber root lost repeatedly during descent";
                break;
            }
            tau = std::max(kTauMin, tau * 0.25);
            rep.message = "fiber root lost; step reduced";
            continue;
        }
        double t = *roots.t_u;
        if (std::abs(t) > 1e-3) {
            // Re-center along the fiber so the iterate itself rides P = 0.
            u = dilate_normalized(g, u, t, prm.c);
            f = eval_functionals(u, g, prm);
            fc = FiberCoefficients::from(f, prm);
            roots = fiber_roots(fc);
            if (!roots.t_u) {
                rep.message = "fiber root lost after re-centering";
                break;
            }
            t = *roots.t_u;
        }
        const double Jval = fiber_eval(fc, t).psi;
        const double P_u = fc.a - fc.b - fc.d;
        push_trace(rep.trace, iter - 1, Jval, P_u, stride);

        // Gradient of the envelope, pulled back by the inverse dilation.
        const bool at_center = std::abs(t) < 1e-10;
        Field v = at_center ? u : scale_field(g, u, t).field;
        Field gI = eval_gradient(v, g, prm);
        Field gJ = at_center ? gI : scale_field(g, gI, -t).field;
        Field gtan = tangent_project(g, gJ, u, c2);

        const Functionals fv = at_center ? f : eval_functionals(v, g, prm);
        const double res = tangent_residual(g, v, gI, fv, prm);
        const double resP = std::abs(P_u) / (1.0 + f.kinetic);
        if (res < opts.tol_grad && std::abs(t) < 1e-8) {
            rep.converged = resP < opts.tol_P;
            rep.residual_grad = res;
            rep.residual_P = resP;
            if (!rep.converged) rep.message = "gradient converged but Pohozaev residual above tol_P";
            break;
        }

        Field dir = tangent_project(g, helmholtz_solve(g, gtan, 1.0, &pot), u, c2);
        const double slope = dot(g, gtan, dir);
        if (!(slope > 0.0)) {
            rep.message = "preconditioned direction lost slope";
            break;
        }

        bool accepted = false;
        while (tau >= kTauMin) {
            Field cand = u;
            const double dirsign = setup.maximize ? 1.0 : -1.0;
            for (int i = 0; i < g.M; ++i) cand.v[i] += dirsign * tau * dir.v[i];
            if (positive_flow) positive_project(cand);
            cand = normalize_mass(g, cand, prm.c);
            const Functionals fcand = eval_functionals(cand, g, prm);
            const std::optional<double> Jc = envelope_value(fcand, prm);
            const double want = kArmijo * tau * slope;
            const double noise = kEnergyNoise * (1.0 + std::abs(Jval));
            const bool ok = Jc && ((want > noise) ? (sign * *Jc <= sign * Jval - want)
                                                  : (sign * *Jc <= sign * Jval + noise));
            if (ok) {
                u = std::move(cand);
                f = fcand;
                accepted = true;
                tau = std::min(tau * 2.0, kTauMax);
                break;
            }
            tau *= opts.backtrack;
        }
        if (!accepted) {
            rep.residual_grad = res;
            rep.residual_P = resP;
            rep.message = "line search stalled before reaching tol_grad";
            break;
        }
    }
    if (iter > opts.max_iter) {
        iter = opts.max_iter;
        rep.message = "iteration cap reached";
    }

    // Final exact re-centering to the manifold point.
    {
        const FiberCoefficients fc = FiberCoefficients::from(f, prm);
        const FiberRoots roots = fiber_roots(fc);
        if (roots.t_u && std::abs(*roots.t_u) > 1e-10) {
            u = dilate_normalized(g, u, *roots.t_u, prm.c);
            f = eval_functionals(u, g, prm);
        }
    }
    EnergyBreakdown eb;
    eb.components = f;
    eb.I = assemble_I(f, prm);
    eb.P = assemble_P(f, prm);
    eb.lambda = (prm.alpha * f.entropy + prm.mu * f.lp - f.kinetic) / f.mass2;
    if (rep.converged) {
        const Field grad = eval_gradient(u, g, prm);
        rep.residual_grad = tangent_residual(g, u, grad, f, prm);
        rep.residual_P = std::abs(eb.P) / (1.0 + f.kinetic);
        rep.converged = rep.residual_grad < 10.0 * opts.tol_grad && rep.residual_P < opts.tol_P;
    }
    rep.trace.push_back({iter, eb.I, eb.P});
    rep.iterations = iter;
    rep.state = std::move(u);
    rep.breakdown = eb;
    return rep;
}

bool is_alpha(const ProblemParams& prm, double val) { return std::abs(prm.alpha - val) < 1e-12; }

} // namespace

void SolveOptions::validate() const {
    if (!(tol_grad > 0.0) || !(tol_P > 0.0)) throw error("SolveOptions: tolerances must be positive");
    if (!(backtrack > 0.0 && backtrack < 1.0)) throw error("SolveOptions: backtrack must be in (0,1)");
    if (!(step0 > 0.0)) throw error("SolveOptions: step0 must be positive");
    if (max_iter <= 0) throw error("SolveOptions: max_iter must be positive");
}

Field dilate_normalized(const RadialGrid& g, const Field& u, double s, double c) {
    Field out = u;
    double rem = s;
    while (std::abs(rem) > 5.0) {
        const double chunk = (rem > 0.0) ? 5.0 : -5.0;
        out = scale_field(g, out, chunk).field;
        rem -= chunk;
    }
    if (rem != 0.0) out = scale_field(g, out, rem).field;
    return normalize_mass(g, out, c);
}

SolveReport solve_global_min(const ProblemParams& prm, const RadialGrid& g,
                             const SolveOptions& opts, const Field* init) {
    prm.validate();
    if (!is_alpha(prm, 1.0))
        throw regime_error("solve_global_min: analyzed global-minimization regimes have alpha = 1");
    const double pbar = prm.p_mass_critical();
    const bool mass_crit = std::abs(prm.p - pbar) < 1e-12;
    if (prm.mu > 0.0) {
        if (mass_crit) {
            const double bound = *thresholds(prm).c_masscrit;
            if (!(prm.c < bound)) {
                std::ostringstream os;
                os << "solve_global_min: mass-critical gate violated, c = " << prm.c
                   << " >= " << bound;
                throw regime_error(os.str());
            }
        } else if (prm.p > pbar) {
            throw regime_error(
                "solve_global_min: inf I = -infinity for p gamma_p > 2; use local/mp levels");
        }
    }
    MinimizeSetup setup;
    setup.init = init ? *init : sample_gaussian(g, prm.c);
    setup.level_name = "m";
    return run_minimize(prm, g, opts, setup);
}

SolveReport solve_local_min(const ProblemParams& prm, const RadialGrid& g,
                            const SolveOptions& opts, const Field* init) {
    prm.validate();
    if (!is_alpha(prm, 1.0) || !(prm.mu > 0.0))
        throw regime_error("solve_local_min: requires alpha = 1 and mu > 0");
    if (!(prm.p_gamma() > 2.0) && !prm.sobolev_critical())
        throw regime_error("solve_local_min: requires p gamma_p > 2 or p = 2*");
    const Thresholds th = thresholds(prm);
    if (!(prm.c <= *th.c0)) {
        std::ostringstream os;
        os << "solve_local_min: c = " << prm.c << " exceeds c0 = " << *th.c0;
        throw regime_error(os.str());
    }
    MinimizeSetup setup;
    setup.level_name = "m_plus";
    setup.guard_enabled = true;
    setup.k0 = *th.k0;
    if (init) {
        setup.init = *init;
    } else {
        Field w0 = sample_gaussian(g, prm.c);
        const double K = kinetic_energy(g, w0);
        setup.init = (K > 0.2 * setup.k0)
                         ? dilate_normalized(g, w0, 0.5 * std::log(0.15 * setup.k0 / K), prm.c)
                         : std::move(w0);
    }
    return run_minimize(prm, g, opts, setup);
}

SolveReport solve_mountain_pass(const ProblemParams& prm, const RadialGrid& g,
                                const SolveOptions& opts, const Field* init) {
    prm.validate();
    if (!is_alpha(prm, 1.0) || !(prm.mu > 0.0))
        throw regime_error("solve_mountain_pass: requires alpha = 1 and mu > 0");
    if (!(prm.p_gamma() > 2.0) && !prm.sobolev_critical())
        throw regime_error("solve_mountain_pass: requires p gamma_p > 2 or p = 2*");
    const double c0 = c0_gate(prm);
    if (!(prm.c < c0)) {
        std::ostringstream os;
        os << "solve_mountain_pass: c = " << prm.c << " not below c0 = " << c0;
        throw regime_error(os.str());
    }
    EnvelopeSetup setup;
    setup.level_name = "m_minus";
    setup.maximize = false;
    if (init) {
        setup.init = *init;
        return run_envelope(prm, g, opts, setup);
    }
    Field w0 = sample_gaussian(g, prm.c);
    if (prm.sobolev_critical()) {
        // Bubble admixture seeds the concentration profile of the critical state.
        Field b = sample_bubble(g, 0.5, std::min(2.0, 0.125 * g.R));
        const double nw = norm2(g, w0), nb = norm2(g, b);
        for (int i = 0; i < g.M; ++i) w0.v[i] = w0.v[i] / nw + 0.3 * b.v[i] / nb;
    }
    setup.init = std::move(w0);
    return run_envelope(prm, g, opts, setup);
}

SolveReport solve_pc_max(const ProblemParams& prm, const RadialGrid& g,
                         const SolveOptions& opts, const Field* init) {
    prm.validate();
    if (!is_alpha(prm, -1.0) || !(prm.mu > 0.0))
        throw regime_error("solve_pc_max: requires alpha = -1 and mu > 0");
    if (!(prm.p_gamma() < 2.0))
        throw regime_error("solve_pc_max: requires 2 < p < 2 + 4/N");
    const double p_excl = 2.0 + 8.0 / (prm.N * (prm.N + 2.0));
    if (std::abs(prm.p - p_excl) < 1e-9)
        throw regime_error("solve_pc_max: p = 2 + 8/(N(N+2)) is excluded");
    const double D = D_gate(prm);
    if (!(prm.c >= D * (1.0 + opts.pcmax_margin))) {
        std::ostringstream os;
        os << "solve_pc_max: c = " << prm.c << " below D (1 + margin) = "
           << D * (1.0 + opts.pcmax_margin);
        throw regime_error(os.str());
    }
    EnvelopeSetup setup;
    setup.level_name = "M_max";
    setup.maximize = true;
    setup.init = init ? *init
                      : normalize_mass(g, weinstein_ground_state(prm.N, prm.p, g), prm.c);
    SolveReport rep = run_envelope(prm, g, opts, setup);
    for (double& x : rep.state.v) x = -std::abs(x); // non-positive representative
    return rep;
}

} // namespace lognls
