#include "lognls/fiber.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace lognls {

double FiberCoefficients::scale() const { return a + std::abs(b) + std::abs(d); }

FiberCoefficients FiberCoefficients::from(const Functionals& f, const ProblemParams& prm) {
    FiberCoefficients fc;
    fc.a = f.kinetic;
    fc.b = prm.mu * prm.gamma_p() * f.lp;
    fc.d = 0.5 * prm.N * prm.alpha * prm.c * prm.c;
    fc.lp_term = (prm.mu / prm.p) * f.lp;
    fc.e0 = 0.5 * prm.alpha * f.mass2 - 0.5 * prm.alpha * f.entropy - fc.lp_term;
    fc.p_gamma = prm.p_gamma();
    return fc;
}

namespace {

void check_range(const FiberCoefficients& fc, double s) {
    if (std::abs(s) * std::max(2.0, fc.p_gamma) > 700.0)
        throw error("fiber_eval: s out of floating range");
}

// sign of Psi' at -inf / +inf from the dominant term; 0 when the limit is 0.
int sign_minus_inf(const FiberCoefficients& fc) {
    if (fc.d != 0.0) return fc.d > 0.0 ? -1 : 1;
    // d = 0: the slowest-decaying exponential wins
    if (fc.p_gamma < 2.0 && fc.b != 0.0) return fc.b > 0.0 ? -1 : 1;
    if (fc.a > 0.0) return 1;
    if (fc.b != 0.0) return fc.b > 0.0 ? -1 : 1;
    return 0;
}

int sign_plus_inf(const FiberCoefficients& fc) {
    if (fc.p_gamma > 2.0 && fc.b != 0.0) return fc.b > 0.0 ? -1 : 1;
    if (fc.p_gamma == 2.0) {
        const double lead = fc.a - fc.b;
        if (lead != 0.0) return lead > 0.0 ? 1 : -1;
        return fc.d > 0.0 ? -1 : (fc.d < 0.0 ? 1 : 0);
    }
    if (fc.a > 0.0) return 1;
    if (fc.b != 0.0) return fc.b > 0.0 ? -1 : 1;
    return fc.d > 0.0 ? -1 : (fc.d < 0.0 ? 1 : 0);
}

struct PolishedRoot {
    double s;
    double ddpsi;
};

PolishedRoot polish(const FiberCoefficients& fc, double lo, double hi, double tol) {
    double flo = fiber_eval(fc, lo).dpsi;
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const FiberPoint pt = fiber_eval(fc, s);
        if (std::abs(pt.dpsi) < tol) break;
        double step = (pt.ddpsi != 0.0) ? -pt.dpsi / pt.ddpsi : 0.0;
        double snew = s + step;
        if (!(snew > lo && snew < hi) || step == 0.0) snew = 0.5 * (lo + hi);
        const double fnew = fiber_eval(fc, snew).dpsi;
        if ((fnew > 0.0) == (flo > 0.0)) {
            lo = snew;
            flo = fnew;
        } else {
            hi = snew;
        }
        s = snew;
        if (hi - lo < 1e-16 * (1.0 + std::abs(s))) break;
    }
    return {s, fiber_eval(fc, s).ddpsi};
}

bool analyzed_regime(const FiberCoefficients& fc) {
    if (fc.d > 0.0) return true;                       // alpha > 0, all cases in scope
    if (fc.d < 0.0) {
        if (fc.b <= 0.0) return true;                  // mu <= 0 nonexistence
        return fc.p_gamma <= 2.0;                      // section-7 subcritical / mass-critical
    }
    return false;                                      // alpha = 0 not analyzed
}

} // namespace

FiberPoint fiber_eval(const FiberCoefficients& fc, double s) {
    check_range(fc, s);
    const double e2 = std::exp(2.0 * s);
    const double ep = (fc.b != 0.0 || fc.lp_term != 0.0) ? std::exp(fc.p_gamma * s) : 0.0;
    FiberPoint pt;
    pt.psi = 0.5 * fc.a * e2 + fc.e0 + fc.lp_term * (1.0 - ep) - fc.d * s;
    pt.dpsi = fc.a * e2 - fc.b * ep - fc.d;
    pt.ddpsi = 2.0 * fc.a * e2 - fc.p_gamma * fc.b * ep;
    return pt;
}

FiberRoots fiber_roots(const FiberCoefficients& fc, int samples, double s_lo, double s_hi) {
    FiberRoots out;
    const double tol = 1e-12 * std::max(fc.scale(), 1e-300);
    const double tangency_tol = 1e-9 * std::max(fc.scale(), 1e-300);
    const double s_cap = 700.0 / std::max(2.0, fc.p_gamma) - 1.0;

    std::vector<double> ss(samples), vv(samples);
    const double ds = (s_hi - s_lo) / (samples - 1);
    for (int i = 0; i < samples; ++i) {
        ss[i] = s_lo + i * ds;
        vv[i] = fiber_eval(fc, ss[i]).dpsi;
    }
    out.min_dpsi = *std::min_element(vv.begin(), vv.end());

    // Interior stationary point of Psi' has a closed form when a, b > 0.
    double s_star = std::numeric_limits<double>::quiet_NaN();
    if (fc.a > 0.0 && fc.b > 0.0 && fc.p_gamma != 2.0) {
        s_star = std::log(fc.p_gamma * fc.b / (2.0 * fc.a)) / (2.0 - fc.p_gamma);
        if (std::abs(s_star) < s_cap)
            out.min_dpsi = std::min(out.min_dpsi, fiber_eval(fc, s_star).dpsi);
        else
            s_star = std::numeric_limits<double>::quiet_NaN();
    }

    std::vector<PolishedRoot> roots;
    for (int i = 0; i + 1 < samples; ++i) {
        if (vv[i] == 0.0) {
            roots.push_back({ss[i], fiber_eval(fc, ss[i]).ddpsi});
        } else if (vv[i] * vv[i + 1] < 0.0) {
            roots.push_back(polish(fc, ss[i], ss[i + 1], tol));
        }
    }
    if (vv[samples - 1] == 0.0)
        roots.push_back({ss[samples - 1], fiber_eval(fc, ss[samples - 1]).ddpsi});

    // A sign mismatch against the asymptote means a root escaped the window.
    const int sgl = sign_minus_inf(fc);
    if (sgl != 0 && vv.front() != 0.0 && (vv.front() > 0.0) != (sgl > 0)) {
        double hi = s_lo, lo = s_lo, width = 1.0;
        while (lo > -s_cap) {
            lo = std::max(-s_cap, lo - width);
            width *= 2.0;
            if ((fiber_eval(fc, lo).dpsi > 0.0) == (sgl > 0)) {
                roots.push_back(polish(fc, lo, hi, tol));
                break;
            }
            hi = lo;
        }
    }
    const int sgr = sign_plus_inf(fc);
    if (sgr != 0 && vv.back() != 0.0 && (vv.back() > 0.0) != (sgr > 0)) {
        double lo = s_hi, hi = s_hi, width = 1.0;
        while (hi < s_cap) {
            hi = std::min(s_cap, hi + width);
            width *= 2.0;
            if ((fiber_eval(fc, hi).dpsi > 0.0) == (sgr > 0)) {
                roots.push_back(polish(fc, lo, hi, tol));
                break;
            }
            lo = hi;
        }
    }

    std::sort(roots.begin(), roots.end(),
              [](const PolishedRoot& x, const PolishedRoot& y) { return x.s < y.s; });

    for (const PolishedRoot& rt : roots) {
        if (rt.ddpsi > 0.0) {
            out.s_u = rt.s;
            out.dd_s = rt.ddpsi;
        } else {
            out.t_u = rt.s;
            out.dd_t = rt.ddpsi;
        }
    }

    if (roots.empty()) {
        // No crossing: report a tangency when Psi' grazes zero at its
        // interior stationary point (the degenerate c = c0 / c = D cases).
        out.kind = RootKind::none;
        if (std::isfinite(s_star)) {
            const double graze = fiber_eval(fc, s_star).dpsi;
            if (std::abs(graze) < tangency_tol) {
                out.kind = RootKind::tangent;
                out.tangency_s = s_star;
            }
        }
    } else if (roots.size() == 1) {
        out.kind = roots[0].ddpsi > 0.0 ? RootKind::single_min : RootKind::single_max;
    } else if (roots.size() == 2 && out.s_u && out.t_u) {
        out.kind = RootKind::pair;
    } else {
        out.kind = RootKind::unclassified;
    }

    if (!analyzed_regime(fc) && out.kind != RootKind::tangent)
        out.kind = RootKind::unclassified;
    return out;
}

Membership classify_membership(const Field& u, const RadialGrid& g, const ProblemParams& prm,
                               double tol_rel) {
    const Functionals f = eval_functionals(u, g, prm);
    const double nrm = std::sqrt(f.mass2);
    if (std::abs(nrm - prm.c) > 1e-8 * prm.c) return Membership::off;
    const FiberCoefficients fc = FiberCoefficients::from(f, prm);
    const double scale = std::max(fc.scale(), 1e-300);
    const double P = fc.a - fc.b - fc.d; // = Psi'(0) = assemble_P
    if (std::abs(P) >= tol_rel * scale) return Membership::off;
    const double dd0 = 2.0 * fc.a - fc.p_gamma * fc.b;
    if (std::abs(dd0) < tol_rel * scale) return Membership::Pzero;
    return dd0 > 0.0 ? Membership::Pplus : Membership::Pminus;
}

Projection project_to_manifold(const Field& u, const RadialGrid& g, const ProblemParams& prm,
                               Branch branch) {
    const Functionals f = eval_functionals(u, g, prm);
    const FiberCoefficients fc = FiberCoefficients::from(f, prm);
    const FiberRoots roots = fiber_roots(fc);
    const std::optional<double>& want = (branch == Branch::plus) ? roots.s_u : roots.t_u;
    if (!want)
        throw error(branch == Branch::plus
                        ? "project_to_manifold: plus branch absent on this fiber"
                        : "project_to_manifold: minus branch absent on this fiber");
    Projection pr;
    pr.root = *want;
    pr.predicted_I = fiber_eval(fc, pr.root).psi;
    if (std::abs(pr.root) < 1e-12) {
        pr.field = u;
    } else {
        pr.field = normalize_mass(g, scale_field(g, u, pr.root).field, prm.c);
    }
    pr.evaluated_I = assemble_I(eval_functionals(pr.field, g, prm), prm);
    pr.drift = std::abs(pr.evaluated_I - pr.predicted_I) / std::max(1.0, std::abs(pr.predicted_I));
    pr.warn = pr.drift > 1e-4;
    return pr;
}

} // namespace lognls
