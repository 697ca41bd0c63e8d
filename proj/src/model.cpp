#include "lognls/model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "lognls/summation.hpp"

namespace lognls {

namespace {
const double kSplit = std::exp(-3.0);   // branch point of A
const double kSplit4 = 4.0 * kSplit;
const double kSplit6 = std::exp(-6.0);

inline double s2logs2(double s) {
    const double t = s * s;
    return (t == 0.0) ? 0.0 : t * std::log(t);
}
} // namespace

double ProblemParams::p_critical() const {
    return (N <= 2) ? std::numeric_limits<double>::infinity()
                    : 2.0 * N / (N - 2.0);
}

bool ProblemParams::sobolev_critical() const {
    return N >= 3 && std::abs(p - p_critical()) < 1e-12;
}

void ProblemParams::validate() const {
    if (N < 2) throw error("ProblemParams: N must be >= 2");
    if (!(p > 2.0)) throw error("ProblemParams: p must exceed 2");
    if (N >= 3 && p > p_critical() + 1e-12)
        throw error("ProblemParams: p exceeds the critical exponent 2N/(N-2)");
    if (!(c > 0.0)) throw error("ProblemParams: c must be positive");
    if (!std::isfinite(alpha) || !std::isfinite(mu))
        throw error("ProblemParams: alpha and mu must be finite");
}

double entA_of(double s) {
    s = std::abs(s);
    if (s <= kSplit) return -s2logs2(s);
    return 3.0 * s * s + kSplit4 * s - kSplit6;
}

double entB_of(double s) {
    s = std::abs(s);
    if (s <= kSplit) return 0.0;
    return s2logs2(s) + 3.0 * s * s + kSplit4 * s - kSplit6;
}

Functionals eval_functionals(const Field& u, const RadialGrid& g, const ProblemParams& prm) {
    require_match(g, u);
    for (int i = 0; i < g.M; ++i)
        if (!std::isfinite(u.v[i]))
            throw error("eval_functionals: non-finite sample at node " + std::to_string(i));

    Functionals f;
    Accumulator am, ap, aa, ab, ae;
    for (int i = 0; i < g.M; ++i) {
        const double x = u.v[i];
        const double ax = std::abs(x);
        const double wi = g.w[i];
        am.add(wi * x * x);
        ap.add(wi * std::pow(ax, prm.p));
        aa.add(wi * entA_of(ax));
        ab.add(wi * entB_of(ax));
        ae.add(wi * s2logs2(ax));
    }
    f.mass2 = am.value();
    f.lp = ap.value();
    f.entA = aa.value();
    f.entB = ab.value();
    f.entropy_direct = ae.value();
    f.entropy = f.entB - f.entA;
    f.kinetic = kinetic_energy(g, u);
    return f;
}

double assemble_I(const Functionals& f, const ProblemParams& prm) {
    return 0.5 * f.kinetic + 0.5 * prm.alpha * f.mass2 - 0.5 * prm.alpha * f.entropy
           - (prm.mu / prm.p) * f.lp;
}

double assemble_P(const Functionals& f, const ProblemParams& prm) {
    return f.kinetic - prm.mu * prm.gamma_p() * f.lp - 0.5 * prm.N * prm.alpha * prm.c * prm.c;
}

EnergyBreakdown eval_energy(const Field& u, const RadialGrid& g, const ProblemParams& prm) {
    EnergyBreakdown eb;
    eb.components = eval_functionals(u, g, prm);
    eb.I = assemble_I(eb.components, prm);
    eb.P = assemble_P(eb.components, prm);
    const Functionals& f = eb.components;
    eb.lambda = (f.mass2 > 0.0)
                    ? (prm.alpha * f.entropy + prm.mu * f.lp - f.kinetic) / f.mass2
                    : std::numeric_limits<double>::quiet_NaN();
    return eb;
}

Field eval_gradient(const Field& u, const RadialGrid& g, const ProblemParams& prm) {
    require_match(g, u);
    for (int i = 0; i < g.M; ++i)
        if (!std::isfinite(u.v[i]))
            throw error("eval_gradient: non-finite sample at node " + std::to_string(i));
    Field grad = laplacian_apply(g, u);
    for (int i = 0; i < g.M; ++i) {
        const double x = u.v[i];
        if (x != 0.0) {
            const double ax = std::abs(x);
            grad.v[i] += -prm.alpha * x * std::log(x * x)
                         - prm.mu * std::pow(ax, prm.p - 2.0) * x;
        }
    }
    return grad;
}

double estimate_lambda(const Field& u, const RadialGrid& g, const ProblemParams& prm) {
    const Functionals f = eval_functionals(u, g, prm);
    if (!(f.mass2 > 0.0)) throw error("estimate_lambda: undefined multiplier, mass2 = 0");
    return (prm.alpha * f.entropy + prm.mu * f.lp - f.kinetic) / f.mass2;
}

double luxemburg_norm(const Field& u, const RadialGrid& g) {
    require_match(g, u);
    double umax = 0.0;
    for (double x : u.v) umax = std::max(umax, std::abs(x));
    if (umax == 0.0) return 0.0;

    auto intA = [&](double k) {
        Accumulator acc;
        for (int i = 0; i < g.M; ++i) acc.add(g.w[i] * entA_of(std::abs(u.v[i]) / k));
        return acc.value();
    };

    // integral A(|u|/k) is strictly decreasing in k; bracket, then bisect.
    double klo = umax, khi = umax;
    while (intA(klo) < 1.0) klo *= 0.5;
    while (intA(khi) > 1.0) khi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double km = 0.5 * (klo + khi);
        const double val = intA(km);
        if (std::abs(val - 1.0) < 1e-10) return km;
        (val > 1.0 ? klo : khi) = km;
        if ((khi - klo) < 1e-15 * khi) break;
    }
    return 0.5 * (klo + khi);
}

} // namespace lognls
