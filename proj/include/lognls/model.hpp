#pragma once

#include "lognls/grid.hpp"

namespace lognls {

// The problem quintuple (N, alpha, mu, p, c).  gamma_p = N(p-2)/(2p) drives
// every scaling law; p*gamma_p crosses 2 exactly at p = 2 + 4/N.
struct ProblemParams {
    int N = 3;
    double alpha = 1.0;
    double mu = 0.0;
    double p = 4.0;
    double c = 1.0;

    double gamma_p() const { return N * (p - 2.0) / (2.0 * p); }
    double p_gamma() const { return p * gamma_p(); }
    double p_critical() const;       // 2N/(N-2), +inf for N = 2
    double p_mass_critical() const { return 2.0 + 4.0 / N; }
    bool sobolev_critical() const;

    void validate() const;           // throws on N<2, p<=2, p>2*, c<=0
};

// A(s): convex nonnegative split of the entropy integrand.
// A(s) = -s^2 log s^2 on [0, e^-3], 3s^2 + 4e^-3 s - e^-6 beyond; the two
// branches meet with value 6e^-6 at s = e^-3.
double entA_of(double s);
// B(s) = s^2 log s^2 + A(s); identically 0 on [0, e^-3].
double entB_of(double s);

struct Functionals {
    double mass2 = 0.0;
    double kinetic = 0.0;
    double lp = 0.0;
    double entA = 0.0;
    double entB = 0.0;
    double entropy = 0.0;        // entB - entA (authoritative)
    double entropy_direct = 0.0; // direct quadrature of u^2 log u^2
};

struct EnergyBreakdown {
    double I = 0.0;
    double P = 0.0;
    double lambda = 0.0; // NaN when mass2 = 0
    Functionals components;
};

Functionals eval_functionals(const Field& u, const RadialGrid& g, const ProblemParams& prm);

// I = 1/2 kinetic + (alpha/2) mass2 - (alpha/2) entropy - (mu/p) lp
double assemble_I(const Functionals& f, const ProblemParams& prm);
// P = kinetic - mu gamma_p lp - (N/2) alpha c^2   (c from the params)
double assemble_P(const Functionals& f, const ProblemParams& prm);

EnergyBreakdown eval_energy(const Field& u, const RadialGrid& g, const ProblemParams& prm);

// Unconstrained L2 gradient of I: -Delta u - alpha u log u^2 - mu |u|^{p-2} u.
// The node value 0 contributes 0 to the log term.
Field eval_gradient(const Field& u, const RadialGrid& g, const ProblemParams& prm);

// Multiplier from testing the Euler-Lagrange equation against u:
// (alpha entropy + mu lp - kinetic) / mass2.  Throws when mass2 = 0.
double estimate_lambda(const Field& u, const RadialGrid& g, const ProblemParams& prm);

// Orlicz (Luxemburg) norm inf{k>0 : integral A(|u|/k) <= 1} by bisection.
double luxemburg_norm(const Field& u, const RadialGrid& g);

} // namespace lognls
