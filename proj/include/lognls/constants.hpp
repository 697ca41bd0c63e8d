#pragma once

#include <optional>
#include <vector>

#include "lognls/model.hpp"

namespace lognls {

// Dense shooting solution of Q'' + (N-1)/r Q' - Q + Q^{p-1} = 0, Q'(0) = 0,
// positive and decaying.  Integrals are Simpson sums on the dense samples,
// so the Gagliardo-Nirenberg constant carries no grid dependence.
struct WeinsteinProfile {
    int N = 0;
    double p = 0.0;
    double q0 = 0.0;          // shooting value Q(0)
    double step = 0.0;        // uniform sample spacing
    std::vector<double> q;    // samples at r_k = k * step, zero beyond r_cut
    double r_cut = 0.0;
    double mass2 = 0.0;
    double kinetic = 0.0;
    double lp = 0.0;
    double ode_residual = 0.0; // discrete-L2 defect of the samples
    double C = 0.0;            // best GN constant

    double value(double r) const; // monotone cubic evaluation
};

// Cached per (N, p).  Throws when the bracket cannot be established or the
// bisection fails to converge.
const WeinsteinProfile& weinstein_profile(int N, double p);

// GN-normalized representative (||grad Q||_2 = ||Q||_2) sampled on g.
Field weinstein_ground_state(int N, double p, const RadialGrid& g);

// Best constant of ||u||_p <= C ||grad u||_2^{gamma_p} ||u||_2^{1-gamma_p},
// 2 < p < 2N/(N-2).
double gn_constant(int N, double p);

// Best Sobolev constant via the cutoff-bubble Rayleigh quotient on domains
// R in {20, 40, 80}, Richardson-extrapolated in R^{-(N-2)}.  N >= 3.
double sobolev_constant(int N);

// Raw bubble quotient ||grad u||^2 / ||u||_{2*}^2 on one domain; exposed for
// the convergence-trend checks.
double bubble_quotient(int N, double R, double eps);

struct Thresholds {
    double gamma_p = 0.0;
    std::optional<double> C_gn;       // 2 < p <= 2* (identified with S^{-1/2} at 2*)
    std::optional<double> S_sob;      // p = 2*
    std::optional<double> k0;         // p gamma_p > 2 (N^2 c^2 / 4 at p = 2*)
    std::optional<double> c0;         // mass gate, mu > 0, p gamma_p > 2 or p = 2*
    std::optional<double> D;          // alpha = -1 mass gate, mu > 0, p gamma_p < 2
    std::optional<double> c_masscrit; // p = 2 + 4/N bound of the (iii)/(i) theorems
};

// Fills every applicable gate; inapplicable fields stay empty.
Thresholds thresholds(const ProblemParams& prm);

// Gate accessors that insist on applicability.
double c0_gate(const ProblemParams& prm); // throws for p gamma_p <= 2 below 2*, or mu <= 0
double D_gate(const ProblemParams& prm);  // throws for p gamma_p >= 2 or mu <= 0

} // namespace lognls
