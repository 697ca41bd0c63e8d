#pragma once

#include <optional>

#include "lognls/model.hpp"

namespace lognls {

// Scalar coefficients of the fiber map Psi_u(s) = I(s*u):
//   Psi(s)   = a/2 e^{2s} + e0 + lp_term (1 - e^{pg s}) - d s
//   Psi'(s)  = a e^{2s} - b e^{pg s} - d
//   Psi''(s) = 2a e^{2s} - pg b e^{pg s}
// with a = kinetic, b = mu gamma_p lp, d = (N/2) alpha c^2,
// lp_term = (mu/p) lp and e0 the s-independent remainder of I.
struct FiberCoefficients {
    double a = 0.0;
    double b = 0.0;
    double d = 0.0;
    double e0 = 0.0;
    double lp_term = 0.0;
    double p_gamma = 0.0;

    double scale() const; // a + |b| + |d|, the natural residual scale

    static FiberCoefficients from(const Functionals& f, const ProblemParams& prm);
};

struct FiberPoint {
    double psi = 0.0;
    double dpsi = 0.0;
    double ddpsi = 0.0;
};

// Throws a range error when |s| max(2, pg) > 700 (exp overflow).
FiberPoint fiber_eval(const FiberCoefficients& fc, double s);

enum class RootKind {
    none,        // Psi' has no zero
    single_min,  // one zero, Psi'' > 0 there
    single_max,  // one zero, Psi'' < 0 there
    tangent,     // Psi' touches zero without a sign change
    pair,        // two zeros, one of each signature
    unclassified // regime outside the analyzed cases; scan result only
};

struct FiberRoots {
    RootKind kind = RootKind::none;
    std::optional<double> s_u;   // root with Psi'' > 0
    std::optional<double> t_u;   // root with Psi'' < 0
    double dd_s = 0.0;           // Psi'' at s_u
    double dd_t = 0.0;           // Psi'' at t_u
    double min_dpsi = 0.0;       // minimum of Psi' over the scan (margin diagnostics)
    double tangency_s = 0.0;     // location of the near-tangency when kind == tangent
};

// Sign-change bracketing on a uniform s-scan, safeguarded Newton polish to
// |Psi'| < 1e-12 * scale.  Roots pushed outside the scan window by extreme
// coefficients are recovered by bracket expansion; the asymptotic signs of
// Psi' decide whether such a root exists.
FiberRoots fiber_roots(const FiberCoefficients& fc, int samples = 4001,
                       double s_lo = -20.0, double s_hi = 20.0);

enum class Membership { Pplus, Pzero, Pminus, off };

// |P| < tol_rel * scale picks manifold membership, then the sign of Psi''(0);
// Pzero additionally requires |Psi''(0)| < tol_rel * scale.  Fields off the
// mass constraint (1e-8 relative) classify as off.
Membership classify_membership(const Field& u, const RadialGrid& g, const ProblemParams& prm,
                               double tol_rel = 1e-8);

enum class Branch { plus, minus };

struct Projection {
    Field field;          // s*u, exactly renormalized to mass c
    double root = 0.0;
    double predicted_I = 0.0; // fiber value Psi(root)
    double evaluated_I = 0.0; // quadrature of the resampled field
    double drift = 0.0;       // relative disagreement of the two
    bool warn = false;        // drift above 1e-4
};

// Projects u onto the Pohozaev manifold along its fiber: plus selects the
// Psi'' > 0 root, minus the Psi'' < 0 one.  Throws when the branch is absent.
Projection project_to_manifold(const Field& u, const RadialGrid& g, const ProblemParams& prm,
                               Branch branch);

} // namespace lognls
