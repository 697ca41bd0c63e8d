#pragma once

#include <string>
#include <vector>

#include "lognls/constants.hpp"
#include "lognls/fiber.hpp"

namespace lognls {

struct SolveOptions {
    double tol_grad = 1e-8;   // tangent-gradient L2 norm, relative to c
    double tol_P = 1e-6;      // |P| / (1 + kinetic)
    long max_iter = 200000;
    double step0 = 1e-2;
    double backtrack = 0.5;
    std::uint64_t seed = 0;

    double guard_margin = 0.05; // V_{k0} guard trips at kinetic > (1-margin) k0
    int guard_cap = 100;
    double pcmax_margin = 0.02; // c >= D (1 + margin) required
    int trace_stride = 0;       // 0 = choose automatically

    void validate() const;
};

struct TracePoint {
    long iter = 0;
    double I = 0.0;
    double P = 0.0;
};

struct SolveReport {
    Field state;
    EnergyBreakdown breakdown;
    std::string level_name; // m, m_plus, m_minus, M_max
    long iterations = 0;
    double residual_grad = 0.0; // ||grad I + lambda u||_2 / ||u||_2
    double residual_P = 0.0;    // |P| / (1 + kinetic)
    bool converged = false;
    std::vector<TracePoint> trace;
    std::string message;
};

// Global minimizer m(c): projected, preconditioned gradient descent from the
// Gausson, with backtracking that enforces monotone energy descent.  Refuses
// (regime_error) outside the coercive regimes.  A non-null init overrides the
// default start (warm starts for continuation runs).
SolveReport solve_global_min(const ProblemParams& prm, const RadialGrid& g,
                             const SolveOptions& opts, const Field* init = nullptr);

// Local minimizer m+(c) = m_c on V_{k0}: same flow started at a low-kinetic
// Gaussian, guarded by a negative fiber rescaling whenever the kinetic energy
// approaches k0.
SolveReport solve_local_min(const ProblemParams& prm, const RadialGrid& g,
                            const SolveOptions& opts, const Field* init = nullptr);

// Mountain-pass state m-(c): descent of the fiber-envelope J-(u) = I(t_u * u)
// over S(c); the envelope derivative identity makes this a plain descent.
SolveReport solve_mountain_pass(const ProblemParams& prm, const RadialGrid& g,
                                const SolveOptions& opts, const Field* init = nullptr);

// alpha = -1 constrained maximizer M(c) on the Pohozaev manifold: ascent of
// the envelope through the root with the larger fiber energy.  The reported
// state is sign-normalized to -|u|.
SolveReport solve_pc_max(const ProblemParams& prm, const RadialGrid& g,
                         const SolveOptions& opts, const Field* init = nullptr);

// Dilation by arbitrary s, applied in |s| <= 5 chunks (scale_field caps the
// single-step range), then exact renormalization to mass c.
Field dilate_normalized(const RadialGrid& g, const Field& u, double s, double c);

} // namespace lognls
