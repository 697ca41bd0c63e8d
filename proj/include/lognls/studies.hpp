#pragma once

#include <string>
#include <vector>

#include "lognls/solvers.hpp"

namespace lognls {

struct ContinuationReport {
    std::vector<double> mus;
    std::vector<double> errors_H1;  // ||u_mu - w0|| in the kinetic+mass norm
    std::vector<double> lambda_gap; // |lambda_mu - lambda0|
    std::vector<double> energy_gap; // |I_mu - m0(c)|
    std::vector<bool> solved;       // per-member success markers
    bool monotone = true;           // all gap sequences non-increasing (5% slack)
};

// Warm-started solves along the mu ladder (decreasing |mu| recommended),
// compared against the exact mu = 0 Gausson.  alpha must be 1; the solver
// level (global vs local) is picked per regime.
ContinuationReport continuation_mu_to_zero(const ProblemParams& prm_base, const RadialGrid& g,
                                           const std::vector<double>& mus,
                                           const SolveOptions& opts);

struct ScanReport {
    int trials = 0;
    double min_margin = 0.0; // global minimum over trials of min_s Psi'_u(s)
    bool pass = false;       // margin > 0 for every trial
    std::vector<double> margins;
};

// Randomized nonexistence scan for alpha = -1 under the hypotheses of the
// no-critical-point theorems: PASS means every sampled fiber has strictly
// increasing energy (min Psi' > 0).
ScanReport nonexistence_scan(const ProblemParams& prm, const RadialGrid& g, int trials,
                             std::uint64_t seed);

struct DemoPoint {
    int n = 0;
    double I = 0.0;
    double P = 0.0;
    double mass2 = 0.0;
    double bump_kinetic = 0.0;
};

struct DemoReport {
    std::vector<DemoPoint> points;
    double floor = 0.0;
    bool pass = false;      // I dipped below the floor with P <= 0 throughout
    std::string message;
};

struct DemoOptions {
    int n_max = 8;
    double floor = -1e3;
    double eta_fraction = 0.25; // eta = fraction * c^2 split off into the bump
    double rho0 = 0.0;          // innermost bump radius; 0 = auto
    double width0 = 8.0;        // bump width at n = 1
};

// Lemma-7.2-type unboundedness demonstration: a concentrated near-optimal
// core of mass c^2 - eta/2 with P < 0 plus a far annular bump of mass eta/2
// at radius ~ rho0 n^2 and width ~ width0 n; the spreading bump drives the
// entropy, hence I, to -infinity while P stays nonpositive and the mass exact.
DemoReport unboundedness_demo(const ProblemParams& prm, const RadialGrid& g,
                              const DemoOptions& dopts);

struct GapReport {
    double m_plus = 0.0;
    double m_minus = 0.0;
    double S = 0.0;
    double bound = 0.0;  // m_plus + mu^{-(N-2)/2} S^{N/2} / N
    double margin = 0.0; // bound - m_minus
    bool pass = false;
    SolveReport plus_report;
    SolveReport minus_report;
};

// Sobolev-critical strict gap m-(c) < m+(c) + mu^{-(N-2)/2} S^{N/2} / N.
GapReport critical_gap_check(const ProblemParams& prm, const RadialGrid& g,
                             const SolveOptions& opts);

struct RegimeEntry {
    double alpha = 0.0;
    int N = 0;
    double p = 0.0;
    double mu = 0.0;
    double c = 0.0;
    std::string verdict;
    std::string solver_level; // admissible CLI level, empty when none
};

// Formula-driven regime table; accepts raw values (no PDE work, so p beyond
// 2* is allowed as a query).
std::vector<RegimeEntry> regime_map(const std::vector<double>& alphas, const std::vector<int>& Ns,
                                    const std::vector<double>& ps, const std::vector<double>& mus,
                                    const std::vector<double>& cs);

struct GrowthProbeReport {
    double q = 0.0;
    double sup_ratio = 0.0;
    double arg_s = 0.0;
    bool interior = false;
    bool pass = false; // finite sup attained away from the range ends
};

// Empirical check of B(s) <= K_q s^q on a log-spaced s grid.
GrowthProbeReport growth_probe_B(int N, double q, double s_lo = 1e-12, double s_hi = 1e3,
                                 int samples = 20001);

} // namespace lognls
