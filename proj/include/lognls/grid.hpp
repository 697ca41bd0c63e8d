#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lognls/errors.hpp"

namespace lognls {

// Cell-centered radial mesh: nodes r_i = (i+1/2)h with h = R/M, quadrature
// weights w_i = sigma_{N-1} r_i^{N-1} h.  Cell faces sit at integer multiples
// of h, so r = 0 never appears as a node and the axis needs no special case.
struct RadialGrid {
    int N = 0;
    double R = 0.0;
    int M = 0;
    double h = 0.0;
    std::vector<double> r;
    std::vector<double> w;
    std::uint64_t tag = 0;

    // Surface area of the unit sphere, 2 pi^{N/2} / Gamma(N/2).
    double surface = 0.0;
};

RadialGrid build_grid(int N, double R, int M);

// Real radial profile sampled on a RadialGrid.  Carries the grid tag so that
// mixing fields across grids is rejected.
struct Field {
    std::vector<double> v;
    std::uint64_t grid_tag = 0;
};

Field make_field(const RadialGrid& g, double value = 0.0);
void require_match(const RadialGrid& g, const Field& u);

// Compensated quadrature of nodal samples against the grid weights.
double integrate_nodal(const RadialGrid& g, const std::vector<double>& f);
double dot(const RadialGrid& g, const Field& a, const Field& b);
double mass2(const RadialGrid& g, const Field& u);
double norm2(const RadialGrid& g, const Field& u);

// |grad u|_2^2 as the face-difference sum.  By construction this equals
// <laplacian_apply(u), u> up to rounding (summation by parts).
double kinetic_energy(const RadialGrid& g, const Field& u);

// Conservative flux-form -Delta with zero flux at r = 0 and Dirichlet u(R)=0.
Field laplacian_apply(const RadialGrid& g, const Field& u);

// Solves (shift + q(r) - Delta) z = rhs with the same boundary conventions
// and an optional nonnegative nodal potential q.  Tridiagonal Thomas solve;
// used as the descent preconditioner.
Field helmholtz_solve(const RadialGrid& g, const Field& rhs, double shift = 1.0,
                      const std::vector<double>* potential = nullptr);

struct ScaledField {
    Field field;
    double mass_drift = 0.0; // | ||s*u||^2 - ||u||^2 | / ||u||^2
    bool resolution_warning = false;
};

// Mass-preserving dilation s*u = e^{Ns/2} u(e^s r), resampled by monotone
// cubic interpolation.  Values requested beyond R are zero.  s = 0 returns
// the input verbatim.  No renormalization is applied; the drift is reported.
ScaledField scale_field(const RadialGrid& g, const Field& u, double s, double s_max = 6.0);

Field normalize_mass(const RadialGrid& g, const Field& u, double c);

// w0 = c pi^{-N/4} e^{-r^2/2}
Field sample_gaussian(const RadialGrid& g, double c);

// Cutoff Talenti bubble, eps-parametrized, N >= 3.  The cutoff transitions
// smoothly on [cutoff, 2*cutoff].
Field sample_bubble(const RadialGrid& g, double eps, double cutoff);

// Two-column text (r_i, u_i) with a "# N R M" header.
void save_field(const RadialGrid& g, const Field& u, const std::string& path);
std::pair<RadialGrid, Field> load_field(const std::string& path);

// Monotone cubic (Fritsch-Carlson) interpolant on strictly increasing nodes.
struct Pchip {
    std::vector<double> x, y, d;
    void build(std::vector<double> xs, std::vector<double> ys);
    double operator()(double xq) const;
};

} // namespace lognls
