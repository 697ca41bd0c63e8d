#pragma once

#include <random>

#include "lognls/grid.hpp"

namespace lognls {

// Smooth random radial profile: a few Gaussian bumps with random centers,
// widths and signed amplitudes.  Deterministic for a fixed engine state.
Field random_smooth_field(const RadialGrid& g, std::mt19937_64& rng, int bumps = 6);

// Same, normalized onto the mass sphere S(c).
Field random_field_on_sphere(const RadialGrid& g, std::mt19937_64& rng, double c, int bumps = 6);

} // namespace lognls
