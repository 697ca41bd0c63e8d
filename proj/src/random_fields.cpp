#include "lognls/random_fields.hpp"

#include <cmath>

namespace lognls {

Field random_smooth_field(const RadialGrid& g, std::mt19937_64& rng, int bumps) {
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    std::uniform_real_distribution<double> pos(0.0, g.R / 3.0);
    std::uniform_real_distribution<double> width(g.R / 40.0, g.R / 8.0);
    Field u = make_field(g);
    for (int b = 0; b < bumps; ++b) {
        const double a = amp(rng);
        const double r0 = pos(rng);
        const double wdt = width(rng);
        for (int i = 0; i < g.M; ++i) {
            const double z = (g.r[i] - r0) / wdt;
            // mirrored bump keeps the profile smooth through the axis
            const double zm = (g.r[i] + r0) / wdt;
            u.v[i] += a * (std::exp(-0.5 * z * z) + std::exp(-0.5 * zm * zm));
        }
    }
    return u;
}

Field random_field_on_sphere(const RadialGrid& g, std::mt19937_64& rng, double c, int bumps) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        Field u = random_smooth_field(g, rng, bumps);
        if (norm2(g, u) > 1e-12) return normalize_mass(g, u, c);
    }
    throw error("random_field_on_sphere: degenerate draws");
}

} // namespace lognls
