#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "lognls/grid.hpp"
#include "lognls/random_fields.hpp"

using namespace lognls;

TEST_CASE("weights sum to the ball volume") {
    // N=3: 4 pi/3; N=2: pi
    {
        RadialGrid g = build_grid(3, 1.0, 2048);
        double vol = 0.0;
        for (double w : g.w) vol += w;
        CHECK(vol == doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-3));
    }
    {
        RadialGrid g = build_grid(2, 1.0, 2048);
        double vol = 0.0;
        for (double w : g.w) vol += w;
        CHECK(vol == doctest::Approx(M_PI).epsilon(1e-3));
    }
}

TEST_CASE("Gaussian quadrature against pi^{N/2}") {
    RadialGrid g = build_grid(3, 10.0, 2048);
    std::vector<double> f(g.M);
    for (int i = 0; i < g.M; ++i) f[i] = std::exp(-g.r[i] * g.r[i]);
    const double val = integrate_nodal(g, f);
    CHECK(std::abs(val - std::pow(M_PI, 1.5)) / std::pow(M_PI, 1.5) < 1e-8);
}

TEST_CASE("build_grid rejects bad sizes") {
    CHECK_THROWS_AS(build_grid(1, 1.0, 128), error);
    CHECK_THROWS_AS(build_grid(3, -1.0, 128), error);
    CHECK_THROWS_AS(build_grid(3, 1.0, 32), error);
}

TEST_CASE("grid tag mismatch is rejected") {
    RadialGrid g1 = build_grid(3, 8.0, 128);
    RadialGrid g2 = build_grid(3, 8.0, 128);
    Field u = make_field(g1, 1.0);
    CHECK_THROWS_AS(mass2(g2, u), grid_mismatch);
}

TEST_CASE("laplacian of the truncated parabola is 2N/R^2 away from the axis") {
    for (int N : {2, 3}) {
        RadialGrid g = build_grid(N, 2.0, 1024);
        Field u = make_field(g);
        for (int i = 0; i < g.M; ++i) u.v[i] = 1.0 - g.r[i] * g.r[i] / (g.R * g.R);
        Field lap = laplacian_apply(g, u);
        const double expect = 2.0 * N / (g.R * g.R);
        for (int i = g.M / 10; i < g.M - g.M / 10; ++i)
            CHECK(lap.v[i] == doctest::Approx(expect).epsilon(1e-3));
    }
}

TEST_CASE("summation by parts: <(-Lap)u,u> equals the face-sum kinetic") {
    RadialGrid g = build_grid(3, 12.0, 1024);
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        Field u = random_smooth_field(g, rng);
        const double quad = dot(g, laplacian_apply(g, u), u);
        const double face = kinetic_energy(g, u);
        CHECK(std::abs(quad - face) <= 1e-11 * (1.0 + std::abs(face)));
        CHECK(face >= 0.0);
    }
}

TEST_CASE("laplacian is symmetric") {
    RadialGrid g = build_grid(2, 10.0, 512);
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        Field u = random_smooth_field(g, rng);
        Field v = random_smooth_field(g, rng);
        const double uv = dot(g, laplacian_apply(g, u), v);
        const double vu = dot(g, laplacian_apply(g, v), u);
        CHECK(std::abs(uv - vu) <= 1e-12 * norm2(g, u) * norm2(g, v) * 100);
    }
}

TEST_CASE("Gaussian kinetic energy closed form") {
    RadialGrid g = build_grid(3, 12.0, 2048);
    Field w0 = sample_gaussian(g, 1.0);
    CHECK(dot(g, laplacian_apply(g, w0), w0) == doctest::Approx(1.5).epsilon(1e-4));
    CHECK(mass2(g, w0) == doctest::Approx(1.0).epsilon(1e-8));
    // peak value c pi^{-N/4}
    CHECK(w0.v[0] == doctest::Approx(std::pow(M_PI, -0.75)).epsilon(1e-4));
}

TEST_CASE("scale_field: identity at s = 0 is bitwise") {
    RadialGrid g = build_grid(3, 12.0, 512);
    Field u = sample_gaussian(g, 1.0);
    ScaledField s0 = scale_field(g, u, 0.0);
    for (int i = 0; i < g.M; ++i) CHECK(s0.field.v[i] == u.v[i]);
}

TEST_CASE("scale_field: mass invariance and kinetic scaling") {
    RadialGrid g = build_grid(3, 16.0, 4096);
    Field u = sample_gaussian(g, 1.0);
    for (double s : {-1.0, -0.3, 0.3, 1.0}) {
        ScaledField su = scale_field(g, u, s);
        CHECK(su.mass_drift < 1e-6);
        const double K0 = kinetic_energy(g, u);
        const double Ks = kinetic_energy(g, su.field);
        CHECK(Ks == doctest::Approx(std::exp(2.0 * s) * K0).epsilon(1e-5));
    }
}

TEST_CASE("scale_field: group law within interpolation tolerance") {
    RadialGrid g = build_grid(3, 16.0, 4096);
    Field u = sample_gaussian(g, 1.0);
    const double s1 = 0.4, s2 = -0.7;
    Field a = scale_field(g, scale_field(g, u, s1).field, s2).field;
    Field b = scale_field(g, u, s1 + s2).field;
    double num = 0.0, den = 0.0;
    for (int i = 0; i < g.M; ++i) {
        num = std::max(num, std::abs(a.v[i] - b.v[i]));
        den = std::max(den, std::abs(b.v[i]));
    }
    CHECK(num / den < 1e-5);
}

TEST_CASE("scale_field: Lp scaling law e^{p gamma_p s}") {
    RadialGrid g = build_grid(3, 16.0, 4096);
    Field u = sample_gaussian(g, 1.0);
    const double p = 4.0, gamma = 3.0 * (p - 2.0) / (2.0 * p);
    auto lp = [&](const Field& f) {
        std::vector<double> x(g.M);
        for (int i = 0; i < g.M; ++i) x[i] = std::pow(std::abs(f.v[i]), p);
        return integrate_nodal(g, x);
    };
    const double s = 0.5;
    Field su = scale_field(g, u, s).field;
    CHECK(lp(su) == doctest::Approx(std::exp(p * gamma * s) * lp(u)).epsilon(1e-5));
}

TEST_CASE("scale_field rejects |s| beyond s_max") {
    RadialGrid g = build_grid(3, 8.0, 128);
    Field u = sample_gaussian(g, 1.0);
    CHECK_THROWS_AS(scale_field(g, u, 7.0), error);
}

TEST_CASE("normalize_mass") {
    RadialGrid g = build_grid(3, 10.0, 512);
    std::mt19937_64 rng(3);
    Field u = random_smooth_field(g, rng);
    Field n1 = normalize_mass(g, u, 2.0);
    CHECK(mass2(g, n1) == doctest::Approx(4.0).epsilon(1e-14));
    Field u2 = u;
    for (double& x : u2.v) x *= 2.0;
    Field n2 = normalize_mass(g, u2, 2.0);
    for (int i = 0; i < g.M; ++i) CHECK(n1.v[i] == doctest::Approx(n2.v[i]).epsilon(1e-14));
    Field z = make_field(g);
    CHECK_THROWS_AS(normalize_mass(g, z, 1.0), error);
}

TEST_CASE("bubble requires N >= 3 and approaches the Sobolev quotient") {
    RadialGrid g2 = build_grid(2, 8.0, 128);
    CHECK_THROWS_AS(sample_bubble(g2, 1.0, 2.0), error);

    // quotient at increasing R approaches ~5.478 from one side (N = 3)
    auto quotient = [](double R) {
        RadialGrid g = build_grid(3, R, static_cast<int>(R * 256));
        Field u = sample_bubble(g, 1.0, 0.5 * R);
        std::vector<double> six(g.M);
        for (int i = 0; i < g.M; ++i) six[i] = std::pow(std::abs(u.v[i]), 6.0);
        return kinetic_energy(g, u) / std::pow(integrate_nodal(g, six), 1.0 / 3.0);
    };
    const double q20 = quotient(20.0), q40 = quotient(40.0), q80 = quotient(80.0);
    CHECK(std::abs(q40 - 5.478) < std::abs(q20 - 5.478));
    CHECK(std::abs(q80 - 5.478) < std::abs(q40 - 5.478));
    CHECK(2.0 * q80 - q40 == doctest::Approx(5.478).epsilon(3e-3));
}

TEST_CASE("field save/load round trip") {
    RadialGrid g = build_grid(3, 9.0, 128);
    Field u = sample_gaussian(g, 1.3);
    const std::string path = "roundtrip_field.txt";
    save_field(g, u, path);
    auto [g2, u2] = load_field(path);
    CHECK(g2.N == g.N);
    CHECK(g2.M == g.M);
    CHECK(g2.R == doctest::Approx(g.R).epsilon(1e-16));
    for (int i = 0; i < g.M; ++i) CHECK(u2.v[i] == u.v[i]);
    std::remove(path.c_str());
}
