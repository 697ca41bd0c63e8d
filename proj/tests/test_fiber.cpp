#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lognls/constants.hpp"
#include "lognls/fiber.hpp"
#include "lognls/random_fields.hpp"

using namespace lognls;

TEST_CASE("dpsi at 0 equals P exactly") {
    RadialGrid g = build_grid(3, 12.0, 1024);
    ProblemParams prm{3, 1.0, 1.0, 4.0, 1.0};
    std::mt19937_64 rng(17);
    for (int k = 0; k < 100; ++k) {
        Field u = random_field_on_sphere(g, rng, prm.c);
        const Functionals f = eval_functionals(u, g, prm);
        const FiberCoefficients fc = FiberCoefficients::from(f, prm);
        const double P = assemble_P(f, prm);
        const double dpsi0 = fiber_eval(fc, 0.0).dpsi;
        CHECK(std::abs(dpsi0 - P) <= 1e-12 * (1.0 + std::abs(P)));
    }
}

TEST_CASE("mu = 0 fiber: closed-form unique root") {
    RadialGrid g = build_grid(3, 16.0, 2048);
    ProblemParams prm{3, 1.0, 0.0, 4.0, 1.0};
    Field u = normalize_mass(g, sample_gaussian(g, 1.0), 1.0);
    // dilate off the manifold so the root is nontrivial
    Field v = scale_field(g, u, 0.4).field;
    v = normalize_mass(g, v, 1.0);
    const Functionals f = eval_functionals(v, g, prm);
    const FiberCoefficients fc = FiberCoefficients::from(f, prm);
    const FiberRoots roots = fiber_roots(fc);
    REQUIRE(roots.kind == RootKind::single_min);
    REQUIRE(roots.s_u.has_value());
    const double s_closed = 0.5 * std::log(0.5 * prm.N * prm.c * prm.c / f.kinetic);
    CHECK(*roots.s_u == doctest::Approx(s_closed).epsilon(1e-10));
    CHECK(roots.dd_s > 0.0);
}

TEST_CASE("fiber psi matches resampled energies") {
    RadialGrid g = build_grid(3, 16.0, 4096);
    ProblemParams prm{3, 1.0, 1.0, 4.0, 1.0};
    Field u = sample_gaussian(g, 1.0);
    const Functionals f = eval_functionals(u, g, prm);
    const FiberCoefficients fc = FiberCoefficients::from(f, prm);
    for (double s : {-0.5, 0.5}) {
        Field su = scale_field(g, u, s).field;
        const double direct = assemble_I(eval_functionals(su, g, prm), prm);
        const double fib = fiber_eval(fc, s).psi;
        CHECK(std::abs(direct - fib) <= 1e-4 * (1.0 + std::abs(fib)));
    }
}

TEST_CASE("overflow guard") {
    FiberCoefficients fc;
    fc.a = 1.0;
    fc.b = 1.0;
    fc.d = 1.0;
    fc.p_gamma = 3.0;
    CHECK_THROWS_AS(fiber_eval(fc, 300.0), error);
}

TEST_CASE("supercritical Gaussian fiber has the Lemma-4.4 pair") {
    ProblemParams prm{3, 1.0, 1.0, 4.0, 1.0};
    prm.c = 0.5 * c0_gate(prm);
    RadialGrid g = build_grid(3, 16.0, 2048);
    Field u = sample_gaussian(g, prm.c);
    const Functionals f = eval_functionals(u, g, prm);
    const FiberCoefficients fc = FiberCoefficients::from(f, prm);
    const FiberRoots roots = fiber_roots(fc);
    REQUIRE(roots.kind == RootKind::pair);
    REQUIRE(roots.s_u.has_value());
    REQUIRE(roots.t_u.has_value());
    CHECK(*roots.s_u < *roots.t_u);
    CHECK(roots.dd_s > 0.0);
    CHECK(roots.dd_t < 0.0);

    // refining the scan grid must not change the root count
    for (int refine : {2, 4}) {
        const FiberRoots r2 = fiber_roots(fc, 4000 * refine + 1);
        CHECK(r2.kind == RootKind::pair);
        CHECK(*r2.s_u == doctest::Approx(*roots.s_u).epsilon(1e-9));
        CHECK(*r2.t_u == doctest::Approx(*roots.t_u).epsilon(1e-9));
    }
}

TEST_CASE("two roots for 100 random fields in the Lemma-4.4 regime") {
    ProblemParams prm{3, 1.0, 1.0, 4.0, 1.0};
    prm.c = 0.5 * c0_gate(prm);
    RadialGrid g = build_grid(3, 12.0, 768);
    std::mt19937_64 rng(2024);
    for (int k = 0; k < 100; ++k) {
        Field u = random_field_on_sphere(g, rng, prm.c);
        const FiberCoefficients fc =
            FiberCoefficients::from(eval_functionals(u, g, prm), prm);
        const FiberRoots roots = fiber_roots(fc);
        CHECK(roots.kind == RootKind::pair);
    }
}

TEST_CASE("alpha=-1, mu<=0: no roots, margin at least (N/2)c^2") {
    ProblemParams prm{3, -1.0, -1.0, 4.0, 1.3};
    RadialGrid g = build_grid(3, 12.0, 768);
    std::mt19937_64 rng(31);
    for (int k = 0; k < 50; ++k) {
        Field u = random_field_on_sphere(g, rng, prm.c);
        const FiberCoefficients fc =
            FiberCoefficients::from(eval_functionals(u, g, prm), prm);
        const FiberRoots roots = fiber_roots(fc);
        CHECK(roots.kind == RootKind::none);
        CHECK(roots.min_dpsi >= 0.5 * prm.N * prm.c * prm.c * (1.0 - 1e-12));
    }
}

TEST_CASE("root at the origin when P = 0 with ddpsi < 0") {
    FiberCoefficients fc;
    fc.p_gamma = 3.0;
    fc.a = 2.0;
    fc.b = 1.5;
    fc.d = fc.a - fc.b; // force dpsi(0) = 0
    fc.lp_term = fc.b / fc.p_gamma;
    fc.e0 = 0.0;
    const FiberPoint p0 = fiber_eval(fc, 0.0);
    REQUIRE(p0.dpsi == 0.0);
    REQUIRE(p0.ddpsi < 0.0);
    const FiberRoots roots = fiber_roots(fc);
    REQUIRE(roots.t_u.has_value());
    CHECK(std::abs(*roots.t_u) < 1e-9);
}

TEST_CASE("membership classification") {
    RadialGrid g = build_grid(3, 16.0, 4096);
    ProblemParams prm{3, 1.0, 0.0, 4.0, 1.0};
    Field w0 = sample_gaussian(g, 1.0);
    // Gausson at mu=0 has P = 0 and Psi''(0) = 2a > 0: member of P+
    CHECK(classify_membership(w0, g, prm, 1e-4) == Membership::Pplus);

    Field off = normalize_mass(g, scale_field(g, w0, 1.0).field, prm.c);
    CHECK(classify_membership(off, g, prm, 1e-4) == Membership::off);

    Field offmass = w0;
    for (double& x : offmass.v) x *= 1.5;
    CHECK(classify_membership(offmass, g, prm) == Membership::off);
}

TEST_CASE("no Pzero below c0") {
    ProblemParams prm{3, 1.0, 1.0, 4.0, 1.0};
    prm.c = 0.5 * c0_gate(prm);
    RadialGrid g = build_grid(3, 12.0, 768);
    std::mt19937_64 rng(8);
    for (int k = 0; k < 100; ++k) {
        Field u = random_field_on_sphere(g, rng, prm.c);
        CHECK(classify_membership(u, g, prm) != Membership::Pzero);
    }
}

TEST_CASE("projection: trivial when already on the branch; closed form at mu=0") {
    RadialGrid g = build_grid(3, 16.0, 4096);
    ProblemParams prm{3, 1.0, 0.0, 4.0, 1.0};
    Field u = sample_gaussian(g, 1.0);
    // mu=0: unique plus-type root; projection must land on the closed form
    Field v = normalize_mass(g, scale_field(g, u, 0.5).field, prm.c);
    const Functionals fv = eval_functionals(v, g, prm);
    const double s_closed = 0.5 * std::log(0.5 * prm.N * prm.c * prm.c / fv.kinetic);
    Projection pr = project_to_manifold(v, g, prm, Branch::plus);
    CHECK(pr.root == doctest::Approx(s_closed).epsilon(1e-9));
    CHECK(pr.drift < 1e-4);
    CHECK_THROWS_AS(project_to_manifold(v, g, prm, Branch::minus), error);
}

TEST_CASE("plus-projection lowers I for off-manifold fields in V_k0") {
    ProblemParams prm{3, 1.0, 1.0, 4.0, 1.0};
    prm.c = 0.5 * c0_gate(prm);
    RadialGrid g = build_grid(3, 16.0, 2048);
    const Thresholds th = thresholds(prm);
    Field u = sample_gaussian(g, prm.c);
    // dilate down so kinetic < k0 but P != 0
    Field v = normalize_mass(g, scale_field(g, u, -0.5).field, prm.c);
    const Functionals f = eval_functionals(v, g, prm);
    REQUIRE(f.kinetic < *th.k0);
    Projection pr = project_to_manifold(v, g, prm, Branch::plus);
    CHECK(pr.evaluated_I < assemble_I(f, prm));
}
