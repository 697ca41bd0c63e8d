#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lognls/model.hpp"
#include "lognls/random_fields.hpp"
#include "lognls/summation.hpp"

using namespace lognls;

namespace {

// direct single-pass quadrature of the full energy integrand, independent of
// the Functionals assembly path
double direct_energy(const Field& u, const RadialGrid& g, const ProblemParams& prm) {
    Accumulator acc;
    for (int i = 0; i < g.M; ++i) {
        const double x = u.v[i];
        const double x2 = x * x;
        const double ent = (x2 == 0.0) ? 0.0 : x2 * std::log(x2);
        acc.add(g.w[i] * (0.5 * prm.alpha * x2 - 0.5 * prm.alpha * ent -
                          (prm.mu / prm.p) * std::pow(std::abs(x), prm.p)));
    }
    return acc.value() + 0.5 * kinetic_energy(g, u);
}

double gausson_energy(int N, double c) {
    return 0.5 * c * c * (N + 1.0 + std::log(std::pow(M_PI, 0.5 * N) / (c * c)));
}

double gausson_lambda(int N, double c) {
    return -N - std::log(std::pow(M_PI, 0.5 * N) / (c * c));
}

} // namespace

TEST_CASE("A is continuous at the branch point with value 6e^-6") {
    const double s = std::exp(-3.0);
    const double left = -s * s * std::log(s * s);
    const double right = 3.0 * s * s + 4.0 * std::exp(-3.0) * s - std::exp(-6.0);
    CHECK(left == doctest::Approx(6.0 * std::exp(-6.0)).epsilon(1e-14));
    CHECK(right == doctest::Approx(6.0 * std::exp(-6.0)).epsilon(1e-14));
    CHECK(entA_of(s) == doctest::Approx(6.0 * std::exp(-6.0)).epsilon(1e-14));
    CHECK(entB_of(s) == doctest::Approx(0.0).epsilon(1e-18));
}

TEST_CASE("zero field gives zero functionals") {
    RadialGrid g = build_grid(3, 8.0, 256);
    ProblemParams prm{3, 1.0, 1.0, 4.0, 1.0};
    Field z = make_field(g);
    Functionals f = eval_functionals(z, g, prm);
    CHECK(f.mass2 == 0.0);
    CHECK(f.kinetic == 0.0);
    CHECK(f.lp == 0.0);
    CHECK(f.entA == 0.0);
    CHECK(f.entB == 0.0);
    CHECK(f.entropy == 0.0);
}

TEST_CASE("non-finite sample is rejected with its node index") {
    RadialGrid g = build_grid(3, 8.0, 256);
    ProblemParams prm{3, 1.0, 0.0, 4.0, 1.0};
    Field u = make_field(g, 1.0);
    u.v[17] = std::numeric_limits<double>::quiet_NaN();
    try {
        eval_functionals(u, g, prm);
        CHECK(false);
    } catch (const error& e) {
        CHECK(std::string(e.what()).find("17") != std::string::npos);
    }
}

TEST_CASE("Gaussian closed forms: mass, kinetic, entropy") {
    RadialGrid g = build_grid(3, 16.0, 4096);
    ProblemParams prm{3, 1.0, 0.0, 4.0, 1.0};
    Field w0 = sample_gaussian(g, 1.0);
    Functionals f = eval_functionals(w0, g, prm);
    CHECK(f.mass2 == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(f.kinetic == doctest::Approx(1.5).epsilon(1e-5));
    const double ent_exact = std::log(std::pow(M_PI, -1.5)) - 1.5; // c=1, N=3
    CHECK(ent_exact == doctest::Approx(-3.21709).epsilon(1e-5));
    CHECK(f.entropy == doctest::Approx(ent_exact).epsilon(1e-5));
    CHECK(std::abs(f.entropy - f.entropy_direct) <= 1e-10 * (1.0 + std::abs(f.entropy)));
}

TEST_CASE("plateau at e^-3 exercises both branches of A consistently") {
    RadialGrid g = build_grid(3, 4.0, 1024);
    ProblemParams prm{3, 1.0, 0.0, 4.0, 1.0};
    // plateau over the widest prefix of cells with measure closest to 1
    double measure = 0.0;
    int K = 0;
    while (K < g.M && measure + g.w[K] <= 1.0) measure += g.w[K++];
    Field u = make_field(g);
    for (int i = 0; i < K; ++i) u.v[i] = std::exp(-3.0);
    Functionals f = eval_functionals(u, g, prm);
    CHECK(f.entA == doctest::Approx(6.0 * std::exp(-6.0) * measure).epsilon(1e-12));
    CHECK(f.entB == doctest::Approx(0.0).epsilon(1e-18));
}

TEST_CASE("energy and Pohozaev closed forms at the Gausson") {
    RadialGrid g = build_grid(3, 16.0, 4096);
    ProblemParams prm{3, 1.0, 0.0, 4.0, 1.0};
    Field w0 = sample_gaussian(g, 1.0);
    EnergyBreakdown eb = eval_energy(w0, g, prm);
    CHECK(eb.I == doctest::Approx(2.8585474).epsilon(1e-5));
    CHECK(gausson_energy(3, 1.0) == doctest::Approx(2.8585474).epsilon(1e-7));
    CHECK(std::abs(eb.P) < 1e-4);
    CHECK(eb.lambda == doctest::Approx(-4.7170948).epsilon(1e-4));
}

TEST_CASE("I reduces to kinetic/2 when mu = alpha = 0") {
    RadialGrid g = build_grid(2, 10.0, 512);
    ProblemParams prm{2, 0.0, 0.0, 3.0, 1.0};
    std::mt19937_64 rng(5);
    Field u = random_smooth_field(g, rng);
    EnergyBreakdown eb = eval_energy(u, g, prm);
    CHECK(eb.I == doctest::Approx(0.5 * eb.components.kinetic).epsilon(1e-12));
}

TEST_CASE("reassembly: I and P from Functionals match direct quadrature") {
    RadialGrid g = build_grid(3, 12.0, 1024);
    ProblemParams prm{3, 1.0, 0.7, 3.5, 1.2};
    std::mt19937_64 rng(42);
    for (int k = 0; k < 200; ++k) {
        Field u = random_smooth_field(g, rng);
        Functionals f = eval_functionals(u, g, prm);
        const double I_assembled = assemble_I(f, prm);
        const double I_direct = direct_energy(u, g, prm);
        CHECK(std::abs(I_assembled - I_direct) <= 1e-10 * (1.0 + std::abs(I_direct)));
        CHECK(std::abs(f.entropy - f.entropy_direct) <= 1e-10 * (1.0 + std::abs(f.entropy)));
    }
}

TEST_CASE("gradient matches central finite differences of I") {
    std::mt19937_64 rng(99);
    struct Case {
        int N;
        double alpha, mu, p;
    };
    const Case cases[] = {
        {2, 1.0, 0.5, 3.0}, {2, -1.0, 1.0, 3.5}, {3, 1.0, 0.0, 4.0},
        {3, 1.0, -1.0, 4.0}, {3, -1.0, 0.7, 3.0}, {3, 1.0, 1.0, 5.5},
    };
    for (const Case& cs : cases) {
        RadialGrid g = build_grid(cs.N, 10.0, 512);
        ProblemParams prm{cs.N, cs.alpha, cs.mu, cs.p, 1.0};
        for (int k = 0; k < 4; ++k) {
            Field u = random_smooth_field(g, rng);
            for (double& x : u.v) x = std::abs(x) + 0.05; // keep log term active
            u.grid_tag = g.tag;
            Field psi = random_smooth_field(g, rng);
            Field grad = eval_gradient(u, g, prm);
            const double h = 1e-6;
            Field up = u, um = u;
            for (int i = 0; i < g.M; ++i) {
                up.v[i] += h * psi.v[i];
                um.v[i] -= h * psi.v[i];
            }
            const double fd =
                (assemble_I(eval_functionals(up, g, prm), prm) -
                 assemble_I(eval_functionals(um, g, prm), prm)) / (2.0 * h);
            const double dir = dot(g, grad, psi);
            CHECK(std::abs(fd - dir) <= 1e-5 * (1.0 + std::abs(fd)));
        }
    }
}

TEST_CASE("gradient vanishes on the zero field") {
    RadialGrid g = build_grid(3, 8.0, 256);
    ProblemParams prm{3, 1.0, 1.0, 4.0, 1.0};
    Field z = make_field(g);
    Field grad = eval_gradient(z, g, prm);
    for (double x : grad.v) CHECK(x == 0.0);
}

TEST_CASE("Gausson solves the mu = 0 equation: grad + lambda0 u is small") {
    RadialGrid g = build_grid(3, 16.0, 4096);
    ProblemParams prm{3, 1.0, 0.0, 4.0, 1.0};
    Field w0 = sample_gaussian(g, 1.0);
    Field grad = eval_gradient(w0, g, prm);
    const double lam0 = gausson_lambda(3, 1.0);
    Accumulator acc;
    for (int i = 0; i < g.M; ++i) {
        const double r = grad.v[i] + lam0 * w0.v[i];
        acc.add(g.w[i] * r * r);
    }
    CHECK(std::sqrt(acc.value()) < 1e-3); // grid-consistency level
}

TEST_CASE("estimate_lambda closed forms") {
    {
        RadialGrid g = build_grid(3, 16.0, 4096);
        ProblemParams prm{3, 1.0, 0.0, 4.0, 1.0};
        CHECK(estimate_lambda(sample_gaussian(g, 1.0), g, prm) ==
              doctest::Approx(-4.7170948).epsilon(1e-5));
    }
    {
        RadialGrid g = build_grid(2, 16.0, 4096);
        ProblemParams prm{2, 1.0, 0.0, 3.0, 1.0};
        CHECK(estimate_lambda(sample_gaussian(g, 1.0), g, prm) ==
              doctest::Approx(-3.1447299).epsilon(1e-5));
    }
    {
        RadialGrid g = build_grid(3, 8.0, 256);
        ProblemParams prm{3, 1.0, 0.0, 4.0, 1.0};
        Field z = make_field(g);
        CHECK_THROWS_AS(estimate_lambda(z, g, prm), error);
    }
}

TEST_CASE("luxemburg norm: zero field, sandwich, monotonicity") {
    RadialGrid g = build_grid(3, 12.0, 1024);
    Field z = make_field(g);
    CHECK(luxemburg_norm(z, g) == 0.0);

    std::mt19937_64 rng(123);
    for (int k = 0; k < 10; ++k) {
        Field u = random_smooth_field(g, rng);
        const double ks = luxemburg_norm(u, g);
        REQUIRE(ks > 0.0);
        std::vector<double> av(g.M);
        for (int i = 0; i < g.M; ++i) av[i] = entA_of(std::abs(u.v[i]));
        const double intA = integrate_nodal(g, av);
        const double lo = std::min(ks, ks * ks), hi = std::max(ks, ks * ks);
        CHECK(intA >= lo * (1.0 - 1e-9));
        CHECK(intA <= hi * (1.0 + 1e-9));

        Field u2 = u;
        for (double& x : u2.v) x *= 2.0;
        const double ks2 = luxemburg_norm(u2, g);
        CHECK(ks2 >= ks * (1.0 - 1e-9));
        CHECK(ks2 <= 4.0 * ks * (1.0 + 1e-9));
    }
}
