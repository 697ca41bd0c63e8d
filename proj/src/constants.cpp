#include "lognls/constants.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <map>
#include <mutex>
#include <shared_mutex>

#include "lognls/summation.hpp"

namespace lognls {

namespace {

// ---- adaptive Cash-Karp RK45 for the shooting ODE ----

struct OdeState {
    double q;  // Q
    double dq; // Q'
};

struct StepResult {
    OdeState y;
    double err;
};

template <typename F>
StepResult ck45_step(const F& f, double r, const OdeState& y, double h) {
    static const double b21 = 1.0 / 5;
    static const double b31 = 3.0 / 40, b32 = 9.0 / 40;
    static const double b41 = 3.0 / 10, b42 = -9.0 / 10, b43 = 6.0 / 5;
    static const double b51 = -11.0 / 54, b52 = 5.0 / 2, b53 = -70.0 / 27, b54 = 35.0 / 27;
    static const double b61 = 1631.0 / 55296, b62 = 175.0 / 512, b63 = 575.0 / 13824,
                        b64 = 44275.0 / 110592, b65 = 253.0 / 4096;
    static const double c1 = 37.0 / 378, c3 = 250.0 / 621, c4 = 125.0 / 594, c6 = 512.0 / 1771;
    static const double d1 = c1 - 2825.0 / 27648, d3 = c3 - 18575.0 / 48384,
                        d4 = c4 - 13525.0 / 55296, d5 = -277.0 / 14336, d6 = c6 - 1.0 / 4;

    auto ax = [&](const OdeState& a, double s, const OdeState& k) {
        return OdeState{a.q + s * k.q, a.dq + s * k.dq};
    };
    OdeState k1 = f(r, y);
    OdeState k2 = f(r + 0.2 * h, ax(y, h * b21, k1));
    OdeState k3 = f(r + 0.3 * h, {y.q + h * (b31 * k1.q + b32 * k2.q), y.dq + h * (b31 * k1.dq + b32 * k2.dq)});
    OdeState k4 = f(r + 0.6 * h, {y.q + h * (b41 * k1.q + b42 * k2.q + b43 * k3.q),
                                  y.dq + h * (b41 * k1.dq + b42 * k2.dq + b43 * k3.dq)});
    OdeState k5 = f(r + h, {y.q + h * (b51 * k1.q + b52 * k2.q + b53 * k3.q + b54 * k4.q),
                            y.dq + h * (b51 * k1.dq + b52 * k2.dq + b53 * k3.dq + b54 * k4.dq)});
    OdeState k6 = f(r + 0.875 * h,
                    {y.q + h * (b61 * k1.q + b62 * k2.q + b63 * k3.q + b64 * k4.q + b65 * k5.q),
                     y.dq + h * (b61 * k1.dq + b62 * k2.dq + b63 * k3.dq + b64 * k4.dq + b65 * k5.dq)});
    StepResult out;
    out.y = {y.q + h * (c1 * k1.q + c3 * k3.q + c4 * k4.q + c6 * k6.q),
             y.dq + h * (c1 * k1.dq + c3 * k3.dq + c4 * k4.dq + c6 * k6.dq)};
    const double eq = h * (d1 * k1.q + d3 * k3.q + d4 * k4.q + d5 * k5.q + d6 * k6.q);
    const double edq = h * (d1 * k1.dq + d3 * k3.dq + d4 * k4.dq + d5 * k5.dq + d6 * k6.dq);
    out.err = std::max(std::abs(eq), std::abs(edq));
    return out;
}

// Integrates from (r, y) to r_end; calls visit(r, y) after each accepted step.
// Returns false if visit asked to stop.
template <typename F, typename V>
void integrate(const F& f, double& r, OdeState& y, double r_end, double rtol, double max_step,
               const V& visit) {
    double h = std::min(max_step, 1e-3);
    while (r < r_end) {
        h = std::min(h, r_end - r);
        StepResult st = ck45_step(f, r, y, h);
        const double scale = rtol * (1.0 + std::abs(y.q) + std::abs(y.dq));
        if (st.err > scale && h > 1e-14) {
            h *= std::max(0.2, 0.9 * std::pow(scale / st.err, 0.25));
            continue;
        }
        r += h;
        y = st.y;
        if (st.err > 0.0)
            h = std::min(max_step, h * std::min(5.0, 0.9 * std::pow(scale / st.err, 0.2)));
        else
            h = std::min(max_step, h * 5.0);
        if (!visit(r, y)) return;
    }
}

enum class ShotOutcome { crossed, turned, decayed };

struct Shooter {
    int N;
    double p;

    OdeState rhs(double r, const OdeState& y) const {
        const double nl = (y.q != 0.0) ? std::pow(std::abs(y.q), p - 2.0) * y.q : 0.0;
        return {y.dq, -(N - 1) / r * y.dq + y.q - nl};
    }

    // Series start away from the axis: Q = q0 + (q0 - q0^{p-1}) r^2 / (2N).
    OdeState seed(double q0, double r0) const {
        const double c2 = (q0 - std::pow(q0, p - 1.0)) / (2.0 * N);
        return {q0 + c2 * r0 * r0, 2.0 * c2 * r0};
    }

    ShotOutcome classify(double q0, double r_end) const {
        double r = 1e-4;
        OdeState y = seed(q0, r);
        ShotOutcome outcome = ShotOutcome::decayed;
        auto f = [this](double rr, const OdeState& yy) { return rhs(rr, yy); };
        integrate(f, r, y, r_end, 1e-10, 0.05, [&](double rr, const OdeState& yy) {
            if (yy.q <= 0.0) {
                outcome = ShotOutcome::crossed;
                return false;
            }
            if (rr > 0.05 && yy.dq > 0.0) {
                outcome = ShotOutcome::turned;
                return false;
            }
            return true;
        });
        return outcome;
    }
};

std::uint64_t key_of(int N, double p) {
    std::uint64_t bits;
    std::memcpy(&bits, &p, sizeof bits);
    return bits ^ (static_cast<std::uint64_t>(N) << 1);
}

std::shared_mutex g_weinstein_mutex;
std::map<std::uint64_t, WeinsteinProfile> g_weinstein_cache;

std::shared_mutex g_sobolev_mutex;
std::map<int, double> g_sobolev_cache;

WeinsteinProfile compute_weinstein(int N, double p) {
    if (N < 2) throw error("weinstein_profile: N must be >= 2");
    const double pc = (N >= 3) ? 2.0 * N / (N - 2.0) : std::numeric_limits<double>::infinity();
    if (!(p > 2.0) || !(p < pc))
        throw error("weinstein_profile: requires 2 < p < 2N/(N-2)");

    Shooter sh{N, p};
    const double r_end = 30.0;
    const double q_min = std::pow(0.5 * p, 1.0 / (p - 2.0)); // V(q) > 0 needs q above this

    double lo = q_min * (1.0 + 1e-9);
    if (sh.classify(lo, r_end) != ShotOutcome::turned)
        throw error("weinstein_profile: lower bracket not found");
    double hi = lo;
    bool bracketed = false;
    for (int it = 0; it < 60; ++it) {
        hi *= 2.0;
        if (sh.classify(hi, r_end) == ShotOutcome::crossed) {
            bracketed = true;
            break;
        }
    }
    if (!bracketed) throw error("weinstein_profile: upper bracket not found");

    for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sh.classify(mid, r_end) == ShotOutcome::crossed) hi = mid;
        else lo = mid;
    }
    const double q0 = 0.5 * (lo + hi);

    // Dense pass: forced stops on a uniform grid for the quadratures and the
    // finite-difference residual check.
    WeinsteinProfile w;
    w.N = N;
    w.p = p;
    w.q0 = q0;
    w.step = 1e-3;
    const int K = static_cast<int>(r_end / w.step);
    w.q.assign(K + 1, 0.0);
    std::vector<double> dq(K + 1, 0.0);
    w.q[0] = q0;

    double r = 1e-6;
    OdeState y = sh.seed(q0, r);
    auto f = [&sh](double rr, const OdeState& yy) { return sh.rhs(rr, yy); };
    int cut = K;
    for (int k = 1; k <= K; ++k) {
        const double target = k * w.step;
        bool ok = true;
        integrate(f, r, y, target, 1e-12, 1e-3, [&](double, const OdeState& yy) {
            if (yy.q < q0 * 1e-9 || yy.dq > 0.0) {
                ok = false;
                return false;
            }
            return true;
        });
        if (!ok || y.q < q0 * 1e-9) {
            cut = k - 1;
            break;
        }
        w.q[k] = y.q;
        dq[k] = y.dq;
    }
    w.r_cut = cut * w.step;
    for (int k = cut + 1; k <= K; ++k) w.q[k] = dq[k] = 0.0;

    const double sigma = 2.0 * std::pow(M_PI, 0.5 * N) / std::tgamma(0.5 * N);
    auto simpson = [&](auto fk) {
        Accumulator acc;
        const int n = (cut % 2 == 0) ? cut : cut - 1;
        for (int k = 0; k + 2 <= n; k += 2) {
            acc.add(fk(k) + 4.0 * fk(k + 1) + fk(k + 2));
        }
        return acc.value() * w.step / 3.0;
    };
    auto rpow = [&](int k) { return std::pow(k * w.step, N - 1); };
    w.mass2 = sigma * simpson([&](int k) { return w.q[k] * w.q[k] * rpow(k); });
    w.kinetic = sigma * simpson([&](int k) { return dq[k] * dq[k] * rpow(k); });
    w.lp = sigma * simpson([&](int k) { return std::pow(w.q[k], p) * rpow(k); });

    // Independent defect: 4th-order finite differences on the dense samples.
    {
        Accumulator acc;
        const double d2 = 12.0 * w.step * w.step;
        const double d1 = 12.0 * w.step;
        for (int k = 2; k + 2 <= cut; ++k) {
            const double qpp =
                (-w.q[k - 2] + 16 * w.q[k - 1] - 30 * w.q[k] + 16 * w.q[k + 1] - w.q[k + 2]) / d2;
            const double qp = (w.q[k - 2] - 8 * w.q[k - 1] + 8 * w.q[k + 1] - w.q[k + 2]) / d1;
            const double res =
                qpp + (N - 1) / (k * w.step) * qp - w.q[k] + std::pow(w.q[k], p - 1.0);
            acc.add(res * res * rpow(k) * w.step);
        }
        w.ode_residual = std::sqrt(sigma * acc.value());
    }
    if (w.ode_residual > 1e-8)
        throw error("weinstein_profile: shooting did not reach the residual target");

    const double gamma = N * (p - 2.0) / (2.0 * p);
    w.C = std::pow(w.lp, 1.0 / p) /
          (std::pow(w.kinetic, 0.5 * gamma) * std::pow(w.mass2, 0.5 * (1.0 - gamma)));
    return w;
}

} // namespace

double WeinsteinProfile::value(double r) const {
    r = std::abs(r);
    if (r >= r_cut) return 0.0;
    const double x = r / step;
    const int k = std::min(static_cast<int>(x), static_cast<int>(q.size()) - 2);
    // local cubic through 4 neighbors (samples are dense; this is plenty)
    const int k0 = std::max(0, std::min(k - 1, static_cast<int>(q.size()) - 4));
    const double t = x - k0;
    const double y0 = q[k0], y1 = q[k0 + 1], y2 = q[k0 + 2], y3 = q[k0 + 3];
    return y0 * (-(t - 1) * (t - 2) * (t - 3) / 6.0) + y1 * (t * (t - 2) * (t - 3) / 2.0) +
           y2 * (-t * (t - 1) * (t - 3) / 2.0) + y3 * (t * (t - 1) * (t - 2) / 6.0);
}

const WeinsteinProfile& weinstein_profile(int N, double p) {
    const std::uint64_t key = key_of(N, p);
    {
        std::shared_lock lock(g_weinstein_mutex);
        auto it = g_weinstein_cache.find(key);
        if (it != g_weinstein_cache.end()) return it->second;
    }
    WeinsteinProfile w = compute_weinstein(N, p);
    std::unique_lock lock(g_weinstein_mutex);
    return g_weinstein_cache.emplace(key, std::move(w)).first->second;
}

Field weinstein_ground_state(int N, double p, const RadialGrid& g) {
    if (g.N != N) throw error("weinstein_ground_state: grid dimension mismatch");
    const WeinsteinProfile& w = weinstein_profile(N, p);
    // Dilation to the representative with ||grad Q||_2 = ||Q||_2.
    const double lam = std::sqrt(w.mass2 / w.kinetic);
    Field u = make_field(g);
    for (int i = 0; i < g.M; ++i) u.v[i] = w.value(lam * g.r[i]);
    return u;
}

double gn_constant(int N, double p) { return weinstein_profile(N, p).C; }

double bubble_quotient(int N, double R, double eps) {
    if (N < 3) throw error("bubble_quotient: requires N >= 3");
    const int M = static_cast<int>(R * 512);
    RadialGrid g = build_grid(N, R, M);
    Field u = sample_bubble(g, eps, 0.5 * R);
    const double K = kinetic_energy(g, u);
    const double twostar = 2.0 * N / (N - 2.0);
    Accumulator acc;
    for (int i = 0; i < g.M; ++i) acc.add(g.w[i] * std::pow(std::abs(u.v[i]), twostar));
    return K / std::pow(acc.value(), 2.0 / twostar);
}

double sobolev_constant(int N) {
    if (N < 3) throw error("sobolev_constant: requires N >= 3");
    {
        std::shared_lock lock(g_sobolev_mutex);
        auto it = g_sobolev_cache.find(N);
        if (it != g_sobolev_cache.end()) return it->second;
    }
    const double q40 = bubble_quotient(N, 40.0, 1.0);
    const double q80 = bubble_quotient(N, 80.0, 1.0);
    const double f = std::pow(2.0, N - 2);
    const double S = (f * q80 - q40) / (f - 1.0);
    std::unique_lock lock(g_sobolev_mutex);
    g_sobolev_cache[N] = S;
    return S;
}

Thresholds thresholds(const ProblemParams& prm) {
    prm.validate();
    Thresholds t;
    t.gamma_p = prm.gamma_p();
    const double pg = prm.p_gamma();
    const double c2 = prm.c * prm.c;
    const bool crit = prm.sobolev_critical();

    if (pg > 2.0) t.k0 = pg * prm.N * c2 / (2.0 * (pg - 2.0)); // = N^2 c^2/4 at p = 2*

    if (crit) {
        t.S_sob = sobolev_constant(prm.N);
        t.C_gn = std::pow(*t.S_sob, -0.5); // identification at the critical exponent
        if (prm.mu > 0.0) {
            const double twostar = prm.p_critical();
            t.c0 = std::pow((prm.N * prm.N - 2.0 * prm.N) / (4.0 * prm.mu) *
                                std::pow(4.0 * *t.S_sob / (prm.N * prm.N), 0.5 * twostar),
                            1.0 / (twostar - 2.0));
        }
        return t;
    }

    t.C_gn = gn_constant(prm.N, prm.p);
    const double C = *t.C_gn;
    if (prm.mu > 0.0) {
        if (pg > 2.0) {
            t.c0 = std::pow(prm.p * std::pow(2.0, 0.5 * pg) /
                                (prm.mu * std::pow(pg, 0.5 * (pg + 2.0))) *
                                std::pow((pg - 2.0) / prm.N, 0.5 * (pg - 2.0)) *
                                std::pow(C, -prm.p),
                            1.0 / (prm.p - 2.0));
        }
        if (pg < 2.0) {
            const double g = prm.gamma_p();
            t.D = std::pow(prm.N * pg / (2.0 * (2.0 - pg)), 0.5 * (2.0 - pg) / (prm.p - 2.0)) *
                  std::pow(0.5 * prm.mu * prm.p * g * g * std::pow(C, prm.p), -1.0 / (prm.p - 2.0));
        }
        if (std::abs(prm.p - prm.p_mass_critical()) < 1e-12) {
            t.c_masscrit = std::pow((prm.N + 2.0) / (prm.mu * prm.N), 0.25 * prm.N) *
                           std::pow(C, -0.5 * (prm.N + 2.0));
        }
    }
    return t;
}

double c0_gate(const ProblemParams& prm) {
    if (!(prm.mu > 0.0)) throw regime_error("c0 gate needs mu > 0");
    if (!(prm.p_gamma() > 2.0) && !prm.sobolev_critical())
        throw regime_error("c0 gate needs p gamma_p > 2 or p = 2*");
    return *thresholds(prm).c0;
}

double D_gate(const ProblemParams& prm) {
    if (!(prm.mu > 0.0)) throw regime_error("D gate needs mu > 0");
    if (!(prm.p_gamma() < 2.0)) throw regime_error("D gate needs p gamma_p < 2");
    return *thresholds(prm).D;
}

} // namespace lognls
