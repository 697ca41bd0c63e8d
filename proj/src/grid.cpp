#include "lognls/grid.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lognls/summation.hpp"

namespace lognls {

namespace {
std::atomic<std::uint64_t> next_tag{1};
}

RadialGrid build_grid(int N, double R, int M) {
    if (N < 2) throw error("build_grid: N must be >= 2");
    if (!(R > 0.0)) throw error("build_grid: R must be positive");
    if (M < 64) throw error("build_grid: M must be >= 64");
    RadialGrid g;
    g.N = N;
    g.R = R;
    g.M = M;
    g.h = R / M;
    g.surface = 2.0 * std::pow(M_PI, 0.5 * N) / std::tgamma(0.5 * N);
    g.r.resize(M);
    g.w.resize(M);
    for (int i = 0; i < M; ++i) {
        g.r[i] = (i + 0.5) * g.h;
        g.w[i] = g.surface * std::pow(g.r[i], N - 1) * g.h;
    }
    g.tag = next_tag.fetch_add(1);
    return g;
}

Field make_field(const RadialGrid& g, double value) {
    Field u;
    u.v.assign(g.M, value);
    u.grid_tag = g.tag;
    return u;
}

void require_match(const RadialGrid& g, const Field& u) {
    if (u.grid_tag != g.tag || static_cast<int>(u.v.size()) != g.M)
        throw grid_mismatch("field does not belong to this grid");
}

double integrate_nodal(const RadialGrid& g, const std::vector<double>& f) {
    Accumulator acc;
    for (int i = 0; i < g.M; ++i) acc.add(g.w[i] * f[i]);
    return acc.value();
}

double dot(const RadialGrid& g, const Field& a, const Field& b) {
    require_match(g, a);
    require_match(g, b);
    Accumulator acc;
    for (int i = 0; i < g.M; ++i) acc.add(g.w[i] * a.v[i] * b.v[i]);
    return acc.value();
}

double mass2(const RadialGrid& g, const Field& u) { return dot(g, u, u); }

double norm2(const RadialGrid& g, const Field& u) { return std::sqrt(mass2(g, u)); }

double kinetic_energy(const RadialGrid& g, const Field& u) {
    require_match(g, u);
    Accumulator acc;
    const int M = g.M;
    for (int j = 1; j < M; ++j) {
        const double rf = j * g.h;                 // face radius
        const double du = u.v[j] - u.v[j - 1];
        acc.add(std::pow(rf, g.N - 1) * du * du / g.h);
    }
    // Dirichlet face at r = R via the odd ghost u_M = -u_{M-1}.
    const double du = -2.0 * u.v[M - 1];
    acc.add(std::pow(g.R, g.N - 1) * du * du / (2.0 * g.h));
    return g.surface * acc.value();
}

Field laplacian_apply(const RadialGrid& g, const Field& u) {
    require_match(g, u);
    Field out = make_field(g);
    const int M = g.M;
    const int N = g.N;
    const double h = g.h;
    for (int i = 0; i < M; ++i) {
        const double rim = i * h;        // inner face
        const double rip = (i + 1) * h;  // outer face
        const double cm = (i > 0) ? std::pow(rim, N - 1) : 0.0;
        const double cp = std::pow(rip, N - 1);
        double flux_in = (i > 0) ? cm * (u.v[i] - u.v[i - 1]) : 0.0;
        double flux_out;
        if (i < M - 1)
            flux_out = cp * (u.v[i + 1] - u.v[i]);
        else
            flux_out = cp * (-2.0 * u.v[M - 1]); // ghost u_M = -u_{M-1}
        out.v[i] = -(flux_out - flux_in) / (std::pow(g.r[i], N - 1) * h * h);
    }
    return out;
}

Field helmholtz_solve(const RadialGrid& g, const Field& rhs, double shift,
                      const std::vector<double>* potential) {
    require_match(g, rhs);
    const int M = g.M;
    const int N = g.N;
    const double h = g.h;
    std::vector<double> a(M), b(M), c(M); // sub, diag, super
    for (int i = 0; i < M; ++i) {
        const double rw = std::pow(g.r[i], N - 1) * h * h;
        const double cm = (i > 0) ? std::pow(i * h, N - 1) / rw : 0.0;
        double cp = std::pow((i + 1) * h, N - 1) / rw;
        if (i == M - 1) cp *= 2.0; // Dirichlet ghost doubles the last coupling
        a[i] = -cm;
        c[i] = (i < M - 1) ? -cp : 0.0;
        b[i] = shift + cm + cp + (potential ? (*potential)[i] : 0.0);
    }
    // Thomas sweep
    std::vector<double> cp(M), dp(M);
    cp[0] = c[0] / b[0];
    dp[0] = rhs.v[0] / b[0];
    for (int i = 1; i < M; ++i) {
        const double m = b[i] - a[i] * cp[i - 1];
        cp[i] = c[i] / m;
        dp[i] = (rhs.v[i] - a[i] * dp[i - 1]) / m;
    }
    Field z = make_field(g);
    z.v[M - 1] = dp[M - 1];
    for (int i = M - 2; i >= 0; --i) z.v[i] = dp[i] - cp[i] * z.v[i + 1];
    return z;
}

void Pchip::build(std::vector<double> xs, std::vector<double> ys) {
    x = std::move(xs);
    y = std::move(ys);
    const int n = static_cast<int>(x.size());
    d.assign(n, 0.0);
    if (n < 2) return;
    std::vector<double> hs(n - 1), del(n - 1);
    for (int i = 0; i + 1 < n; ++i) {
        hs[i] = x[i + 1] - x[i];
        del[i] = (y[i + 1] - y[i]) / hs[i];
    }
    // Fritsch-Carlson derivative limiting: no overshoot on monotone data.
    d[0] = del[0];
    d[n - 1] = del[n - 2];
    for (int i = 1; i + 1 < n; ++i) {
        if (del[i - 1] * del[i] <= 0.0) {
            d[i] = 0.0;
        } else {
            const double w1 = 2.0 * hs[i] + hs[i - 1];
            const double w2 = hs[i] + 2.0 * hs[i - 1];
            d[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
        }
    }
    if (n >= 3) {
        // one-sided ends with monotonicity clamp
        auto end_slope = [](double h0, double h1, double d0, double d1) {
            double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
            if (s * d0 <= 0.0) s = 0.0;
            else if (d0 * d1 <= 0.0 && std::abs(s) > 3.0 * std::abs(d0)) s = 3.0 * d0;
            return s;
        };
        d[0] = end_slope(hs[0], hs[1], del[0], del[1]);
        d[n - 1] = end_slope(hs[n - 2], hs[n - 3], del[n - 2], del[n - 3]);
    }
}

double Pchip::operator()(double xq) const {
    const int n = static_cast<int>(x.size());
    if (n == 0) return 0.0;
    if (xq <= x.front()) return y.front();
    if (xq >= x.back()) return y.back();
    int lo = 0, hi = n - 1;
    while (hi - lo > 1) {
        int mid = (lo + hi) / 2;
        if (x[mid] <= xq) lo = mid;
        else hi = mid;
    }
    const double hseg = x[lo + 1] - x[lo];
    const double t = (xq - x[lo]) / hseg;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * y[lo] + h10 * hseg * d[lo] + h01 * y[lo + 1] + h11 * hseg * d[lo + 1];
}

ScaledField scale_field(const RadialGrid& g, const Field& u, double s, double s_max) {
    require_match(g, u);
    if (std::abs(s) > s_max)
        throw error("scale_field: |s| exceeds s_max, resampling would be meaningless");
    ScaledField out;
    if (s == 0.0) {
        out.field = u;
        return out;
    }
    // Even extension through r = 0 and a zero anchor at r = R.
    std::vector<double> xs, ys;
    xs.reserve(g.M + 3);
    ys.reserve(g.M + 3);
    xs.push_back(-g.r[1]); ys.push_back(u.v[1]);
    xs.push_back(-g.r[0]); ys.push_back(u.v[0]);
    for (int i = 0; i < g.M; ++i) { xs.push_back(g.r[i]); ys.push_back(u.v[i]); }
    xs.push_back(g.R); ys.push_back(0.0);
    Pchip interp;
    interp.build(std::move(xs), std::move(ys));

    const double amp = std::exp(0.5 * g.N * s);
    const double es = std::exp(s);
    out.field = make_field(g);
    for (int i = 0; i < g.M; ++i) {
        const double rq = es * g.r[i];
        out.field.v[i] = (rq > g.R) ? 0.0 : amp * interp(rq);
    }
    const double m_old = mass2(g, u);
    if (m_old > 0.0) {
        const double m_new = mass2(g, out.field);
        out.mass_drift = std::abs(m_new - m_old) / m_old;
        out.resolution_warning = out.mass_drift > 1e-4;
    }
    return out;
}

Field normalize_mass(const RadialGrid& g, const Field& u, double c) {
    const double nrm = norm2(g, u);
    if (!(nrm > 0.0)) throw error("normalize_mass: zero field");
    Field out = u;
    const double f = c / nrm;
    for (double& x : out.v) x *= f;
    return out;
}

Field sample_gaussian(const RadialGrid& g, double c) {
    Field u = make_field(g);
    const double amp = c * std::pow(M_PI, -0.25 * g.N);
    for (int i = 0; i < g.M; ++i) u.v[i] = amp * std::exp(-0.5 * g.r[i] * g.r[i]);
    return u;
}

Field sample_bubble(const RadialGrid& g, double eps, double cutoff) {
    if (g.N < 3) throw error("sample_bubble: requires N >= 3");
    if (!(eps > 0.0) || !(cutoff > 0.0)) throw error("sample_bubble: eps and cutoff must be positive");
    Field u = make_field(g);
    const double amp = std::pow(g.N * (g.N - 2) * eps * eps, 0.25 * (g.N - 2));
    for (int i = 0; i < g.M; ++i) {
        const double r = g.r[i];
        double chi;
        if (r <= cutoff) chi = 1.0;
        else if (r >= 2.0 * cutoff) chi = 0.0;
        else {
            const double t = (r - cutoff) / cutoff;
            chi = 0.5 * (1.0 + std::cos(M_PI * t));
        }
        u.v[i] = chi * amp / std::pow(eps * eps + r * r, 0.5 * (g.N - 2));
    }
    return u;
}

void save_field(const RadialGrid& g, const Field& u, const std::string& path) {
    require_match(g, u);
    std::ofstream out(path);
    if (!out) throw error("save_field: cannot open " + path);
    char buf[80];
    std::snprintf(buf, sizeof buf, "# %d %.17g %d\n", g.N, g.R, g.M);
    out << buf;
    for (int i = 0; i < g.M; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", g.r[i], u.v[i]);
        out << buf;
    }
    if (!out) throw error("save_field: write failed for " + path);
}

std::pair<RadialGrid, Field> load_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("load_field: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw error("load_field: empty file " + path);
    int N = 0, M = 0;
    double R = 0;
    {
        std::istringstream hdr(line);
        char hash = 0;
        if (!(hdr >> hash >> N >> R >> M) || hash != '#')
            throw error("load_field: bad header in " + path);
    }
    RadialGrid g = build_grid(N, R, M);
    Field u = make_field(g);
    for (int i = 0; i < M; ++i) {
        double r = 0, val = 0;
        if (!(in >> r >> val)) throw error("load_field: truncated data in " + path);
        u.v[i] = val;
    }
    return {std::move(g), std::move(u)};
}

} // namespace lognls
