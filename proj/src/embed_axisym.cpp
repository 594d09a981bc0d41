#include "weyl/embed.hpp"
#include "weyl/errors.hpp"
#include "weyl/estimates.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

namespace weyl {

namespace {

constexpr double pi = std::numbers::pi;

double integrate_0_pi(const std::function<double(double)>& f)
{
    using boost::math::quadrature::gauss_kronrod;
    return gauss_kronrod<double, 61>::integrate(f, 0.0, pi, 15, 1e-14);
}

struct Hermite {
    double f, d;
};

Hermite hermite(double x0, double x1, double f0, double f1, double d0, double d1, double x)
{
    const double h = x1 - x0, t = (x - x0) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    const double f = h00 * f0 + h10 * h * d0 + h01 * f1 + h11 * h * d1;
    const double d = ((6 * t2 - 6 * t) * f0 + (3 * t2 - 4 * t + 1) * h * d0 + (-6 * t2 + 6 * t) * f1 +
                      (3 * t2 - 2 * t) * h * d1) / h;
    return {f, d};
}

} // namespace

AxisymMetric::AxisymMetric(Profile profile, double closure_tol) : f_(std::move(profile))
{
    for (int k = 1; k < 400; ++k) {
        const double p = pi * k / 400.0;
        const Value v = f_(p);
        if (!(v.L > 0.0)) throw ConfigError("axisym metric: L must be positive");
        if (!(v.alpha > 0.0)) throw ConfigError("axisym metric: alpha must be positive inside");
    }
    const Value n = f_(0.0), s = f_(pi);
    const double scale = std::max(n.L, s.L);
    if (std::abs(n.alpha) > closure_tol * scale || std::abs(s.alpha) > closure_tol * scale)
        throw ConfigError("axisym metric: alpha must vanish at the poles");
    if (std::abs(n.alpha_p / n.L - 1.0) > closure_tol || std::abs(s.alpha_p / s.L + 1.0) > closure_tol)
        throw ConfigError("axisym metric: poles do not close (|alpha_s| != 1)");
    s_max_ = integrate_0_pi([&](double p) { return f_(p).L; });
    area_ = 2.0 * pi * integrate_0_pi([&](double p) {
        const Value v = f_(p);
        return v.L * v.alpha;
    });
}

AxisymMetric AxisymMetric::from_alpha(double s_max, std::function<double(double)> alpha,
                                      std::function<double(double)> dalpha)
{
    if (!(s_max > 0.0)) throw ConfigError("axisym metric: s_max must be positive");
    const double L = s_max / pi;
    return AxisymMetric([=](double p) {
        const double s = std::clamp(p, 0.0, pi) * L;
        return Value{L, alpha(s), dalpha(s) * L};
    });
}

AxisymMetric AxisymMetric::conformal(std::function<double(double)> u, std::function<double(double)> du)
{
    return AxisymMetric([=](double p) {
        const double e = std::exp(u(p));
        return Value{e, e * std::sin(p), e * (du(p) * std::sin(p) + std::cos(p))};
    });
}

AxisymMetric AxisymMetric::round(double radius)
{
    if (!(radius > 0.0)) throw ConfigError("axisym metric: radius must be positive");
    return AxisymMetric([=](double p) { return Value{radius, radius * std::sin(p), radius * std::cos(p)}; });
}

AxisymMetric AxisymMetric::from_metric(const Metric2S& m)
{
    const SphereGrid& g = m.grid();
    const int n = g.n_psi, w = g.n_theta;
    const double scale = std::max(sup_norm(m.a()), sup_norm(m.c()));
    if (sup_norm(m.b()) > 1e-10 * scale) throw ConfigError("axisym metric: b must vanish");
    std::vector<double> sa(n), sc(n);
    for (int i = 0; i < n; ++i) {
        double amin = m.a()[i * w], amax = amin, cmin = m.c()[i * w], cmax = cmin;
        double asum = 0.0, csum = 0.0;
        for (int j = 0; j < w; ++j) {
            const double a = m.a()[i * w + j], c = m.c()[i * w + j];
            amin = std::min(amin, a), amax = std::max(amax, a);
            cmin = std::min(cmin, c), cmax = std::max(cmax, c);
            asum += a, csum += c;
        }
        if (amax - amin > 1e-10 * scale || cmax - cmin > 1e-10 * scale)
            throw ConfigError("axisym metric: metric depends on theta");
        sa[i] = std::sqrt(asum / w);
        sc[i] = std::sqrt(csum / w);
    }
    CosineSeries A(sa), C(sc);
    return AxisymMetric(
        [A, C](double p) {
            const double c = C(p);
            return Value{A(p), c * std::sin(p), C.derivative(p) * std::sin(p) + c * std::cos(p)};
        },
        1e-6);
}

Metric2S AxisymMetric::sample(const SphereGrid& grid) const
{
    Field a(grid.size()), b(grid.size(), 0.0), c(grid.size());
    for (int i = 0; i < grid.n_psi; ++i) {
        const double p = grid.psi(i), s = std::sin(p);
        const Value v = f_(p);
        for (int j = 0; j < grid.n_theta; ++j) {
            a[grid.idx(i, j)] = v.L * v.L;
            c[grid.idx(i, j)] = v.alpha * v.alpha / (s * s);
        }
    }
    return Metric2S(grid, std::move(a), std::move(b), std::move(c), Provenance::analytic);
}

// ---------------------------------------------------------------------------

namespace {

using State = std::array<double, 3>; // x, p, s as functions of the ambient angle psi

struct ProfileFailure {
    double s;
    std::string why;
};

// Profile ODE.  The tangent makes angle chi with d_r; alpha(p) = phi(x) sin psi
// differentiated along arclength gives
//   alpha_s = phi' sin psi cos chi + cos psi sin chi.
struct ProfileRhs {
    const AxisymMetric& metric;
    const WarpSpec& spec;
    double excess = 0.0;     // largest |alpha_s / N| - 1 seen
    double excess_s = -1.0;  // arclength where it first exceeded the tolerance

    void operator()(const State& y, State& dy, double psi)
    {
        WarpSample w;
        try {
            w = spec.sample(y[0]);
        } catch (const DomainError&) {
            throw ProfileFailure{y[2], "profile left the ambient domain"};
        }
        const AxisymMetric::Value v = metric(std::clamp(y[1], 0.0, pi));
        const double alpha_s = v.alpha_p / v.L;
        const double A = w.dphi * std::sin(psi), B = std::cos(psi);
        const double N = std::hypot(A, B);
        double ratio = alpha_s / N;
        const double ex = std::abs(ratio) - 1.0;
        if (ex > excess) excess = ex;
        if (ex > 1e-6 && excess_s < 0.0) excess_s = y[2];
        ratio = std::clamp(ratio, -1.0, 1.0);
        const double chi = std::atan2(B, A) + std::acos(ratio);
        const double sc = std::sin(chi);
        if (!(sc > 1e-12)) throw ProfileFailure{y[2], "profile turned back in the ambient angle"};
        dy[0] = w.phi / w.a * std::cos(chi) / sc;
        dy[1] = w.phi / (v.L * sc);
        dy[2] = w.phi / sc;
    }
};

struct Shot {
    std::vector<double> psi;
    std::vector<State> y, dy;
    double excess = 0.0, excess_s = -1.0;
};

Shot shoot(const AxisymMetric& metric, const WarpSpec& spec, double x_north, const std::vector<double>& times)
{
    namespace ode = boost::numeric::odeint;
    ProfileRhs rhs{metric, spec};
    State y0{x_north, 0.0, 0.0};
    Shot out;
    auto stepper = ode::make_controlled(1e-12, 1e-12, ode::runge_kutta_dopri5<State>());
    ode::integrate_times(stepper, std::ref(rhs), y0, times.begin(), times.end(), 1e-3,
                         [&](const State& y, double psi) {
                             out.psi.push_back(psi);
                             out.y.push_back(y);
                         });
    out.dy.resize(out.y.size());
    for (std::size_t k = 0; k < out.y.size(); ++k) rhs(out.y[k], out.dy[k], out.psi[k]);
    out.excess = rhs.excess;
    out.excess_s = rhs.excess_s;
    return out;
}

} // namespace

double AxisymEmbedding::x_of_psi(double psi) const
{
    auto it = std::upper_bound(profile.begin(), profile.end(), psi,
                               [](double v, const ProfileSample& s) { return v < s.psi; });
    std::size_t k = std::clamp<std::size_t>(it - profile.begin(), 1, profile.size() - 1);
    const ProfileSample &a = profile[k - 1], &b = profile[k];
    return hermite(a.psi, b.psi, a.x, b.x, a.dx, b.dx, psi).f;
}

double AxisymEmbedding::p_of_psi(double psi) const
{
    auto it = std::upper_bound(profile.begin(), profile.end(), psi,
                               [](double v, const ProfileSample& s) { return v < s.psi; });
    std::size_t k = std::clamp<std::size_t>(it - profile.begin(), 1, profile.size() - 1);
    const ProfileSample &a = profile[k - 1], &b = profile[k];
    return hermite(a.psi, b.psi, a.p, b.p, a.dp, b.dp, psi).f;
}

double AxisymEmbedding::psi_of_p(double p) const
{
    auto it = std::upper_bound(profile.begin(), profile.end(), p,
                               [](double v, const ProfileSample& s) { return v < s.p; });
    std::size_t k = std::clamp<std::size_t>(it - profile.begin(), 1, profile.size() - 1);
    const ProfileSample &a = profile[k - 1], &b = profile[k];
    double lo = a.psi, hi = b.psi;
    double psi = a.psi + (p - a.p) / (b.p - a.p) * (b.psi - a.psi);
    for (int it2 = 0; it2 < 50; ++it2) {
        const Hermite h = hermite(a.psi, b.psi, a.p, b.p, a.dp, b.dp, psi);
        const double r = h.f - p;
        if (r > 0) hi = psi; else lo = psi;
        double next = psi - r / h.d;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - psi) < 1e-15) return next;
        psi = next;
    }
    return psi;
}

AxisymEmbedding embed_axisym(const AxisymMetric& metric, const WarpSpec& spec, const SphereGrid& grid)
{
    if (spec.n() != 2) throw UnsupportedError("embed_axisym: surfaces in 3-dimensional ambients only");
    double alpha_max = 0.0;
    for (int k = 0; k <= 400; ++k) alpha_max = std::max(alpha_max, metric(pi * k / 400.0).alpha);
    double x_guess;
    try {
        spec.x_of_phi(alpha_max);
        x_guess = spec.x_of_phi(std::sqrt(metric.area() / (4.0 * pi)));
    } catch (const DomainError&) {
        std::ostringstream os;
        os << "embed_axisym: phi range insufficient for max alpha " << alpha_max;
        throw DomainError(os.str());
    }

    // coarse times for shooting, fine times plus grid nodes for the result
    std::vector<double> coarse{0.0, pi};
    const bool space_form = spec.space_form();
    auto residual = [&](double xn) -> std::optional<double> {
        try {
            const Shot s = shoot(metric, spec, xn, coarse);
            if (s.y.size() != 2) return std::nullopt;
            const State& e = s.y.back();
            return space_form ? e[0] - xn : e[1] - pi;
        } catch (const ProfileFailure&) {
            return std::nullopt;
        } catch (const DomainError&) {
            return std::nullopt;
        }
    };

    const Interval dom = spec.domain();
    std::vector<double> xs;
    for (int k = 0; k <= 48; ++k) {
        const double x = x_guess * std::pow(2.0, (k - 24) / 24.0);
        if (dom.contains(x)) xs.push_back(x);
    }
    std::vector<std::optional<double>> rs;
    for (double x : xs) rs.push_back(residual(x));
    int best = -1;
    double best_dist = 0.0;
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
        if (!rs[k] || !rs[k + 1]) continue;
        if (*rs[k] == 0.0 || (*rs[k] < 0) != (*rs[k + 1] < 0)) {
            const double dist = std::abs(std::log(xs[k] / x_guess));
            if (best < 0 || dist < best_dist) best = static_cast<int>(k), best_dist = dist;
        }
    }
    if (best < 0) {
        double s_fail = -1.0;
        try {
            shoot(metric, spec, x_guess, coarse);
        } catch (const ProfileFailure& f) {
            s_fail = f.s;
        }
        std::ostringstream os;
        os << "embed_axisym: non-embeddable profile, no closing north-pole radius";
        if (s_fail >= 0) os << " (profile fails at s = " << s_fail << ")";
        throw EmbeddingError(os.str());
    }
    double x_north = xs[best];
    if (*rs[best] != 0.0) {
        auto f = [&](double x) {
            auto r = residual(x);
            if (!r) throw EmbeddingError("embed_axisym: shooting left the solvable region");
            return *r;
        };
        boost::uintmax_t iters = 200;
        auto [lo, hi] = boost::math::tools::toms748_solve(
            f, xs[best], xs[best + 1], *rs[best], *rs[best + 1],
            [](double a, double b) { return std::abs(a - b) <= 1e-14 * std::abs(a); }, iters);
        x_north = 0.5 * (lo + hi);
    }

    std::vector<double> times;
    const int fine = 2048;
    for (int k = 0; k <= fine; ++k) times.push_back(pi * k / fine);
    for (int i = 0; i < grid.n_psi; ++i) times.push_back(grid.psi(i));
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    Shot shot;
    try {
        shot = shoot(metric, spec, x_north, times);
    } catch (const ProfileFailure& f) {
        std::ostringstream os;
        os << "embed_axisym: non-embeddable profile at s = " << f.s << ": " << f.why;
        throw EmbeddingError(os.str());
    }
    if (shot.excess > 1e-6) {
        std::ostringstream os;
        os << "embed_axisym: non-embeddable profile at s = " << shot.excess_s
           << " (1 - phi^2 psi'^2 < 0)";
        throw EmbeddingError(os.str());
    }

    AxisymEmbedding out{{}, 0.0, 0.0, 0.0, RadialGraph(grid, Field(grid.size(), x_north), spec)};
    for (std::size_t k = 0; k < shot.psi.size(); ++k)
        out.profile.push_back({shot.y[k][2], shot.y[k][0], shot.psi[k], shot.y[k][1], shot.dy[k][0], shot.dy[k][1]});
    out.x_north = x_north;
    out.x_south = shot.y.back()[0];

    Field rho(grid.size());
    std::vector<double> pnode(grid.n_psi), dpnode(grid.n_psi);
    for (int i = 0; i < grid.n_psi; ++i) {
        const double psi = grid.psi(i);
        auto it = std::lower_bound(shot.psi.begin(), shot.psi.end(), psi);
        const std::size_t k = it - shot.psi.begin();
        pnode[i] = shot.y[k][1];
        dpnode[i] = shot.dy[k][1];
        for (int j = 0; j < grid.n_theta; ++j) rho[grid.idx(i, j)] = shot.y[k][0];
    }
    out.graph = RadialGraph(grid, std::move(rho), spec);

    const Metric2S ind = induced_metric(out.graph);
    double err = 0.0;
    for (int i = 0; i < grid.n_psi; ++i) {
        const AxisymMetric::Value v = metric(pnode[i]);
        const double s = std::sin(grid.psi(i));
        const double at = v.L * v.L * dpnode[i] * dpnode[i], ct = v.alpha * v.alpha / (s * s);
        for (int j = 0; j < grid.n_theta; ++j) {
            const int id = grid.idx(i, j);
            err = std::max({err, std::abs(ind.a()[id] - at), std::abs(ind.b()[id]), std::abs(ind.c()[id] - ct)});
        }
    }
    out.round_trip = err;
    return out;
}

Field flat_mean_curvature(const AxisymMetric& metric, const SphereGrid& grid)
{
    const AxisymEmbedding e = embed_axisym(metric, WarpSpec::euclidean(), grid);
    const ShapeData sh = shape_of(e.graph, Exec::serial);
    std::vector<double> col(grid.n_psi);
    for (int i = 0; i < grid.n_psi; ++i) col[i] = sh.H[grid.idx(i, 0)];
    const CosineSeries H(col);
    Field out(grid.size());
    for (int i = 0; i < grid.n_psi; ++i) {
        const double v = H(e.psi_of_p(grid.psi(i)));
        for (int j = 0; j < grid.n_theta; ++j) out[grid.idx(i, j)] = v;
    }
    return out;
}

double brown_york_axisym(const RadialGraph& graph)
{
    const Metric2S m = induced_metric(graph);
    const ShapeData sh = shape_of(graph, Exec::serial);
    const Field Ho = flat_mean_curvature(AxisymMetric::from_metric(m), graph.grid());
    return brown_york_mass(m, sh.H, Ho);
}

std::vector<std::array<double, 3>> axisym_points(const AxisymEmbedding& e, const SphereGrid& grid)
{
    std::vector<std::array<double, 3>> pts(grid.size());
    for (int i = 0; i < grid.n_psi; ++i) {
        const double psi = e.psi_of_p(grid.psi(i));
        const double x = e.x_of_psi(psi);
        for (int j = 0; j < grid.n_theta; ++j) {
            const double th = grid.theta(j);
            pts[grid.idx(i, j)] = {x * std::sin(psi) * std::cos(th), x * std::sin(psi) * std::sin(th),
                                   x * std::cos(psi)};
        }
    }
    return pts;
}

} // namespace weyl
