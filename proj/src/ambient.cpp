#include "weyl/ambient.hpp"

#include "weyl/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace weyl {

namespace {

double integrate(const std::function<double(double)>& f, double a, double b)
{
    if (b <= a) return 0.0;
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-14, &err);
}

std::string fmt(double x)
{
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

} // namespace

Pchip::Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y))
{
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw ConfigError("table needs >= 2 points of matching length");
    for (std::size_t k = 1; k < n; ++k)
        if (!(x_[k] > x_[k - 1])) throw ConfigError("table abscissae must increase strictly");
    std::vector<double> h(n - 1), del(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h[k] = x_[k + 1] - x_[k];
        del[k] = (y_[k + 1] - y_[k]) / h[k];
    }
    d_.assign(n, 0.0);
    if (n == 2) {
        d_[0] = d_[1] = del[0];
        return;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (del[k - 1] * del[k] <= 0.0) continue;
        const double w1 = 2.0 * h[k] + h[k - 1], w2 = h[k] + 2.0 * h[k - 1];
        d_[k] = (w1 + w2) / (w1 / del[k - 1] + w2 / del[k]);
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (d * d0 <= 0.0) return 0.0;
        if (d0 * d1 <= 0.0 && std::abs(d) > std::abs(3.0 * d0)) return 3.0 * d0;
        return d;
    };
    d_[0] = end_slope(h[0], h[1], del[0], del[1]);
    d_[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
}

Pchip::Value Pchip::operator()(double x) const
{
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t k = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    k = std::min(k, x_.size() - 2);
    const double h = x_[k + 1] - x_[k];
    const double t = (x - x_[k]) / h;
    const double y0 = y_[k], y1 = y_[k + 1], m0 = d_[k] * h, m1 = d_[k + 1] * h;
    // Hermite basis in t
    const double c0 = y0, c1 = m0, c2 = 3.0 * (y1 - y0) - 2.0 * m0 - m1, c3 = 2.0 * (y0 - y1) + m0 + m1;
    Value v;
    v.f = c0 + t * (c1 + t * (c2 + t * c3));
    v.d1 = (c1 + t * (2.0 * c2 + 3.0 * t * c3)) / h;
    v.d2 = (2.0 * c2 + 6.0 * t * c3) / (h * h);
    v.d3 = 6.0 * c3 / (h * h * h);
    return v;
}

std::string to_string(Family f)
{
    switch (f) {
    case Family::euclidean: return "euclidean";
    case Family::hyperbolic: return "hyperbolic";
    case Family::spherical: return "spherical";
    case Family::ads_schwarzschild: return "ads-schwarzschild";
    case Family::reissner_nordstrom: return "reissner-nordstrom";
    case Family::custom: return "custom";
    }
    return "custom";
}

namespace {

void check_n(int n)
{
    if (n < 2) throw ConfigError("warp: hypersurface dimension n must be >= 2");
}

} // namespace

WarpSpec WarpSpec::euclidean(int n)
{
    check_n(n);
    WarpSpec w;
    w.family_ = Family::euclidean;
    w.n_ = n;
    w.domain_ = {0.0, std::numeric_limits<double>::infinity()};
    w.label_ = "euclidean";
    return w;
}

WarpSpec WarpSpec::hyperbolic(int n)
{
    WarpSpec w = euclidean(n);
    w.family_ = Family::hyperbolic;
    w.label_ = "hyperbolic";
    return w;
}

WarpSpec WarpSpec::spherical(int n)
{
    WarpSpec w = euclidean(n);
    w.family_ = Family::spherical;
    w.domain_ = {0.0, M_PI};
    w.label_ = "spherical";
    return w;
}

WarpSpec WarpSpec::ads_schwarzschild(double m, double kappa_cosmo, int n)
{
    check_n(n);
    if (!(m > 0.0) || !std::isfinite(m)) throw ConfigError("ads-schwarzschild: mass m must be > 0");
    if (!std::isfinite(kappa_cosmo)) throw ConfigError("ads-schwarzschild: kappa must be finite");
    WarpSpec w;
    w.family_ = Family::ads_schwarzschild;
    w.n_ = n;
    w.eta_form_ = true;
    w.m_ = m;
    w.kappa_ = kappa_cosmo;
    w.label_ = "ads-schwarzschild";
    w.init_eta_domain();
    return w;
}

WarpSpec WarpSpec::reissner_nordstrom(double m, double q, int n)
{
    check_n(n);
    if (!(q > 0.0) || !(m > 2.0 * q) || !std::isfinite(m))
        throw ConfigError("reissner-nordstrom: needs m > 2q > 0, got m=" + fmt(m) + " q=" + fmt(q));
    WarpSpec w;
    w.family_ = Family::reissner_nordstrom;
    w.n_ = n;
    w.eta_form_ = true;
    w.m_ = m;
    w.q_ = q;
    w.label_ = "reissner-nordstrom";
    w.init_eta_domain();
    return w;
}

WarpSpec WarpSpec::custom_phi(std::vector<double> r, std::vector<double> phi, int n)
{
    check_n(n);
    if (!r.empty() && r.front() < 0.0) throw ConfigError("custom phi table: r must be >= 0");
    for (std::size_t k = 0; k < phi.size(); ++k)
        if (!(phi[k] > 0.0) && !(k == 0 && r.front() == 0.0 && phi[k] == 0.0))
            throw ConfigError("custom phi table: phi must be positive on the open domain");
    WarpSpec w;
    w.family_ = Family::custom;
    w.n_ = n;
    w.table_ = Pchip(std::move(r), std::move(phi));
    w.domain_ = {w.table_.front(), w.table_.back()};
    w.x0_ = w.table_.front();
    w.label_ = "custom-phi";
    return w;
}

WarpSpec WarpSpec::custom_eta(std::vector<double> s, std::vector<double> eta, int n)
{
    check_n(n);
    if (s.empty() || !(s.front() > 0.0)) throw ConfigError("custom eta table: s must be > 0");
    for (std::size_t k = 1; k < eta.size(); ++k)
        if (!(eta[k] > 0.0)) throw ConfigError("custom eta table: eta must be positive past the first point");
    if (!eta.empty() && eta.front() < 0.0) throw ConfigError("custom eta table: eta must be >= 0");
    WarpSpec w;
    w.family_ = Family::custom;
    w.n_ = n;
    w.eta_form_ = true;
    w.custom_eta_ = true;
    for (double& e : eta) e *= e;
    w.table_ = Pchip(std::move(s), std::move(eta));
    w.domain_ = {w.table_.front(), w.table_.back()};
    w.x0_ = w.table_.front();
    w.has_horizon_ = w.table_.front_value() == 0.0;
    w.label_ = "custom-eta";
    return w;
}

void WarpSpec::init_eta_domain()
{
    const HorizonRoots r = horizon_roots(*this);
    domain_ = {r.s_lower, r.s_upper};
    x0_ = r.s_lower;
    has_horizon_ = true;
}

bool WarpSpec::space_form() const
{
    return family_ == Family::euclidean || family_ == Family::hyperbolic || family_ == Family::spherical;
}

double WarpSpec::space_form_curvature() const
{
    switch (family_) {
    case Family::euclidean: return 0.0;
    case Family::hyperbolic: return -1.0;
    case Family::spherical: return 1.0;
    default: throw UnsupportedError("space_form_curvature: " + to_string(family_) + " is not a space form");
    }
}

void WarpSpec::require_inside(double x, const char* what) const
{
    if (!std::isfinite(x) || !domain_.contains(x))
        throw DomainError(std::string(what) + ": coordinate " + fmt(x) + " outside (" + fmt(domain_.lo) + ", "
                          + fmt(domain_.hi) + ") for " + label_);
}

double WarpSpec::F(double s) const
{
    const double n = n_;
    switch (family_) {
    case Family::ads_schwarzschild: return 1.0 - m_ * std::pow(s, 1.0 - n) - kappa_ * s * s;
    case Family::reissner_nordstrom:
        return 1.0 - m_ * std::pow(s, 1.0 - n) + q_ * q_ * std::pow(s, 2.0 * (1.0 - n));
    case Family::custom:
        if (custom_eta_) return table_(s).f;
        break;
    default: break;
    }
    throw UnsupportedError("F(s) is defined for eta-form families only");
}

double WarpSpec::dF(double s) const
{
    const double n = n_;
    switch (family_) {
    case Family::ads_schwarzschild: return m_ * (n - 1.0) * std::pow(s, -n) - 2.0 * kappa_ * s;
    case Family::reissner_nordstrom:
        return m_ * (n - 1.0) * std::pow(s, -n) + 2.0 * (1.0 - n) * q_ * q_ * std::pow(s, 1.0 - 2.0 * n);
    case Family::custom:
        if (custom_eta_) return table_(s).d1;
        break;
    default: break;
    }
    throw UnsupportedError("F'(s) is defined for eta-form families only");
}

double WarpSpec::ddF(double s) const
{
    const double n = n_;
    switch (family_) {
    case Family::ads_schwarzschild: return -m_ * n * (n - 1.0) * std::pow(s, -n - 1.0) - 2.0 * kappa_;
    case Family::reissner_nordstrom:
        return -m_ * n * (n - 1.0) * std::pow(s, -n - 1.0)
               + 2.0 * (1.0 - n) * (1.0 - 2.0 * n) * q_ * q_ * std::pow(s, -2.0 * n);
    case Family::custom:
        if (custom_eta_) return table_(s).d2;
        break;
    default: break;
    }
    throw UnsupportedError("F''(s) is defined for eta-form families only");
}

double WarpSpec::F_above_horizon(double t) const
{
    // F(s0 + t) - F(s0) term by term, without cancellation for small t
    const double s0 = x0_, n = n_;
    auto pdiff = [&](double p) { return std::pow(s0, p) * std::expm1(p * std::log1p(t / s0)); };
    switch (family_) {
    case Family::ads_schwarzschild: return -m_ * pdiff(1.0 - n) - kappa_ * t * (2.0 * s0 + t);
    case Family::reissner_nordstrom: return -m_ * pdiff(1.0 - n) + q_ * q_ * pdiff(2.0 * (1.0 - n));
    default: return F(s0 + t);
    }
}

WarpSample WarpSpec::sample(double x) const
{
    require_inside(x, "warp sample");
    WarpSample w;
    if (eta_form_) {
        const double f = F(x), f1 = dF(x), f2 = ddF(x);
        if (!(f > 0.0)) throw DomainError("warp sample: eta vanishes at s=" + fmt(x));
        const double eta = std::sqrt(f);
        w.phi = x;
        w.dphi = eta;
        w.ddphi = 0.5 * f1;
        w.dddphi = 0.5 * eta * f2;
        w.a = 1.0 / eta;
        w.a_x = -0.5 * f1 / (f * eta);
        return w;
    }
    switch (family_) {
    case Family::euclidean:
        w.phi = x;
        w.dphi = 1.0;
        break;
    case Family::hyperbolic:
        w.phi = std::sinh(x);
        w.dphi = std::cosh(x);
        w.ddphi = w.phi;
        w.dddphi = w.dphi;
        break;
    case Family::spherical:
        w.phi = std::sin(x);
        w.dphi = std::cos(x);
        w.ddphi = -w.phi;
        w.dddphi = -w.dphi;
        break;
    default: {
        const auto v = table_(x);
        w.phi = v.f;
        w.dphi = v.d1;
        w.ddphi = v.d2;
        w.dddphi = v.d3;
    }
    }
    return w;
}

double WarpSpec::Phi(double x) const
{
    if (!std::isfinite(x) || x < domain_.lo || x >= domain_.hi)
        throw DomainError("Phi: coordinate " + fmt(x) + " outside the domain of " + label_);
    if (eta_form_) {
        // sigma = s0 + u^2 removes the 1/eta singularity at the horizon
        const double s0 = x0_;
        auto g = [&](double u) {
            const double f = F_above_horizon(u * u);
            return f > 0.0 ? 2.0 * u * (s0 + u * u) / std::sqrt(f) : 0.0;
        };
        return integrate(g, 0.0, std::sqrt(x - s0));
    }
    switch (family_) {
    case Family::euclidean: return 0.5 * x * x;
    case Family::hyperbolic: return std::cosh(x) - 1.0;
    case Family::spherical: return 1.0 - std::cos(x);
    default: return integrate([&](double r) { return table_(r).f; }, x0_, x);
    }
}

double WarpSpec::radial_distance(double x) const
{
    if (!eta_form_) return x - x0_;
    if (!std::isfinite(x) || x < domain_.lo || x >= domain_.hi)
        throw DomainError("radial_distance: coordinate " + fmt(x) + " outside the domain of " + label_);
    const double s0 = x0_;
    auto g = [&](double u) {
        const double f = F_above_horizon(u * u);
        return f > 0.0 ? 2.0 * u / std::sqrt(f) : 0.0;
    };
    return integrate(g, 0.0, std::sqrt(x - s0));
}

double WarpSpec::x_of_phi(double p) const
{
    if (!(p > 0.0)) throw DomainError("x_of_phi: phi must be positive");
    if (eta_form_) {
        require_inside(p, "x_of_phi");
        return p;
    }
    switch (family_) {
    case Family::euclidean: return p;
    case Family::hyperbolic: return std::asinh(p);
    case Family::spherical:
        if (p >= 1.0) throw DomainError("x_of_phi: spherical warp has phi <= 1");
        return std::asin(p);
    default: break;
    }
    double lo = domain_.lo, hi = domain_.hi;
    if (!(table_(hi).f >= p)) throw DomainError("x_of_phi: phi beyond the custom table");
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (table_(mid).f < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

WarpEval warp_eval(const WarpSpec& spec, double rho)
{
    const WarpSample s = spec.sample(rho);
    return {s.phi, s.dphi, s.ddphi, spec.Phi(rho)};
}

AmbientCurvature curvature_at(const WarpSpec& spec, double rho)
{
    spec.require_inside(rho, "curvature_at");
    const double n = spec.n();
    double Rt, Rr;
    if (spec.space_form()) {
        Rt = Rr = spec.space_form_curvature();
    } else if (spec.eta_form()) {
        Rt = (1.0 - spec.F(rho)) / (rho * rho);
        Rr = -0.5 * spec.dF(rho) / rho;
    } else {
        const WarpSample w = spec.sample(rho);
        Rt = (1.0 - w.dphi * w.dphi) / (w.phi * w.phi);
        Rr = -w.ddphi / w.phi;
    }
    AmbientCurvature c;
    c.R_tan = Rt;
    c.R_rad = Rr;
    c.Ric_tan = (n - 1.0) * Rt + Rr;
    c.Ric_rad = n * Rr;
    c.Rbar = n * (n - 1.0) * Rt + 2.0 * n * Rr;
    return c;
}

HorizonRoots horizon_roots(const WarpSpec& spec)
{
    if (!spec.eta_form()) throw UnsupportedError("horizon_roots: " + spec.label() + " is not an eta-form family");
    if (spec.family() == Family::custom) {
        if (!spec.has_horizon()) throw ConfigError("horizon_roots: custom eta table has no zero");
        return {spec.x0(), std::numeric_limits<double>::infinity()};
    }
    // sign scan on a log grid, then bracketed refinement
    const int samples = 4000;
    const double lo = std::log(1e-8), hi = std::log(1e8);
    std::vector<std::pair<double, double>> up, down;
    double s_prev = std::exp(lo), f_prev = spec.F(s_prev);
    for (int k = 1; k <= samples; ++k) {
        const double s = std::exp(lo + (hi - lo) * k / samples);
        const double f = spec.F(s);
        if (f_prev < 0.0 && f >= 0.0) up.emplace_back(s_prev, s);
        if (f_prev >= 0.0 && f < 0.0) down.emplace_back(s_prev, s);
        s_prev = s;
        f_prev = f;
    }
    if (up.empty()) throw ConfigError("horizon_roots: eta^2 has no positive root for these parameters");
    auto refine = [&](std::pair<double, double> br) {
        boost::uintmax_t iters = 200;
        auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-15 * std::abs(a); };
        auto r = boost::math::tools::toms748_solve([&](double s) { return spec.F(s); }, br.first, br.second, tol,
                                                   iters);
        double s = 0.5 * (r.first + r.second);
        // Newton polish
        for (int k = 0; k < 3; ++k) {
            const double d = spec.dF(s);
            if (d == 0.0) break;
            const double step = spec.F(s) / d;
            if (std::abs(step) > 1e-10 * s) break;
            s -= step;
        }
        return s;
    };
    HorizonRoots out;
    out.s_lower = refine(up.back());
    out.s_upper = std::numeric_limits<double>::infinity();
    for (const auto& d : down)
        if (d.first >= out.s_lower) {
            out.s_upper = refine(d);
            break;
        }
    return out;
}

StaticResidual static_residual(const WarpSpec& spec, double s)
{
    const WarpSample w = spec.sample(s);
    const double n = spec.n();
    const double phi = w.phi, d1 = w.dphi, d2 = w.ddphi, d3 = w.dddphi;
    // static potential V = phi'; radial/tangential eigenvalues of
    // (Lap V) g - Hess V + V Ric
    const double hess_rr = d3, hess_tt = d1 * d2 / phi;
    const double lap = hess_rr + n * hess_tt;
    AmbientCurvature c = curvature_at(spec, s);
    StaticResidual out;
    out.lambda_rad = lap - hess_rr + d1 * c.Ric_rad;
    out.lambda_tan = lap - hess_tt + d1 * c.Ric_tan;
    return out;
}

SliceShape slice_shape(const WarpSpec& spec, double rho)
{
    const WarpSample w = spec.sample(rho);
    const double n = spec.n();
    const double k = w.dphi / w.phi;
    return {k, n * k, 0.5 * n * (n - 1.0) * k * k};
}

WarpSpec preset(const std::string& name)
{
    if (name == "euclidean") return WarpSpec::euclidean();
    if (name == "hyperbolic") return WarpSpec::hyperbolic();
    if (name == "spherical") return WarpSpec::spherical();
    if (name == "schwarzschild-m1") return WarpSpec::ads_schwarzschild(1.0, 0.0).with_label(name);
    if (name == "ads-schwarzschild-m1k-1") return WarpSpec::ads_schwarzschild(1.0, -1.0).with_label(name);
    if (name == "rn-m2q05") return WarpSpec::reissner_nordstrom(2.0, 0.5).with_label(name);
    throw ConfigError("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names()
{
    return {"euclidean", "hyperbolic", "spherical", "schwarzschild-m1", "ads-schwarzschild-m1k-1", "rn-m2q05"};
}

} // namespace weyl
