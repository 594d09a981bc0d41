#include "weyl/estimates.hpp"

#include "weyl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace weyl {

Field prescribed_f(const ShapeData& shape, const WarpSpec& spec)
{
    const Field ric = ambient_ric_nu(shape, spec);
    Field f(shape.rho.size());
    for (std::size_t k = 0; k < f.size(); ++k) {
        const AmbientCurvature c = curvature_at(spec, shape.rho[k]);
        f[k] = 0.5 * (shape.R_intrinsic[k] - c.Rbar) + ric[k];
    }
    return f;
}

double master_identity_defect(const ShapeData& shape, const WarpSpec& spec)
{
    const Field f = prescribed_f(shape, spec);
    double d = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) d = std::max(d, std::abs(shape.sigma2[k] - f[k]));
    return d;
}

double ellipticity_threshold(const WarpSpec& spec, Region region, int samples)
{
    if (!(region.lo <= region.hi)) throw ConfigError("ellipticity region: lo must not exceed hi");
    spec.require_inside(region.lo, "ellipticity region");
    spec.require_inside(region.hi, "ellipticity region");
    samples = std::max(samples, 2);
    double sup = -std::numeric_limits<double>::infinity();
    for (int q = 0; q < samples; ++q) {
        const double x = region.lo + (region.hi - region.lo) * q / (samples - 1);
        const AmbientCurvature c = curvature_at(spec, x);
        sup = std::max(sup, c.Rbar - 2.0 * c.min_ricci());
    }
    return sup;
}

EllipticityReport ellipticity_check(const Metric2S& metric, const WarpSpec& spec, Region region, int samples)
{
    EllipticityReport r;
    const Field R = intrinsic_curvature(metric);
    r.min_R = *std::min_element(R.begin(), R.end());
    r.rhs_sup = ellipticity_threshold(spec, region, samples);
    r.margin = r.min_R - r.rhs_sup;
    r.holds = r.margin > 0.0;
    return r;
}

Hessian2 surface_hessian(const ShapeData& shape, const Field& f)
{
    const SphereGrid& g = shape.grid;
    const Deriv d(g, shape.scheme);
    const FrameConnection con = frame_connection(shape.metric(), d);
    const Field fp = d.d_psi(f, +1), fpp = d.d_psipsi(f, +1);
    const Field ft = d.d_theta(f), ftt = d.d_thetatheta(f), fpt = d.d_theta(fp);
    Hessian2 h{Field(g.size()), Field(g.size()), Field(g.size())};
    const int m = g.n_theta;
    for (int k = 0; k < g.size(); ++k) {
        const double psi = g.psi(k / m), s = std::sin(psi), cot = std::cos(psi) / s;
        const double e[2] = {fp[k], ft[k] / s};
        double ee[2][2];
        ee[0][0] = fpp[k];
        ee[0][1] = fpt[k] / s - cot * ft[k] / s;
        ee[1][0] = fpt[k] / s;
        ee[1][1] = ftt[k] / (s * s);
        double H[2][2];
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                H[a][b] = ee[a][b] - con.gamma[0][a][b][k] * e[0] - con.gamma[1][a][b][k] * e[1];
        h.h11[k] = H[0][0];
        h.h12[k] = 0.5 * (H[0][1] + H[1][0]);
        h.h22[k] = H[1][1];
    }
    return h;
}

namespace {

// g-norm of a symmetric 2-tensor T
double g_norm(double g11, double g12, double g22, double t11, double t12, double t22)
{
    const double det = g11 * g22 - g12 * g12;
    const double i11 = g22 / det, i12 = -g12 / det, i22 = g11 / det;
    // |T|^2 = tr((g^-1 T)^2)
    const double m11 = i11 * t11 + i12 * t12, m12 = i11 * t12 + i12 * t22;
    const double m21 = i12 * t11 + i22 * t12, m22 = i12 * t12 + i22 * t22;
    return std::sqrt(std::max(0.0, m11 * m11 + 2.0 * m12 * m21 + m22 * m22));
}

// smallest lambda with det(A - lambda g) = 0
double min_gen_eig(double g11, double g12, double g22, double a11, double a12, double a22)
{
    const double det_g = g11 * g22 - g12 * g12;
    const double b = a11 * g22 + a22 * g11 - 2.0 * a12 * g12;
    const double c = a11 * a22 - a12 * a12;
    const double disc = std::sqrt(std::max(0.0, b * b - 4.0 * det_g * c));
    return (b - disc) / (2.0 * det_g);
}

} // namespace

Field warp_hessian_residual(const RadialGraph& graph, PsiScheme scheme)
{
    const ShapeData s = shape_of(graph, Exec::parallel, scheme);
    const AmbientScalar P = warp_potential_samples(graph);
    const Hessian2 H = surface_hessian(s, P.values);
    Field out(s.rho.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double vn = (*P.d_nu)[k];
        const double t11 = H.h11[k] - s.dphi[k] * s.g11[k] + vn * s.h11[k];
        const double t12 = H.h12[k] - s.dphi[k] * s.g12[k] + vn * s.h12[k];
        const double t22 = H.h22[k] - s.dphi[k] * s.g22[k] + vn * s.h22[k];
        out[k] = g_norm(s.g11[k], s.g12[k], s.g22[k], t11, t12, t22);
    }
    return out;
}

AmbientScalar warp_potential_samples(const RadialGraph& graph)
{
    const Field& rho = graph.rho();
    const ShapeData s = shape_of(graph);
    AmbientScalar out;
    out.values.resize(rho.size());
    Field dn(rho.size());
    for (std::size_t k = 0; k < rho.size(); ++k) {
        out.values[k] = graph.spec().Phi(rho[k]);
        dn[k] = s.phi[k] / s.W[k];
    }
    out.d_nu = std::move(dn);
    return out;
}

AmbientScalar distance_squared_samples(const RadialGraph& graph)
{
    const WarpSpec& w = graph.spec();
    if (w.eta_form() || w.x0() != 0.0)
        throw UnsupportedError("distance_squared_samples: needs a warp with a center at r = 0");
    const ShapeData s = shape_of(graph);
    AmbientScalar out;
    out.values.resize(s.rho.size());
    Field dn(s.rho.size());
    for (std::size_t k = 0; k < s.rho.size(); ++k) {
        const double r = s.rho[k];
        out.values[k] = r * r;
        dn[k] = 2.0 * r / s.W[k];
    }
    out.d_nu = std::move(dn);
    return out;
}

CondPhiFit cond_phi_fit(const RadialGraph& graph, const Field& Phi_values, const std::optional<Field>& dPhi_nu)
{
    if (Phi_values.size() != graph.rho().size()) throw ConfigError("cond_phi_fit: Phi has the wrong length");
    const ShapeData s = shape_of(graph);
    const Hessian2 H = surface_hessian(s, Phi_values);
    const std::size_t n = Phi_values.size();
    auto c1_of = [&](double c2) {
        double c1 = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k)
            c1 = std::min(c1, min_gen_eig(s.g11[k], s.g12[k], s.g22[k], H.h11[k] + c2 * s.h11[k],
                                          H.h12[k] + c2 * s.h12[k], H.h22[k] + c2 * s.h22[k]));
        return c1;
    };
    const double c2_max = dPhi_nu ? sup_norm(*dPhi_nu) : 0.0;
    CondPhiFit best{c1_of(0.0), 0.0, false};
    if (c2_max > 0.0) {
        // C1(C2) is a minimum of concave functions, hence concave: sweep, then
        // golden-section around the best sample
        const int sweep = 200;
        int arg = 0;
        for (int q = 1; q <= sweep; ++q) {
            const double c2 = c2_max * q / sweep;
            const double c1 = c1_of(c2);
            if (c1 > best.C1) {
                best = {c1, c2, false};
                arg = q;
            }
        }
        double lo = c2_max * std::max(arg - 1, 0) / sweep, hi = c2_max * std::min(arg + 1, sweep) / sweep;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        double f1 = c1_of(x1), f2 = c1_of(x2);
        for (int it = 0; it < 60 && hi - lo > 1e-12 * (1.0 + c2_max); ++it) {
            if (f1 < f2) {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + gr * (hi - lo);
                f2 = c1_of(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - gr * (hi - lo);
                f1 = c1_of(x1);
            }
        }
        const double xm = 0.5 * (lo + hi), fm = c1_of(xm);
        if (fm > best.C1) best = {fm, xm, false};
    }
    best.feasible = best.C1 > 0.0;
    return best;
}

CondPhiFit cond_phi_fit(const RadialGraph& graph, const AmbientScalar& Phi)
{
    return cond_phi_fit(graph, Phi.values, Phi.d_nu);
}

double BoundCertificate::envelope(double d) const { return fitted_A1 * std::exp(fitted_A2 * d); }

bool BoundCertificate::covers(double d, double k) const { return k <= envelope(d) * (1.0 + 1e-12); }

CertificateMember certificate_member(const RadialGraph& graph, int index)
{
    const WarpSpec& w = graph.spec();
    const ShapeData s = shape_of(graph, Exec::serial);
    CertificateMember m;
    m.tolerance = std::max(1e-10, 10.0 * master_identity_defect(s, w));
    double phi_min = std::numeric_limits<double>::infinity();
    double Phi_lo = std::numeric_limits<double>::infinity(), Phi_hi = -Phi_lo;
    m.sigma2_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < s.rho.size(); ++k) {
        if (s.sigma2[k] < -m.tolerance)
            throw HypothesisError("surface " + std::to_string(index) + " has sigma_2 = " + std::to_string(s.sigma2[k])
                                      + " < 0 at node " + std::to_string(k),
                                  index, static_cast<int>(k));
        if (!(s.dphi[k] > 0.0))
            throw HypothesisError("surface " + std::to_string(index) + " has phi' <= 0 at node " + std::to_string(k),
                                  index, static_cast<int>(k));
        m.sigma2_min = std::min(m.sigma2_min, s.sigma2[k]);
        phi_min = std::min(phi_min, s.dphi[k]);
        const double P = w.Phi(s.rho[k]);
        Phi_lo = std::min(Phi_lo, P);
        Phi_hi = std::max(Phi_hi, P);
        m.sup_kappa = std::max({m.sup_kappa, std::abs(s.kappa1[k]), std::abs(s.kappa2[k])});
    }
    m.drive = (Phi_hi - Phi_lo) / phi_min;
    return m;
}

BoundCertificate fit_envelope(const std::vector<CertificateMember>& members)
{
    if (members.empty()) throw ConfigError("bound certificate: empty family");
    BoundCertificate c;
    // A2 = 0 is always feasible, so it is the minimal A2; the smallest A1 is
    // then the largest sup_kappa
    c.fitted_A2 = 0.0;
    for (const auto& m : members) {
        c.per_surface.emplace_back(m.drive, m.sup_kappa);
        c.sup_kappa = std::max(c.sup_kappa, m.sup_kappa);
        c.drive = std::max(c.drive, m.drive);
    }
    c.fitted_A1 = c.sup_kappa;
    return c;
}

BoundCertificate bound_certificate(const std::vector<RadialGraph>& family, Exec exec)
{
    std::vector<CertificateMember> members(family.size());
    std::vector<std::string> errors(family.size());
    std::vector<std::pair<int, int>> where(family.size(), {-1, -1});
    for_range(exec, static_cast<int>(family.size()), [&](int q) {
        try {
            members[q] = certificate_member(family[q], q);
        } catch (const HypothesisError& e) {
            errors[q] = e.what();
            where[q] = {e.surface, e.node};
        }
    });
    for (std::size_t q = 0; q < family.size(); ++q)
        if (!errors[q].empty()) throw HypothesisError(errors[q], where[q].first, where[q].second);
    return fit_envelope(members);
}

HorizonObstruction horizon_obstruction(const RadialGraph& graph)
{
    const WarpSpec& w = graph.spec();
    if (!w.eta_form()) throw UnsupportedError("horizon_obstruction: needs an eta-form warp, got " + w.label());
    const ShapeData s = shape_of(graph);
    const auto it = std::min_element(s.rho.begin(), s.rho.end());
    HorizonObstruction h;
    h.node = static_cast<int>(it - s.rho.begin());
    const double phi = w.sample(*it).phi;
    const double phi0 = w.x0(); // phi = s in eta-form
    h.R_at_min = s.R_intrinsic[h.node];
    h.gauss_cap = 2.0 / (phi * phi);
    h.ellipticity_needs = 2.0 / (phi0 * phi0);
    h.contradiction = h.ellipticity_needs > h.gauss_cap;
    return h;
}

LaplacianFCheck laplacian_f_check(const ShapeData& shape, const WarpSpec& spec)
{
    const Field f = prescribed_f(shape, spec);
    const Hessian2 Hf = surface_hessian(shape, f);
    const Deriv d(shape.grid, shape.scheme);
    const auto [H1, H2] = frame_gradient(d, shape.H, +1);
    LaplacianFCheck out;
    for (std::size_t k = 0; k < f.size(); ++k) {
        const double g11 = shape.g11[k], g12 = shape.g12[k], g22 = shape.g22[k];
        const double det = g11 * g22 - g12 * g12;
        const double i11 = g22 / det, i12 = -g12 / det, i22 = g11 / det;
        const double lap = i11 * Hf.h11[k] + 2.0 * i12 * Hf.h12[k] + i22 * Hf.h22[k];
        const double hn = g_norm(g11, g12, g22, shape.h11[k], shape.h12[k], shape.h22[k]);
        const double gradH = std::sqrt(std::max(0.0, i11 * H1[k] * H1[k] + 2.0 * i12 * H1[k] * H2[k] + i22 * H2[k] * H2[k]));
        out.ratio_sup = std::max(out.ratio_sup, std::abs(lap) / (hn * hn + gradH + 1.0));
    }
    return out;
}

double brown_york_mass(const Metric2S& metric, const Field& H_omega, const Field& H_o)
{
    const SphereGrid& g = metric.grid();
    if (static_cast<int>(H_omega.size()) != g.size() || static_cast<int>(H_o.size()) != g.size())
        throw ConfigError("brown_york_mass: mean-curvature arrays do not match the metric grid");
    const Field R = intrinsic_curvature(metric);
    for (int k = 0; k < g.size(); ++k)
        if (!(R[k] > 0.0))
            throw EmbeddingError("brown_york_mass: K <= 0 at node (" + std::to_string(k / g.n_theta) + ","
                                 + std::to_string(k % g.n_theta) + "), no flat isometric embedding");
    Field diff(g.size());
    for (int k = 0; k < g.size(); ++k) diff[k] = H_o[k] - H_omega[k];
    return Quadrature(g).integrate(diff, metric.area_density()) / (8.0 * M_PI);
}

} // namespace weyl
