#include "weyl/surface.hpp"

#include "weyl/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace weyl {

namespace {

using Mat2 = std::array<std::array<double, 2>, 2>;

// Orthonormalization e_i = P[i][a] E_a (Gram-Schmidt on E1, E2).
Mat2 gram_schmidt(double g11, double g12, double g22)
{
    const double r1 = std::sqrt(g11);
    const double d = std::sqrt(g22 - g12 * g12 / g11);
    return {{{1.0 / r1, 0.0}, {-g12 / (g11 * d), 1.0 / d}}};
}

} // namespace

RadialGraph::RadialGraph(SphereGrid grid, Field rho, WarpSpec spec, double gradient_cap)
    : grid_(grid), rho_(std::move(rho)), spec_(std::move(spec))
{
    if (static_cast<int>(rho_.size()) != grid_.size())
        throw ConfigError("radial graph: rho has " + std::to_string(rho_.size()) + " values, grid needs "
                          + std::to_string(grid_.size()));
    for (int k = 0; k < grid_.size(); ++k) spec_.require_inside(rho_[k], "radial graph");
    const Deriv d(grid_);
    const Field rp = d.d_psi(rho_, +1), rt = d.d_theta(rho_);
    for (int i = 0; i < grid_.n_psi; ++i) {
        const double s = std::sin(grid_.psi(i));
        for (int j = 0; j < grid_.n_theta; ++j) {
            const int k = grid_.idx(i, j);
            const double gr = std::hypot(rp[k], rt[k] / s) / rho_[k];
            gradient_sup_ = std::max(gradient_sup_, gr);
        }
    }
    flagged_ = gradient_sup_ > gradient_cap;
}

RadialGraph make_graph(const SphereGrid& grid, const WarpSpec& spec,
                       const std::function<double(double, double)>& rho)
{
    return RadialGraph(grid, sample(grid, rho), spec);
}

std::string to_string(Provenance p)
{
    switch (p) {
    case Provenance::analytic: return "analytic";
    case Provenance::induced: return "induced";
    case Provenance::flow: return "flow";
    }
    return "analytic";
}

Metric2S::Metric2S(SphereGrid grid, Field a, Field b, Field c, Provenance prov)
    : grid_(grid), a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), prov_(prov)
{
    const int n = grid_.size();
    if (static_cast<int>(a_.size()) != n || static_cast<int>(b_.size()) != n || static_cast<int>(c_.size()) != n)
        throw ConfigError("metric: component arrays do not match the grid");
    for (int i = 0; i < grid_.n_psi; ++i)
        for (int j = 0; j < grid_.n_theta; ++j) {
            const int k = grid_.idx(i, j);
            if (!(a_[k] > 0.0) || !(a_[k] * c_[k] - b_[k] * b_[k] > 0.0))
                throw GeometryError("metric is not positive definite", i, j);
        }
}

Metric2S Metric2S::from_EFG(const SphereGrid& grid, const Field& E, const Field& F, const Field& G, Provenance prov)
{
    Field a(E), b(F), c(G);
    for (int i = 0; i < grid.n_psi; ++i) {
        const double s = std::sin(grid.psi(i));
        for (int j = 0; j < grid.n_theta; ++j) {
            const int k = grid.idx(i, j);
            b[k] /= s;
            c[k] /= s * s;
        }
    }
    return Metric2S(grid, std::move(a), std::move(b), std::move(c), prov);
}

Metric2S Metric2S::round(const SphereGrid& grid, double radius)
{
    const double r2 = radius * radius;
    return Metric2S(grid, Field(grid.size(), r2), Field(grid.size(), 0.0), Field(grid.size(), r2),
                    Provenance::analytic);
}

Metric2S Metric2S::conformal_round(const SphereGrid& grid, Field u, Provenance prov)
{
    Field a(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) a[k] = std::exp(2.0 * u[k]);
    Metric2S m(grid, a, Field(u.size(), 0.0), a, prov);
    m.u_ = std::move(u);
    return m;
}

Field Metric2S::E() const { return a_; }

Field Metric2S::F() const
{
    Field out(b_);
    for (int i = 0; i < grid_.n_psi; ++i)
        for (int j = 0; j < grid_.n_theta; ++j) out[grid_.idx(i, j)] *= std::sin(grid_.psi(i));
    return out;
}

Field Metric2S::G() const
{
    Field out(c_);
    for (int i = 0; i < grid_.n_psi; ++i) {
        const double s = std::sin(grid_.psi(i));
        for (int j = 0; j < grid_.n_theta; ++j) out[grid_.idx(i, j)] *= s * s;
    }
    return out;
}

Field Metric2S::area_density() const
{
    Field out(a_.size());
    for (std::size_t k = 0; k < a_.size(); ++k) out[k] = std::sqrt(a_[k] * c_[k] - b_[k] * b_[k]);
    return out;
}

double Metric2S::area() const
{
    return Quadrature(grid_).integrate(Field(a_.size(), 1.0), area_density());
}

double Metric2S::pole_defect() const
{
    double worst = 0.0;
    for (int i : {0, grid_.n_psi - 1}) {
        // E1, E2 at the pole rows in a fixed tangent frame of the pole:
        // north: E1 = (cos t, sin t), E2 = (-sin t, cos t); south flips E1.
        const double sgn = i == 0 ? 1.0 : -1.0;
        double mean[3] = {0, 0, 0}, scale = 0.0;
        std::vector<std::array<double, 3>> vals(grid_.n_theta);
        for (int j = 0; j < grid_.n_theta; ++j) {
            const int k = grid_.idx(i, j);
            const double t = grid_.theta(j), ct = std::cos(t), st = std::sin(t);
            const double e1x = sgn * ct, e1y = sgn * st, e2x = -st, e2y = ct;
            // inverse frame: M = Q^T [[a,b],[b,c]] Q with rows of Q the dual basis
            const double det = e1x * e2y - e1y * e2x;
            const double q11 = e2y / det, q12 = -e2x / det, q21 = -e1y / det, q22 = e1x / det;
            const double A = a_[k], B = b_[k], C = c_[k];
            const double mxx = q11 * (A * q11 + B * q21) + q21 * (B * q11 + C * q21);
            const double mxy = q11 * (A * q12 + B * q22) + q21 * (B * q12 + C * q22);
            const double myy = q12 * (A * q12 + B * q22) + q22 * (B * q12 + C * q22);
            vals[j] = {mxx, mxy, myy};
            for (int c = 0; c < 3; ++c) mean[c] += vals[j][c] / grid_.n_theta;
            scale = std::max(scale, std::abs(A) + std::abs(C));
        }
        for (const auto& v : vals)
            for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(v[c] - mean[c]) / scale);
    }
    return worst;
}

Metric2S ShapeData::metric() const { return Metric2S(grid, g11, g12, g22, Provenance::induced); }

ShapeData ShapeData::flipped() const
{
    ShapeData s = *this;
    for (Field* f : {&s.h11, &s.h12, &s.h22, &s.H, &s.nu_r, &s.nu_psi, &s.nu_theta})
        for (double& x : *f) x = -x;
    for (std::size_t k = 0; k < s.kappa1.size(); ++k) {
        s.kappa1[k] = -kappa2[k];
        s.kappa2[k] = -kappa1[k];
    }
    return s;
}

std::pair<Field, Field> frame_gradient(const Deriv& d, const Field& f, int parity)
{
    const SphereGrid& g = d.grid();
    Field e1 = d.d_psi(f, parity);
    Field e2 = d.d_theta(f);
    for (int i = 0; i < g.n_psi; ++i) {
        const double inv = 1.0 / std::sin(g.psi(i));
        for (int j = 0; j < g.n_theta; ++j) e2[g.idx(i, j)] *= inv;
    }
    return {std::move(e1), std::move(e2)};
}

namespace {

Field resize_like(const SphereGrid& g) { return Field(g.size(), 0.0); }

struct GraphDerivs {
    Field rp, rpp, rt, rtt, rpt;
};

GraphDerivs graph_derivs(const Deriv& d, const Field& rho)
{
    GraphDerivs r;
    r.rp = d.d_psi(rho, +1);
    r.rpp = d.d_psipsi(rho, +1);
    r.rt = d.d_theta(rho);
    r.rtt = d.d_thetatheta(rho);
    r.rpt = d.d_theta(r.rp);
    return r;
}

} // namespace

ShapeData shape_of(const RadialGraph& graph, Exec exec, PsiScheme scheme)
{
    const SphereGrid& g = graph.grid();
    const WarpSpec& spec = graph.spec();
    const Deriv d(g, scheme);
    const GraphDerivs r = graph_derivs(d, graph.rho());

    ShapeData s;
    s.grid = g;
    s.scheme = scheme;
    s.rho = graph.rho();
    for (Field* f : {&s.g11, &s.g12, &s.g22, &s.h11, &s.h12, &s.h22, &s.nu_r, &s.nu_psi, &s.nu_theta, &s.kappa1,
                     &s.kappa2, &s.H, &s.sigma2, &s.phi, &s.dphi, &s.W, &s.du_psi, &s.du_theta})
        *f = resize_like(g);

    const int m = g.n_theta;
    for_range(exec, g.size(), [&](int k) {
        const int i = k / m;
        const double psi = g.psi(i), sn = std::sin(psi), cot = std::cos(psi) / sn;
        const WarpSample w = spec.sample(s.rho[k]);
        // derivatives of the geodesic radius u, du = a dx
        const double up = w.a * r.rp[k], ut = w.a * r.rt[k];
        const double upp = w.a * r.rpp[k] + w.a_x * r.rp[k] * r.rp[k];
        const double utt = w.a * r.rtt[k] + w.a_x * r.rt[k] * r.rt[k];
        const double upt = w.a * r.rpt[k] + w.a_x * r.rp[k] * r.rt[k];
        const double p1 = up, p2 = ut / sn;
        const double phi = w.phi, dphi = w.dphi;
        const double W = std::sqrt(1.0 + (p1 * p1 + p2 * p2) / (phi * phi));
        // round covariant Hessian of u in the orthonormal round frame
        const double H11 = upp, H12 = (upt - cot * ut) / sn, H22 = utt / (sn * sn) + cot * up;
        const double k2 = 2.0 * dphi / phi;
        s.g11[k] = phi * phi + p1 * p1;
        s.g12[k] = p1 * p2;
        s.g22[k] = phi * phi + p2 * p2;
        s.h11[k] = (-H11 + phi * dphi + k2 * p1 * p1) / W;
        s.h12[k] = (-H12 + k2 * p1 * p2) / W;
        s.h22[k] = (-H22 + phi * dphi + k2 * p2 * p2) / W;
        s.nu_r[k] = 1.0 / W;
        s.nu_psi[k] = -p1 / (phi * W);
        s.nu_theta[k] = -p2 / (phi * W);
        const double detg = s.g11[k] * s.g22[k] - s.g12[k] * s.g12[k];
        if (!(detg > 0.0)) throw GeometryError("degenerate induced metric", i, k % m);
        const double tr = (s.g22[k] * s.h11[k] - 2.0 * s.g12[k] * s.h12[k] + s.g11[k] * s.h22[k]) / detg;
        const double sig = (s.h11[k] * s.h22[k] - s.h12[k] * s.h12[k]) / detg;
        const double disc = std::sqrt(std::max(0.25 * tr * tr - sig, 0.0));
        s.H[k] = tr;
        s.sigma2[k] = sig;
        s.kappa1[k] = 0.5 * tr + disc;
        s.kappa2[k] = 0.5 * tr - disc;
        s.phi[k] = phi;
        s.dphi[k] = dphi;
        s.W[k] = W;
        s.du_psi[k] = p1;
        s.du_theta[k] = p2;
    });
    s.R_intrinsic = intrinsic_curvature(s.metric(), scheme, exec);
    return s;
}

Metric2S induced_metric(const RadialGraph& graph, PsiScheme scheme)
{
    const SphereGrid& g = graph.grid();
    const Deriv d(g, scheme);
    const Field rp = d.d_psi(graph.rho(), +1), rt = d.d_theta(graph.rho());
    Field a(g.size()), b(g.size()), c(g.size());
    for (int i = 0; i < g.n_psi; ++i) {
        const double sn = std::sin(g.psi(i));
        for (int j = 0; j < g.n_theta; ++j) {
            const int k = g.idx(i, j);
            const WarpSample w = graph.spec().sample(graph.rho()[k]);
            const double p1 = w.a * rp[k], p2 = w.a * rt[k] / sn;
            a[k] = w.phi * w.phi + p1 * p1;
            b[k] = p1 * p2;
            c[k] = w.phi * w.phi + p2 * p2;
        }
    }
    return Metric2S(g, std::move(a), std::move(b), std::move(c), Provenance::induced);
}

Field intrinsic_curvature(const Metric2S& metric, PsiScheme scheme, Exec exec)
{
    const SphereGrid& g = metric.grid();
    const Deriv d(g, scheme);
    const Field &a = metric.a(), &b = metric.b(), &c = metric.c();
    const Field ap = d.d_psi(a, +1), bp = d.d_psi(b, +1), cp = d.d_psi(c, +1), cpp = d.d_psipsi(c, +1);
    const Field at = d.d_theta(a), bt = d.d_theta(b), ct = d.d_theta(c), att = d.d_thetatheta(a);
    const Field bpt = d.d_theta(bp);
    Field R(g.size());
    const int m = g.n_theta;
    for_range(exec, g.size(), [&](int k) {
        const double psi = g.psi(k / m), s = std::sin(psi), co = std::cos(psi) / s;
        const double A = a[k], B = b[k], C = c[k];
        const double num = A * C * C + 0.5 * B * B * cpp[k] - B * B * C + 0.25 * A * cp[k] * cp[k]
                           + B * B * att[k] / (2 * s * s) - B * B * bpt[k] / s - 0.5 * B * bp[k] * cp[k]
                           - 0.5 * A * C * cpp[k] + C * at[k] * at[k] / (4 * s * s) + 0.25 * C * ap[k] * cp[k]
                           + B * bp[k] * bt[k] / s + A * C * bpt[k] / s + 0.5 * co * C * C * ap[k]
                           - C * ap[k] * bt[k] / (2 * s) - A * bp[k] * ct[k] / (2 * s)
                           - B * at[k] * bt[k] / (2 * s * s) - A * C * att[k] / (2 * s * s)
                           - B * at[k] * cp[k] / (4 * s) + B * ap[k] * ct[k] / (4 * s)
                           + A * at[k] * ct[k] / (4 * s * s) + 1.5 * co * B * B * cp[k] + co / s * A * C * bt[k]
                           - co * B * C * bp[k] - co * A * C * cp[k] - co / (2 * s) * B * C * at[k]
                           - co / (2 * s) * A * B * ct[k];
        const double det = A * C - B * B;
        R[k] = 2.0 * num / (det * det);
    });
    return R;
}

double gauss_bonnet_defect(const Metric2S& metric, PsiScheme scheme)
{
    Field K = intrinsic_curvature(metric, scheme);
    for (double& v : K) v *= 0.5;
    const double total = Quadrature(metric.grid()).integrate(K, metric.area_density());
    return std::abs(total - 4.0 * std::numbers::pi) / (4.0 * std::numbers::pi);
}

FrameConnection frame_connection(const Metric2S& metric, const Deriv& d)
{
    const SphereGrid& g = metric.grid();
    const Field* comp[2][2] = {{&metric.a(), &metric.b()}, {&metric.b(), &metric.c()}};
    // dg[c][a][b] = E_c g_ab
    Field dg[2][2][2];
    for (int a = 0; a < 2; ++a)
        for (int b = a; b < 2; ++b) {
            auto [e1, e2] = frame_gradient(d, *comp[a][b], +1);
            dg[0][a][b] = dg[0][b][a] = std::move(e1);
            dg[1][a][b] = dg[1][b][a] = std::move(e2);
        }
    FrameConnection out;
    for (int dd = 0; dd < 2; ++dd)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) out.gamma[dd][a][b] = Field(g.size());
    const int m = g.n_theta;
    for (int k = 0; k < g.size(); ++k) {
        const double psi = g.psi(k / m), cot = std::cos(psi) / std::sin(psi);
        const double G[2][2] = {{(*comp[0][0])[k], (*comp[0][1])[k]}, {(*comp[1][0])[k], (*comp[1][1])[k]}};
        // [E_a, E_b] = c_ab E2 with c_12 = -cot
        auto br = [&](int a, int b, int c) {
            const double cab = (a == 0 && b == 1) ? -cot : (a == 1 && b == 0) ? cot : 0.0;
            return cab * G[1][c];
        };
        double low[2][2][2];
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int c = 0; c < 2; ++c)
                    low[a][b][c] = 0.5 * (dg[a][b][c][k] + dg[b][a][c][k] - dg[c][a][b][k] + br(a, b, c)
                                          - br(a, c, b) - br(b, c, a));
        const double det = G[0][0] * G[1][1] - G[0][1] * G[1][0];
        const double gi[2][2] = {{G[1][1] / det, -G[0][1] / det}, {-G[1][0] / det, G[0][0] / det}};
        for (int dd = 0; dd < 2; ++dd)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    out.gamma[dd][a][b][k] = gi[dd][0] * low[a][b][0] + gi[dd][1] * low[a][b][1];
    }
    return out;
}

Field ambient_ric_nu(const ShapeData& shape, const WarpSpec& spec)
{
    Field out(shape.rho.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const AmbientCurvature c = curvature_at(spec, shape.rho[k]);
        const double nr2 = shape.nu_r[k] * shape.nu_r[k];
        out[k] = c.Ric_rad * nr2 + c.Ric_tan * (1.0 - nr2);
    }
    return out;
}

Field gauss_residual(const ShapeData& shape, const WarpSpec& spec)
{
    const Field ric = ambient_ric_nu(shape, spec);
    Field out(shape.rho.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const AmbientCurvature c = curvature_at(spec, shape.rho[k]);
        // 3-dimensional ambient: sectional curvature of the tangent plane
        const double sec_bar = 0.5 * c.Rbar - ric[k];
        out[k] = std::abs(0.5 * shape.R_intrinsic[k] - (sec_bar + shape.sigma2[k]));
    }
    return out;
}

namespace {

// (nabla_c h)_ab in the frame (E1, E2), as dh[c][a][b].
struct CovH {
    Field t[2][2][2];
};

CovH covariant_h(const ShapeData& s, const FrameConnection& con, const Deriv& d)
{
    const Field* h[2][2] = {{&s.h11, &s.h12}, {&s.h12, &s.h22}};
    Field eh[2][2][2]; // E_c h_ab
    for (int a = 0; a < 2; ++a)
        for (int b = a; b < 2; ++b) {
            auto [e1, e2] = frame_gradient(d, *h[a][b], +1);
            eh[0][a][b] = eh[0][b][a] = std::move(e1);
            eh[1][a][b] = eh[1][b][a] = std::move(e2);
        }
    CovH out;
    const int n = s.grid.size();
    for (int c = 0; c < 2; ++c)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                Field f(n);
                for (int k = 0; k < n; ++k) {
                    double v = eh[c][a][b][k];
                    for (int e = 0; e < 2; ++e)
                        v -= con.gamma[e][c][a][k] * (*h[e][b])[k] + con.gamma[e][c][b][k] * (*h[a][e])[k];
                    f[k] = v;
                }
                out.t[c][a][b] = std::move(f);
            }
    return out;
}

} // namespace

Field codazzi_residual(const ShapeData& s, const WarpSpec& spec)
{
    const Deriv d(s.grid, s.scheme);
    const FrameConnection con = frame_connection(s.metric(), d);
    const CovH dh = covariant_h(s, con, d);
    const int n = s.grid.size();
    Field out(n);
    for (int k = 0; k < n; ++k) {
        const Mat2 P = gram_schmidt(s.g11[k], s.g12[k], s.g22[k]);
        // orthonormal components of nabla h
        double T[2][2][2] = {};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int l = 0; l < 2; ++l)
                    for (int c = 0; c < 2; ++c)
                        for (int a = 0; a < 2; ++a)
                            for (int b = 0; b < 2; ++b)
                                T[i][j][l] += P[i][c] * P[j][a] * P[l][b] * dh.t[c][a][b][k];
        // Ric(nu, e_i) = (Ric_rad - Ric_tan) nu^r dr(e_i)
        const AmbientCurvature c = curvature_at(spec, s.rho[k]);
        const double dr[2] = {s.du_psi[k], s.du_theta[k]};
        double rn[2];
        for (int i = 0; i < 2; ++i)
            rn[i] = (c.Ric_rad - c.Ric_tan) * s.nu_r[k] * (P[i][0] * dr[0] + P[i][1] * dr[1]);
        // nabla_k h_ij = nabla_j h_ik + Rbar(nu, e_i, e_j, e_k),
        // Rbar(nu, e_i, e_j, e_k) = Ric(nu, e_j) delta_ik - Ric(nu, e_k) delta_ij
        double worst = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int kk = 0; kk < 2; ++kk) {
                    const double rbar = rn[j] * (i == kk) - rn[kk] * (i == j);
                    worst = std::max(worst, std::abs(T[kk][i][j] - T[j][i][kk] - rbar));
                }
        out[k] = worst;
    }
    return out;
}

Field commutator_residual(const ShapeData& s, const WarpSpec& spec)
{
    if (!spec.space_form())
        throw UnsupportedError("commutator_residual: only space-form ambients are supported, got " + spec.label());
    const double Kb = spec.space_form_curvature();
    const Deriv d(s.grid, s.scheme);
    const FrameConnection con = frame_connection(s.metric(), d);
    const CovH dh = covariant_h(s, con, d);
    const int n = s.grid.size();
    // second covariant derivative S[e][c][a][b] = nabla_e (nabla h)_cab
    Field S[2][2][2][2];
    for (int c = 0; c < 2; ++c)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                auto [e1, e2] = frame_gradient(d, dh.t[c][a][b], -1);
                const Field* ed[2] = {&e1, &e2};
                for (int e = 0; e < 2; ++e) {
                    Field f(n);
                    for (int k = 0; k < n; ++k) {
                        double v = (*ed[e])[k];
                        for (int q = 0; q < 2; ++q)
                            v -= con.gamma[q][e][c][k] * dh.t[q][a][b][k] + con.gamma[q][e][a][k] * dh.t[c][q][b][k]
                                 + con.gamma[q][e][b][k] * dh.t[c][a][q][k];
                        f[k] = v;
                    }
                    S[e][c][a][b] = std::move(f);
                }
            }
    Field out(n);
    for (int k = 0; k < n; ++k) {
        const Mat2 P = gram_schmidt(s.g11[k], s.g12[k], s.g22[k]);
        const double hE[2][2] = {{s.h11[k], s.h12[k]}, {s.h12[k], s.h22[k]}};
        double h[2][2] = {};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) h[i][j] += P[i][a] * P[j][b] * hE[a][b];
        double D[2][2][2][2] = {};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int kk = 0; kk < 2; ++kk)
                    for (int l = 0; l < 2; ++l) {
                        double v = 0.0;
                        for (int e = 0; e < 2; ++e)
                            for (int c = 0; c < 2; ++c)
                                for (int a = 0; a < 2; ++a)
                                    for (int b = 0; b < 2; ++b)
                                        v += P[i][e] * P[j][c] * P[kk][a] * P[l][b] * S[e][c][a][b][k];
                        D[i][j][kk][l] = v;
                    }
        auto Rb = [&](int a, int b, int c, int e) { return Kb * ((a == c) * (b == e) - (a == e) * (b == c)); };
        double worst = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int kk = 0; kk < 2; ++kk)
                    for (int l = 0; l < 2; ++l) {
                        double rhs = D[kk][l][i][j];
                        for (int q = 0; q < 2; ++q) {
                            rhs -= h[q][l] * (h[i][q] * h[kk][j] - h[i][j] * h[q][kk]);
                            rhs -= h[q][j] * (h[q][i] * h[kk][l] - h[i][l] * h[q][kk]);
                            rhs += h[q][l] * Rb(i, kk, j, q) + h[q][j] * Rb(i, kk, l, q);
                        }
                        worst = std::max(worst, std::abs(D[i][j][kk][l] - rhs));
                    }
        out[k] = worst;
    }
    return out;
}

} // namespace weyl
