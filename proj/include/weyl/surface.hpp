#pragma once

#include "weyl/ambient.hpp"
#include "weyl/grid.hpp"
#include "weyl/parallel.hpp"

#include <functional>
#include <optional>
#include <string>

namespace weyl {

// Star-shaped surface x = rho(psi, theta) over the sphere factor.  rho is the
// ambient radial coordinate (r, or s in eta-form).
class RadialGraph {
public:
    // Throws DomainError if any node leaves the open domain of spec.
    RadialGraph(SphereGrid grid, Field rho, WarpSpec spec, double gradient_cap = 1e3);

    const SphereGrid& grid() const { return grid_; }
    const Field& rho() const { return rho_; }
    const WarpSpec& spec() const { return spec_; }
    // sup |d rho| / rho over the nodes, and whether it exceeded the cap
    double gradient_sup() const { return gradient_sup_; }
    bool flagged() const { return flagged_; }

private:
    SphereGrid grid_;
    Field rho_;
    WarpSpec spec_;
    double gradient_sup_ = 0.0;
    bool flagged_ = false;
};

RadialGraph make_graph(const SphereGrid& grid, const WarpSpec& spec,
                       const std::function<double(double, double)>& rho);

enum class Provenance { analytic, induced, flow };

std::string to_string(Provenance p);

// Metric on S^2 stored by its components in the frame (d_psi, d_theta / sin psi):
//   a = g(d_psi, d_psi), b = g(d_psi, d_theta) / sin psi, c = g(d_theta, d_theta) / sin^2 psi.
// These stay smooth through the poles, unlike E, F, G.
class Metric2S {
public:
    Metric2S(SphereGrid grid, Field a, Field b, Field c, Provenance prov);
    static Metric2S from_EFG(const SphereGrid& grid, const Field& E, const Field& F, const Field& G,
                             Provenance prov = Provenance::analytic);
    static Metric2S round(const SphereGrid& grid, double radius = 1.0);
    // e^{2u} times the unit round metric
    static Metric2S conformal_round(const SphereGrid& grid, Field u, Provenance prov = Provenance::analytic);

    const SphereGrid& grid() const { return grid_; }
    const Field& a() const { return a_; }
    const Field& b() const { return b_; }
    const Field& c() const { return c_; }
    Field E() const;
    Field F() const;
    Field G() const;
    Provenance provenance() const { return prov_; }
    const std::optional<Field>& conformal_factor() const { return u_; }
    // sqrt(a c - b^2), the area density against sin psi dpsi dtheta
    Field area_density() const;
    double area() const;
    // max over both poles of the spread across theta of the pole-row values of
    // the metric on a fixed Cartesian frame, relative to its size
    double pole_defect() const;

private:
    SphereGrid grid_;
    Field a_, b_, c_;
    Provenance prov_;
    std::optional<Field> u_;
};

// Per-node geometry of a radial graph.  Tensor components are in the frame
// E1 = d_psi, E2 = d_theta / sin psi; nu is in the orthonormal ambient frame
// (d_r, d_psi / phi, d_theta / (phi sin psi)) and points outward.
struct ShapeData {
    SphereGrid grid;
    PsiScheme scheme = PsiScheme::fd6;
    Field rho;
    Field g11, g12, g22;
    Field h11, h12, h22;
    Field nu_r, nu_psi, nu_theta;
    Field kappa1, kappa2; // kappa1 >= kappa2
    Field H, sigma2;
    Field R_intrinsic;
    // auxiliaries reused by residuals and estimates
    Field phi, dphi, W;
    Field du_psi, du_theta; // frame gradient (u_psi, u_theta / sin psi) of the geodesic radius

    Metric2S metric() const;
    // Same surface with the opposite normal: h and H change sign.
    ShapeData flipped() const;
};

ShapeData shape_of(const RadialGraph& graph, Exec exec = Exec::parallel, PsiScheme scheme = PsiScheme::fd6);

Metric2S induced_metric(const RadialGraph& graph, PsiScheme scheme = PsiScheme::fd6);

// Scalar curvature R = 2 K of the metric.
Field intrinsic_curvature(const Metric2S& metric, PsiScheme scheme = PsiScheme::fd6, Exec exec = Exec::parallel);

// |integral of K dA - 4 pi| / 4 pi
double gauss_bonnet_defect(const Metric2S& metric, PsiScheme scheme = PsiScheme::fd6);

// Ric(nu, nu) of the ambient at every node of the shape.
Field ambient_ric_nu(const ShapeData& shape, const WarpSpec& spec);

Field gauss_residual(const ShapeData& shape, const WarpSpec& spec);
Field codazzi_residual(const ShapeData& shape, const WarpSpec& spec);
// Space forms only; otherwise UnsupportedError.
Field commutator_residual(const ShapeData& shape, const WarpSpec& spec);

// Christoffel symbols Gamma^d_ab of a metric in the frame (E1, E2):
// gamma[d][a][b], each a field.
struct FrameConnection {
    Field gamma[2][2][2];
};
FrameConnection frame_connection(const Metric2S& metric, const Deriv& d);

// E1 f and E2 f for a field of the given parity.
std::pair<Field, Field> frame_gradient(const Deriv& d, const Field& f, int parity);

} // namespace weyl
