#pragma once

#include "weyl/surface.hpp"

#include <optional>
#include <vector>

namespace weyl {

// f = (R - Rbar) / 2 + Ric(nu, nu), the right-hand side of sigma_2(kappa) = f.
Field prescribed_f(const ShapeData& shape, const WarpSpec& spec);

// sup over nodes of |sigma_2(kappa) - f|
double master_identity_defect(const ShapeData& shape, const WarpSpec& spec);

struct EllipticityReport {
    double min_R = 0.0;
    double rhs_sup = 0.0; // sup over the region of Rbar - 2 min Ric
    double margin = 0.0;  // min_R - rhs_sup
    bool holds = false;
};

// Closed interval [lo, hi] of radial coordinates, sampled uniformly.
struct Region {
    double lo, hi;
};

double ellipticity_threshold(const WarpSpec& spec, Region region, int samples = 401);

// Throws DomainError if the region leaves the domain of spec.
EllipticityReport ellipticity_check(const Metric2S& metric, const WarpSpec& spec, Region region,
                                    int samples = 401);

// Per-node g-norm of Hess(Phi o X) - phi' g + <V, nu> h.
Field warp_hessian_residual(const RadialGraph& graph, PsiScheme scheme = PsiScheme::fd6);

// Surface Hessian of a scalar sampled on the graph, frame components (E1, E2).
struct Hessian2 {
    Field h11, h12, h22;
};
Hessian2 surface_hessian(const ShapeData& shape, const Field& f);

// A scalar on the ambient restricted to the surface, with its normal derivative
// when known.
struct AmbientScalar {
    Field values;
    std::optional<Field> d_nu;
};

// Phi(x) of the warp, d_nu Phi = <V, nu> = phi / W.
AmbientScalar warp_potential_samples(const RadialGraph& graph);
// Squared geodesic distance to the center, for phi-form warps with phi(0) = 0.
AmbientScalar distance_squared_samples(const RadialGraph& graph);

struct CondPhiFit {
    double C1 = 0.0;
    double C2 = 0.0;
    bool feasible = false;
};

// Largest C1 with Hess(Phi) - C1 g + C2 h >= 0 at every node, over C2 in
// [0, sup |d_nu Phi|].  Without d_nu only C2 = 0 is tried.
CondPhiFit cond_phi_fit(const RadialGraph& graph, const Field& Phi_values,
                        const std::optional<Field>& dPhi_nu = std::nullopt);
CondPhiFit cond_phi_fit(const RadialGraph& graph, const AmbientScalar& Phi);

struct BoundCertificate {
    double sup_kappa = 0.0; // over the whole family
    double drive = 0.0;     // largest drive in the family
    double fitted_A1 = 0.0;
    double fitted_A2 = 0.0;
    std::vector<std::pair<double, double>> per_surface; // (drive, sup_kappa)
    double envelope(double drive) const;
    bool covers(double drive, double sup_kappa) const;
};

struct CertificateMember {
    double drive = 0.0;
    double sup_kappa = 0.0;
    double sigma2_min = 0.0;
    double tolerance = 0.0; // allowed negative sigma_2
};

// drive = (sup Phi - inf Phi) / inf phi', sup_kappa = max |kappa_i|.  Throws
// HypothesisError (surface index, node) if sigma_2 < -tolerance somewhere or
// phi' <= 0 on the surface.
CertificateMember certificate_member(const RadialGraph& graph, int index = 0);

// Envelope sup_kappa <= A1 exp(A2 drive) with the smallest A2 >= 0, ties broken
// by the smallest A1.
BoundCertificate fit_envelope(const std::vector<CertificateMember>& members);
BoundCertificate bound_certificate(const std::vector<RadialGraph>& family, Exec exec = Exec::parallel);

struct HorizonObstruction {
    double R_at_min = 0.0;
    double gauss_cap = 0.0;
    double ellipticity_needs = 0.0;
    bool contradiction = false;
    int node = 0;
};

// eta-form warps only; otherwise UnsupportedError.
HorizonObstruction horizon_obstruction(const RadialGraph& graph);

struct LaplacianFCheck {
    double ratio_sup = 0.0;
};

// sup |Lap f| / (|h|^2 + |grad H| + 1)
LaplacianFCheck laplacian_f_check(const ShapeData& shape, const WarpSpec& spec);

// (1 / 8 pi) integral of (H_o - H_omega) against the area form of metric.
// Throws ConfigError on grid mismatch, EmbeddingError if K <= 0 somewhere.
double brown_york_mass(const Metric2S& metric, const Field& H_omega, const Field& H_o);

} // namespace weyl
