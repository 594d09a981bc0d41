#pragma once

#include <limits>
#include <string>
#include <vector>

namespace weyl {

// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes) with
// analytic derivatives up to third order.
class Pchip {
public:
    Pchip() = default;
    Pchip(std::vector<double> x, std::vector<double> y);
    struct Value {
        double f, d1, d2, d3;
    };
    Value operator()(double x) const;
    double front() const { return x_.front(); }
    double back() const { return x_.back(); }
    double front_value() const { return y_.front(); }

private:
    std::vector<double> x_, y_, d_;
};

enum class Family { euclidean, hyperbolic, spherical, ads_schwarzschild, reissner_nordstrom, custom };

std::string to_string(Family f);

struct Interval {
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    bool contains(double x) const { return x > lo && x < hi; }
};

// Everything a kernel needs at one radial coordinate x.  x is r for phi-form
// families and s for eta-form families; primes are geodesic-radius
// derivatives d/dr, and a = dr/dx.
struct WarpSample {
    double phi = 0.0;
    double dphi = 0.0;
    double ddphi = 0.0;
    double dddphi = 0.0;
    double a = 1.0;
    double a_x = 0.0;
};

// Warped product dr^2 + phi(r)^2 dsigma^2 over S^n, or in eta-form
// ds^2 / eta(s)^2 + s^2 dsigma^2.  Immutable after construction.
class WarpSpec {
public:
    static WarpSpec euclidean(int n = 2);
    static WarpSpec hyperbolic(int n = 2);
    static WarpSpec spherical(int n = 2);
    static WarpSpec ads_schwarzschild(double m, double kappa_cosmo, int n = 2);
    static WarpSpec reissner_nordstrom(double m, double q, int n = 2);
    static WarpSpec custom_phi(std::vector<double> r, std::vector<double> phi, int n = 2);
    static WarpSpec custom_eta(std::vector<double> s, std::vector<double> eta, int n = 2);

    Family family() const { return family_; }
    int n() const { return n_; }
    bool eta_form() const { return eta_form_; }
    double m() const { return m_; }
    double q() const { return q_; }
    double kappa_cosmo() const { return kappa_; }
    // open coordinate interval of validity
    Interval domain() const { return domain_; }
    // horizon coordinate for eta-form families, base point of Phi otherwise
    double x0() const { return x0_; }
    bool has_horizon() const { return has_horizon_; }
    bool space_form() const;
    double space_form_curvature() const;
    const std::string& label() const { return label_; }
    WarpSpec& with_label(std::string l) { label_ = std::move(l); return *this; }

    // Throws DomainError outside the open domain.
    WarpSample sample(double x) const;
    // eta^2 and its s-derivatives (eta-form only).
    double F(double s) const;
    double dF(double s) const;
    double ddF(double s) const;
    // Warp potential, Phi' = phi along r, Phi(x0) = 0.
    double Phi(double x) const;
    // Geodesic distance from x0 along a radial ray.
    double radial_distance(double x) const;
    // Inverse of phi on the increasing branch starting at x0.
    double x_of_phi(double phi) const;

    void require_inside(double x, const char* what) const;

private:
    WarpSpec() = default;
    void init_eta_domain();
    double F_above_horizon(double t) const;

    Family family_ = Family::euclidean;
    int n_ = 2;
    bool eta_form_ = false;
    bool custom_eta_ = false;
    double m_ = 0.0, q_ = 0.0, kappa_ = 0.0;
    Interval domain_;
    double x0_ = 0.0;
    bool has_horizon_ = false;
    Pchip table_; // phi(r), or eta^2(s) for eta tables
    std::string label_;
};

struct WarpEval {
    double phi, phi_prime, phi_second, Phi;
};

struct AmbientCurvature {
    double R_tan, R_rad, Rbar, Ric_tan, Ric_rad;
    double min_ricci() const { return Ric_tan < Ric_rad ? Ric_tan : Ric_rad; }
};

struct HorizonRoots {
    double s_lower;
    double s_upper; // +inf when there is no outer root
};

struct StaticResidual {
    double lambda_tan, lambda_rad;
};

struct SliceShape {
    double kappa_slice, H_slice, sigma2_slice;
};

WarpEval warp_eval(const WarpSpec& spec, double rho);
AmbientCurvature curvature_at(const WarpSpec& spec, double rho);
HorizonRoots horizon_roots(const WarpSpec& spec);
// Eigenvalues of (Laplacian eta) g - Hess eta + eta Ric for the static
// potential eta = phi'.
StaticResidual static_residual(const WarpSpec& spec, double s);
SliceShape slice_shape(const WarpSpec& spec, double rho);

// euclidean, hyperbolic, spherical, schwarzschild-m1, ads-schwarzschild-m1k-1, rn-m2q05
WarpSpec preset(const std::string& name);
std::vector<std::string> preset_names();

} // namespace weyl
