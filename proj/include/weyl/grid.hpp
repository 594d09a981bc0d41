#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <vector>

namespace weyl {

// Row-major samples on a SphereGrid, index i * n_theta + j.
using Field = std::vector<double>;

// Staggered colatitude, periodic longitude:
//   psi_i = (i + 1/2) pi / n_psi,  theta_j = 2 pi j / n_theta.
struct SphereGrid {
    int n_psi = 0;
    int n_theta = 0;

    SphereGrid() = default;
    SphereGrid(int n_psi, int n_theta);

    int size() const { return n_psi * n_theta; }
    int idx(int i, int j) const { return i * n_theta + j; }
    double psi(int i) const;
    double theta(int j) const;
    double dpsi() const;
    double dtheta() const;

    bool operator==(const SphereGrid& o) const { return n_psi == o.n_psi && n_theta == o.n_theta; }
    bool operator!=(const SphereGrid& o) const { return !(*this == o); }
};

Field sample(const SphereGrid& grid, const std::function<double(double, double)>& f);

enum class PsiScheme { fd6, spectral };

// Derivatives on the sphere grid.  A field's parity p says how it continues
// across a pole: f(-psi, theta) = p f(psi, theta + pi).  Scalars have p = +1,
// frame components of a k-tensor in (d_psi, d_theta / sin psi) have (-1)^k, and
// every psi-derivative flips p.
//
// psi: sixth-order centered stencils with three pole-crossing ghost rows, or
// Fourier differentiation on the doubled great circle.  theta: Fourier.
//
// With the polar filter on, theta-derivatives on row i keep only Fourier modes
// |k| <= max(polar_floor, (n_theta / 2) sin psi_i).  Near the poles the discarded
// modes of a smooth field are below roundoff, while keeping them multiplies
// roundoff by k^2 / sin^2 psi in every curvature formula.
class Deriv {
public:
    static constexpr int polar_floor = 12;

    explicit Deriv(const SphereGrid& grid, PsiScheme scheme = PsiScheme::fd6, bool polar_filter = true);

    const SphereGrid& grid() const { return grid_; }
    PsiScheme scheme() const { return scheme_; }
    bool polar_filter() const { return filter_; }
    // largest theta-mode kept on row i
    int mode_cutoff(int i) const { return cutoff_[i]; }

    Field d_psi(const Field& f, int parity) const;
    Field d_psipsi(const Field& f, int parity) const;
    Field d_theta(const Field& f) const;
    Field d_thetatheta(const Field& f) const;

    // Transposes, for least-squares iterations.
    Field d_psi_transpose(const Field& f, int parity) const;
    Field d_theta_transpose(const Field& f) const;

    // n_psi x n_psi action on one theta-Fourier column, where the ghost value
    // is effective_parity times the mirrored row.
    Eigen::MatrixXd psi_matrix(int order, int effective_parity) const;

    // Fourier multiplier of d_theta (times i) and of d_theta^2 on mode k,
    // ignoring the polar filter.
    double theta_multiplier(int k) const;
    double theta2_multiplier(int k) const;

private:
    Field theta_filtered(const Field& f, int order) const;

    SphereGrid grid_;
    PsiScheme scheme_;
    bool filter_;
    std::vector<int> cutoff_;
    Eigen::MatrixXd dth_, dth2_;          // n_theta x n_theta
    Eigen::VectorXd dth_rows_, dth2_rows_; // row sums, removed so constants map to 0
    Eigen::MatrixXd circ1_, circ2_;       // 2 n_psi circle matrices (spectral psi)
};

// Fejer first rule in cos(psi) (exact on the staggered nodes) times the
// trapezoid rule in theta.
class Quadrature {
public:
    explicit Quadrature(const SphereGrid& grid);
    const std::vector<double>& psi_weights() const { return w_; }
    // sum over nodes of f * density * sin(psi) dpsi dtheta
    double integrate(const Field& f, const Field& density) const;
    // plain integral against the round area form
    double integrate_round(const Field& f) const;

private:
    SphereGrid grid_;
    std::vector<double> w_;
};

// f(psi) = sum_k c_k cos(k psi), interpolating staggered samples exactly.
class CosineSeries {
public:
    CosineSeries() = default;
    explicit CosineSeries(const std::vector<double>& staggered_values);
    double operator()(double psi) const;
    double derivative(double psi) const;
    double second_derivative(double psi) const;
    const std::vector<double>& coefficients() const { return c_; }

private:
    std::vector<double> c_;
};

// Periodic Fourier differentiation matrices on M equispaced points (M even).
Eigen::MatrixXd fourier_d1(int M);
Eigen::MatrixXd fourier_d2(int M);

// Column j of a field as a vector over psi.
std::vector<double> column(const SphereGrid& grid, const Field& f, int j);

double sup_norm(const Field& f);

} // namespace weyl
