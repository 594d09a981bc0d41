#include "weyl/grid.hpp"

#include "weyl/errors.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace weyl {

using std::numbers::pi;

namespace {

constexpr double fd1[3] = {3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0};
constexpr double fd2[3] = {3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0};

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

} // namespace

SphereGrid::SphereGrid(int n_psi_, int n_theta_) : n_psi(n_psi_), n_theta(n_theta_)
{
    if (n_psi < 8) throw DomainError("grid: n_psi must be >= 8");
    if (n_theta < 16) throw DomainError("grid: n_theta must be >= 16");
    if (n_theta % 2 != 0) throw DomainError("grid: n_theta must be even");
}

double SphereGrid::psi(int i) const { return (i + 0.5) * pi / n_psi; }
double SphereGrid::theta(int j) const { return 2.0 * pi * j / n_theta; }
double SphereGrid::dpsi() const { return pi / n_psi; }
double SphereGrid::dtheta() const { return 2.0 * pi / n_theta; }

Field sample(const SphereGrid& grid, const std::function<double(double, double)>& f)
{
    Field out(grid.size());
    for (int i = 0; i < grid.n_psi; ++i)
        for (int j = 0; j < grid.n_theta; ++j) out[grid.idx(i, j)] = f(grid.psi(i), grid.theta(j));
    return out;
}

Eigen::MatrixXd fourier_d1(int M)
{
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(M, M);
    const double h = 2.0 * pi / M;
    for (int j = 0; j < M; ++j)
        for (int k = 0; k < M; ++k) {
            if (j == k) continue;
            const int d = j - k;
            const double sgn = (d % 2 == 0) ? 1.0 : -1.0;
            D(j, k) = 0.5 * sgn / std::tan(0.5 * d * h);
        }
    return D;
}

Eigen::MatrixXd fourier_d2(int M)
{
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(M, M);
    const double h = 2.0 * pi / M;
    for (int j = 0; j < M; ++j)
        for (int k = 0; k < M; ++k) {
            if (j == k) {
                D(j, k) = -pi * pi / (3.0 * h * h) - 1.0 / 6.0;
                continue;
            }
            const int d = j - k;
            const double sgn = (d % 2 == 0) ? 1.0 : -1.0;
            const double s = std::sin(0.5 * d * h);
            D(j, k) = -0.5 * sgn / (s * s);
        }
    return D;
}

Deriv::Deriv(const SphereGrid& grid, PsiScheme scheme, bool polar_filter)
    : grid_(grid), scheme_(scheme), filter_(polar_filter), cutoff_(grid.n_psi, grid.n_theta / 2)
{
    if (filter_)
        for (int i = 0; i < grid.n_psi; ++i) {
            const int k = static_cast<int>(std::ceil(0.5 * grid.n_theta * std::sin(grid.psi(i))));
            cutoff_[i] = std::min(grid.n_theta / 2, std::max(polar_floor, k));
        }
    dth_ = fourier_d1(grid.n_theta);
    dth2_ = fourier_d2(grid.n_theta);
    dth_rows_ = dth_.rowwise().sum();
    dth2_rows_ = dth2_.rowwise().sum();
    if (scheme == PsiScheme::spectral) {
        circ1_ = fourier_d1(2 * grid.n_psi);
        circ2_ = fourier_d2(2 * grid.n_psi);
    }
}

namespace {

// value of f at row ii (possibly a ghost) in column j
inline double ghost(const SphereGrid& g, const Field& f, int ii, int j, int parity)
{
    const int n = g.n_psi, m = g.n_theta;
    if (ii < 0) return parity * f[(-1 - ii) * m + (j + m / 2) % m];
    if (ii >= n) return parity * f[(2 * n - 1 - ii) * m + (j + m / 2) % m];
    return f[ii * m + j];
}

Field theta_apply(const SphereGrid& g, const Eigen::MatrixXd& D, const Eigen::VectorXd& rows, const Field& f)
{
    const int n = g.n_psi, m = g.n_theta;
    Eigen::Map<const RowMat> F(f.data(), n, m);
    Field out(f.size());
    Eigen::Map<RowMat> O(out.data(), n, m);
    O.noalias() = F * D.transpose();
    O.array() -= F.array().rowwise() * rows.transpose().array();
    return out;
}

// Doubled great circle through columns j and j + m/2, spectral operator C.
Field circle_apply(const SphereGrid& g, const Eigen::MatrixXd& C, const Field& f, int parity)
{
    const int n = g.n_psi, m = g.n_theta;
    Eigen::MatrixXd ext(2 * n, m);
    for (int k = 0; k < 2 * n; ++k)
        for (int j = 0; j < m; ++j) ext(k, j) = ghost(g, f, k, j, parity);
    Eigen::MatrixXd res = C.topRows(n) * ext;
    Field out(f.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) out[i * m + j] = res(i, j);
    return out;
}

} // namespace

Field Deriv::d_psi(const Field& f, int parity) const
{
    const SphereGrid& g = grid_;
    if (scheme_ == PsiScheme::spectral) return circle_apply(g, circ1_, f, parity);
    const double inv = 1.0 / g.dpsi();
    Field out(f.size());
    for (int i = 0; i < g.n_psi; ++i)
        for (int j = 0; j < g.n_theta; ++j) {
            double acc = 0.0;
            for (int k = 1; k <= 3; ++k)
                acc += fd1[k - 1] * (ghost(g, f, i + k, j, parity) - ghost(g, f, i - k, j, parity));
            out[g.idx(i, j)] = acc * inv;
        }
    return out;
}

Field Deriv::d_psipsi(const Field& f, int parity) const
{
    const SphereGrid& g = grid_;
    if (scheme_ == PsiScheme::spectral) return circle_apply(g, circ2_, f, parity);
    const double inv = 1.0 / (g.dpsi() * g.dpsi());
    Field out(f.size());
    for (int i = 0; i < g.n_psi; ++i)
        for (int j = 0; j < g.n_theta; ++j) {
            const double f0 = f[g.idx(i, j)];
            double acc = 0.0;
            for (int k = 1; k <= 3; ++k)
                acc += fd2[k - 1] * (ghost(g, f, i + k, j, parity) + ghost(g, f, i - k, j, parity) - 2.0 * f0);
            out[g.idx(i, j)] = acc * inv;
        }
    return out;
}

Field Deriv::theta_filtered(const Field& f, int order) const
{
    const int n = grid_.n_psi, m = grid_.n_theta;
    Eigen::FFT<double> fft;
    std::vector<double> row(m), back(m);
    std::vector<std::complex<double>> spec;
    Field out(f.size());
    for (int i = 0; i < n; ++i) {
        // offset by one entry so constant rows transform to exact zeros
        for (int j = 0; j < m; ++j) row[j] = f[i * m + j] - f[i * m];
        fft.fwd(spec, row);
        for (int q = 0; q < m; ++q) {
            const int k = q > m / 2 ? q - m : q;
            if (std::abs(k) > cutoff_[i] || (order == 1 && q == m / 2)) {
                spec[q] = 0.0;
                continue;
            }
            spec[q] *= order == 1 ? std::complex<double>(0.0, k) : std::complex<double>(-double(k) * k, 0.0);
        }
        fft.inv(back, spec);
        std::copy(back.begin(), back.end(), out.begin() + i * m);
    }
    return out;
}

Field Deriv::d_theta(const Field& f) const
{
    return filter_ ? theta_filtered(f, 1) : theta_apply(grid_, dth_, dth_rows_, f);
}

Field Deriv::d_thetatheta(const Field& f) const
{
    return filter_ ? theta_filtered(f, 2) : theta_apply(grid_, dth2_, dth2_rows_, f);
}

Field Deriv::d_theta_transpose(const Field& f) const
{
    if (filter_) {
        Field out = theta_filtered(f, 1);
        for (double& x : out) x = -x;
        return out;
    }
    const int n = grid_.n_psi, m = grid_.n_theta;
    Eigen::Map<const RowMat> F(f.data(), n, m);
    Field out(f.size());
    Eigen::Map<RowMat> O(out.data(), n, m);
    O.noalias() = F * dth_;
    O.array() -= F.array().rowwise() * dth_rows_.transpose().array();
    return out;
}

Field Deriv::d_psi_transpose(const Field& f, int parity) const
{
    // scatter the adjoint of every gather done by d_psi
    const SphereGrid& g = grid_;
    const int n = g.n_psi, m = g.n_theta;
    Field out(f.size(), 0.0);
    auto scatter = [&](int ii, int j, double v) {
        if (ii < 0)
            out[(-1 - ii) * m + (j + m / 2) % m] += parity * v;
        else if (ii >= n)
            out[(2 * n - 1 - ii) * m + (j + m / 2) % m] += parity * v;
        else
            out[ii * m + j] += v;
    };
    if (scheme_ == PsiScheme::spectral) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) {
                const double v = f[i * m + j];
                for (int k = 0; k < 2 * n; ++k) scatter(k, j, circ1_(i, k) * v);
            }
        return out;
    }
    const double inv = 1.0 / g.dpsi();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            const double v = f[i * m + j] * inv;
            for (int k = 1; k <= 3; ++k) {
                scatter(i + k, j, fd1[k - 1] * v);
                scatter(i - k, j, -fd1[k - 1] * v);
            }
        }
    return out;
}

Eigen::MatrixXd Deriv::psi_matrix(int order, int p) const
{
    const int n = grid_.n_psi;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    auto add = [&](int i, int ii, double c) {
        if (ii < 0)
            M(i, -1 - ii) += p * c;
        else if (ii >= n)
            M(i, 2 * n - 1 - ii) += p * c;
        else
            M(i, ii) += c;
    };
    if (scheme_ == PsiScheme::spectral) {
        const Eigen::MatrixXd& C = order == 1 ? circ1_ : circ2_;
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < 2 * n; ++k) add(i, k, C(i, k));
        return M;
    }
    const double h = grid_.dpsi();
    for (int i = 0; i < n; ++i) {
        for (int k = 1; k <= 3; ++k) {
            if (order == 1) {
                add(i, i + k, fd1[k - 1] / h);
                add(i, i - k, -fd1[k - 1] / h);
            } else {
                add(i, i + k, fd2[k - 1] / (h * h));
                add(i, i - k, fd2[k - 1] / (h * h));
                M(i, i) -= 2.0 * fd2[k - 1] / (h * h);
            }
        }
    }
    return M;
}

double Deriv::theta_multiplier(int k) const
{
    const int m = grid_.n_theta;
    int q = ((k % m) + m) % m;
    if (q == m / 2) return 0.0;
    if (q > m / 2) q -= m;
    return q;
}

double Deriv::theta2_multiplier(int k) const
{
    const int m = grid_.n_theta;
    int q = ((k % m) + m) % m;
    if (q > m / 2) q -= m;
    return -static_cast<double>(q) * q;
}

Quadrature::Quadrature(const SphereGrid& grid) : grid_(grid), w_(grid.n_psi)
{
    const int n = grid.n_psi;
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 1; j <= n / 2; ++j) acc += std::cos(2.0 * j * grid.psi(i)) / (4.0 * j * j - 1.0);
        w_[i] = (2.0 / n) * (1.0 - 2.0 * acc);
    }
}

double Quadrature::integrate(const Field& f, const Field& density) const
{
    const double dth = grid_.dtheta();
    double total = 0.0;
    for (int i = 0; i < grid_.n_psi; ++i) {
        double row = 0.0;
        for (int j = 0; j < grid_.n_theta; ++j) row += f[grid_.idx(i, j)] * density[grid_.idx(i, j)];
        total += w_[i] * row * dth;
    }
    return total;
}

double Quadrature::integrate_round(const Field& f) const
{
    return integrate(f, Field(f.size(), 1.0));
}

CosineSeries::CosineSeries(const std::vector<double>& v) : c_(v.size(), 0.0)
{
    const int n = static_cast<int>(v.size());
    for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += v[i] * std::cos(k * (i + 0.5) * pi / n);
        c_[k] = (k == 0 ? 1.0 : 2.0) * acc / n;
    }
}

double CosineSeries::operator()(double psi) const
{
    double acc = 0.0;
    for (std::size_t k = 0; k < c_.size(); ++k) acc += c_[k] * std::cos(k * psi);
    return acc;
}

double CosineSeries::derivative(double psi) const
{
    double acc = 0.0;
    for (std::size_t k = 1; k < c_.size(); ++k) acc -= k * c_[k] * std::sin(k * psi);
    return acc;
}

double CosineSeries::second_derivative(double psi) const
{
    double acc = 0.0;
    for (std::size_t k = 1; k < c_.size(); ++k) acc -= double(k * k) * c_[k] * std::cos(k * psi);
    return acc;
}

std::vector<double> column(const SphereGrid& grid, const Field& f, int j)
{
    std::vector<double> out(grid.n_psi);
    for (int i = 0; i < grid.n_psi; ++i) out[i] = f[grid.idx(i, j)];
    return out;
}

double sup_norm(const Field& f)
{
    double s = 0.0;
    for (double x : f) s = std::max(s, std::abs(x));
    return s;
}

} // namespace weyl
