#include "weyl/embed.hpp"
#include "weyl/errors.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace weyl {

namespace {

// Round Laplacian d_psipsi + cot d_psi + d_thetatheta / sin^2, one n_psi x n_psi
// matrix per theta-mode.
class ModalLaplacian {
public:
    explicit ModalLaplacian(const SphereGrid& g) : g_(g)
    {
        const Deriv d(g, PsiScheme::fd6, false);
        const int n = g.n_psi;
        Eigen::VectorXd cot(n), isin2(n);
        for (int i = 0; i < n; ++i) {
            const double s = std::sin(g.psi(i));
            cot[i] = std::cos(g.psi(i)) / s;
            isin2[i] = 1.0 / (s * s);
        }
        for (int k = 0; k <= g.n_theta / 2; ++k) {
            const int p = k % 2 == 0 ? 1 : -1;
            Eigen::MatrixXd M = d.psi_matrix(2, p) + cot.asDiagonal() * d.psi_matrix(1, p);
            M.diagonal() += d.theta2_multiplier(k) * isin2;
            M_.push_back(std::move(M));
        }
    }

    Field apply(const Field& u) const
    {
        return modal(u, [&](int k, const Eigen::VectorXcd& c) -> Eigen::VectorXcd {
            return M_[k].cast<std::complex<double>>() * c;
        });
    }

    // (I - shift * Lap)^{-1} f
    Field solve(const Field& f, double shift) const
    {
        std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu;
        const int n = g_.n_psi;
        for (const auto& M : M_) lu.emplace_back(Eigen::MatrixXd::Identity(n, n) - shift * M);
        return modal(f, [&](int k, const Eigen::VectorXcd& c) -> Eigen::VectorXcd {
            const Eigen::VectorXd re = lu[k].solve(Eigen::VectorXd(c.real()));
            const Eigen::VectorXd im = lu[k].solve(Eigen::VectorXd(c.imag()));
            Eigen::VectorXcd out(c.size());
            out.real() = re;
            out.imag() = im;
            return out;
        });
    }

private:
    template <class Op>
    Field modal(const Field& f, Op op) const
    {
        const int n = g_.n_psi, m = g_.n_theta;
        Eigen::FFT<double> fft;
        Eigen::MatrixXcd C(n, m);
        std::vector<double> row(m);
        std::vector<std::complex<double>> spec;
        for (int i = 0; i < n; ++i) {
            std::copy(f.begin() + i * m, f.begin() + (i + 1) * m, row.begin());
            fft.fwd(spec, row);
            for (int k = 0; k < m; ++k) C(i, k) = spec[k];
        }
        for (int k = 0; k < m; ++k) {
            const int q = k <= m / 2 ? k : m - k;
            C.col(k) = op(q, Eigen::VectorXcd(C.col(k)));
        }
        Field out(f.size());
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < m; ++k) spec[k] = C(i, k);
            fft.inv(row, spec);
            std::copy(row.begin(), row.end(), out.begin() + i * m);
        }
        return out;
    }

    SphereGrid g_;
    std::vector<Eigen::MatrixXd> M_;
};

Field curvature_from(const Field& u, const Field& lap)
{
    Field R(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) R[k] = 2.0 * std::exp(-2.0 * u[k]) * (1.0 - lap[k]);
    return R;
}

struct Moments {
    double area, variance;
};

Moments moments(const Quadrature& q, const Field& u, const Field& R)
{
    Field dens(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) dens[k] = std::exp(2.0 * u[k]);
    const double A = q.integrate_round(dens);
    const double mean = q.integrate(R, dens) / A;
    Field dev(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) dev[k] = (R[k] - mean) * (R[k] - mean);
    return {A, q.integrate(dev, dens) / A};
}

Field conformal_start(const Metric2S& start)
{
    if (start.conformal_factor()) return *start.conformal_factor();
    const double scale = std::max(sup_norm(start.a()), sup_norm(start.c()));
    double off = sup_norm(start.b());
    for (std::size_t k = 0; k < start.a().size(); ++k) off = std::max(off, std::abs(start.a()[k] - start.c()[k]));
    if (off > 1e-12 * scale)
        throw PreconditionError("ricci flow: start is not conformally round on the grid; uniformize it first and "
                                "supply the conformal factor u with g = e^{2u} round");
    Field u(start.a().size());
    for (std::size_t k = 0; k < u.size(); ++k) u[k] = 0.5 * std::log(start.a()[k]);
    return u;
}

} // namespace

Field conformal_scalar_curvature(const SphereGrid& grid, const Field& u)
{
    return curvature_from(u, ModalLaplacian(grid).apply(u));
}

FlowResult ricci_flow_path(const Metric2S& start, int steps, const FlowOptions& opts)
{
    if (steps < 0) throw ConfigError("ricci flow: steps must be non-negative");
    if (!(opts.dt > 0.0)) throw ConfigError("ricci flow: dt must be positive");
    const SphereGrid& g = start.grid();
    Field u = conformal_start(start);
    const ModalLaplacian lap(g);
    const Quadrature quad(g);

    Field L = lap.apply(u);
    Moments mo = moments(quad, u, curvature_from(u, L));
    const double A0 = mo.area;
    const double rbar = 8.0 * std::numbers::pi / A0;

    FlowResult out;
    auto snap = [&](double t) {
        out.snapshots.push_back(Metric2S::conformal_round(g, u, Provenance::flow));
        out.times.push_back(t);
    };
    snap(0.0);
    out.variance.push_back(mo.variance);
    out.area.push_back(A0);
    if (mo.variance < opts.variance_tol) {
        out.converged = true;
        return out;
    }
    for (int step = 1; step <= steps; ++step) {
        // explicit nonlinear part, implicit cbar * Lap with cbar = max e^{-2u}
        Field e(u.size());
        for (std::size_t k = 0; k < u.size(); ++k) e[k] = std::exp(-2.0 * u[k]);
        const double cbar = *std::max_element(e.begin(), e.end());
        Field rhs(u.size());
        for (std::size_t k = 0; k < u.size(); ++k)
            rhs[k] = u[k] + opts.dt * (0.5 * rbar - e[k] + (e[k] - cbar) * L[k]);
        u = lap.solve(rhs, opts.dt * cbar);

        Field dens(u.size());
        for (std::size_t k = 0; k < u.size(); ++k) dens[k] = std::exp(2.0 * u[k]);
        const double shift = 0.5 * std::log(A0 / quad.integrate_round(dens));
        for (double& v : u) v += shift;

        L = lap.apply(u);
        mo = moments(quad, u, curvature_from(u, L));
        out.variance.push_back(mo.variance);
        out.area.push_back(mo.area);
        const double t = step * opts.dt;
        if (mo.variance < opts.variance_tol) {
            out.converged = true;
            snap(t);
            break;
        }
        if (opts.snapshot_every > 0 && step % opts.snapshot_every == 0) snap(t);
        else if (step == steps) snap(t);
    }
    return out;
}

} // namespace weyl
