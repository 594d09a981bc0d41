#include "weyl/embed.hpp"
#include "weyl/errors.hpp"

#include <lapacke.h>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace weyl {

namespace {

using Vec3 = Eigen::Vector3d;
using Fields3 = std::array<Field, 3>;
using cd = std::complex<double>;

constexpr int max_kernel = 6;
constexpr int dense_limit = 1024;

// gbar = P delta + Q w w^T in pseudo-Cartesian coordinates, w = y / |y|
struct AmbientPoint {
    double x, P, Q, dP, dQ;
    Vec3 w;

    AmbientPoint(const WarpSpec& spec, const Vec3& y)
    {
        x = y.norm();
        w = y / x;
        const WarpSample s = spec.sample(x);
        const double f = s.phi / x;
        const double phi_x = s.dphi * s.a;
        P = f * f;
        dP = 2.0 * f * (phi_x / x - s.phi / (x * x));
        Q = s.a * s.a - P;
        dQ = 2.0 * s.a * s.a_x - dP;
    }
    Vec3 lower(const Vec3& v) const { return P * v + Q * w.dot(v) * w; }
    double metric(const Vec3& v, const Vec3& u) const { return P * v.dot(u) + Q * w.dot(v) * w.dot(u); }
    // gradient in y of gbar(v, u) with v, u held fixed
    Vec3 grad(const Vec3& v, const Vec3& u) const
    {
        const double wv = w.dot(v), wu = w.dot(u);
        return dP * v.dot(u) * w + dQ * wv * wu * w + (Q / x) * ((v - wv * w) * wu + wv * (u - wu * w));
    }
    Eigen::Matrix3d matrix() const { return P * Eigen::Matrix3d::Identity() + Q * w * w.transpose(); }
    // dG[c](a, b) = d_c gbar_ab
    std::array<Eigen::Matrix3d, 3> derivative() const
    {
        std::array<Eigen::Matrix3d, 3> dG;
        const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
        for (int c = 0; c < 3; ++c) {
            const Vec3 dw = (I.col(c) - w[c] * w) / x;
            dG[c] = dP * w[c] * I + dQ * w[c] * w * w.transpose() + Q * (dw * w.transpose() + w * dw.transpose());
        }
        return dG;
    }
};

Vec3 at(const Fields3& f, int k) { return {f[0][k], f[1][k], f[2][k]}; }

void put(Fields3& f, int k, const Vec3& v)
{
    for (int c = 0; c < 3; ++c) f[c][k] = v[c];
}

Fields3 zeros(const SphereGrid& g)
{
    return {Field(g.size(), 0.0), Field(g.size(), 0.0), Field(g.size(), 0.0)};
}

double sup3(const Fields3& f) { return std::max({sup_norm(f[0]), sup_norm(f[1]), sup_norm(f[2])}); }

} // namespace

bool is_axisymmetric(const EmbeddingMap& map, double rel_tol)
{
    const SphereGrid& g = map.grid;
    double scale = sup3(map.y), err = 0.0;
    for (int i = 0; i < g.n_psi; ++i) {
        const Vec3 y0 = at(map.y, g.idx(i, 0));
        for (int j = 1; j < g.n_theta; ++j) {
            const double c = std::cos(g.theta(j)), s = std::sin(g.theta(j));
            const Vec3 r(c * y0[0] - s * y0[1], s * y0[0] + c * y0[1], y0[2]);
            err = std::max(err, (r - at(map.y, g.idx(i, j))).lpNorm<Eigen::Infinity>());
        }
    }
    return err <= rel_tol * scale;
}

namespace {

int wrap_mode(int q, int m)
{
    q = ((q % m) + m) % m;
    return q > m / 2 ? q - m : q;
}

// Minimal-norm solve with a thin SVD, singular values below tol dropped.
template <class Mat, class Vec>
Vec pinv_solve(const Eigen::BDCSVD<Mat>& svd, const Vec& b, double tol, int& nullity)
{
    const auto& S = svd.singularValues();
    nullity = 0;
    Vec c = svd.matrixU().adjoint() * b;
    for (int k = 0; k < S.size(); ++k) {
        if (S[k] > tol) c[k] /= S[k];
        else c[k] = 0.0, ++nullity;
    }
    return svd.matrixV() * c;
}

} // namespace

EmbeddingMap coordinate_sphere_map(const SphereGrid& grid, double x)
{
    EmbeddingMap m{grid, zeros(grid)};
    for (int i = 0; i < grid.n_psi; ++i)
        for (int j = 0; j < grid.n_theta; ++j) {
            const double p = grid.psi(i), t = grid.theta(j);
            put(m.y, grid.idx(i, j), x * Vec3(std::sin(p) * std::cos(t), std::sin(p) * std::sin(t), std::cos(p)));
        }
    return m;
}

RadialGraph map_graph(const EmbeddingMap& map, const WarpSpec& spec)
{
    const SphereGrid& g = map.grid;
    if (!is_axisymmetric(map)) throw UnsupportedError("map_graph: map is not axisymmetric");
    // meridian through theta = 0 and theta = pi, as (angle from the axis, radius)
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < g.n_psi; ++i) {
        for (int j : {0, g.n_theta / 2}) {
            const Vec3 y = at(map.y, g.idx(i, j));
            pts.emplace_back(std::atan2(y[0], y[2]), y.norm());
        }
    }
    std::sort(pts.begin(), pts.end());
    for (std::size_t k = 1; k < pts.size(); ++k)
        if (!(pts[k].first > pts[k - 1].first)) throw UnsupportedError("map_graph: map is not star-shaped");
    const int P = static_cast<int>(pts.size());
    const double two_pi = 2.0 * std::numbers::pi;
    auto node = [&](int k) {
        const int w = ((k % P) + P) % P;
        const double shift = two_pi * std::floor(double(k) / P);
        return std::make_pair(pts[w].first + shift, pts[w].second);
    };
    Field rho(g.size());
    for (int i = 0; i < g.n_psi; ++i) {
        const double psi = g.psi(i);
        const int c = static_cast<int>(std::upper_bound(pts.begin(), pts.end(), std::make_pair(psi, 0.0)) - pts.begin());
        // periodic Lagrange interpolation on the 8 nearest meridian samples
        double v = 0.0;
        for (int a = c - 4; a < c + 4; ++a) {
            const auto [xa, fa] = node(a);
            double w = 1.0;
            for (int b = c - 4; b < c + 4; ++b)
                if (b != a) w *= (psi - node(b).first) / (xa - node(b).first);
            v += w * fa;
        }
        for (int j = 0; j < g.n_theta; ++j) rho[g.idx(i, j)] = v;
    }
    return RadialGraph(g, std::move(rho), spec);
}

Metric2S map_metric(const EmbeddingMap& map, const WarpSpec& spec)
{
    const SphereGrid& g = map.grid;
    const Deriv d(g, PsiScheme::spectral, false);
    Fields3 yp, yt;
    for (int c = 0; c < 3; ++c) yp[c] = d.d_psi(map.y[c], 1), yt[c] = d.d_theta(map.y[c]);
    Field a(g.size()), b(g.size()), cc(g.size());
    for (int i = 0; i < g.n_psi; ++i) {
        const double s = std::sin(g.psi(i));
        for (int j = 0; j < g.n_theta; ++j) {
            const int k = g.idx(i, j);
            const AmbientPoint A(spec, at(map.y, k));
            const Vec3 vp = at(yp, k), vt = at(yt, k);
            a[k] = A.metric(vp, vp);
            b[k] = A.metric(vp, vt) / s;
            cc[k] = A.metric(vt, vt) / (s * s);
        }
    }
    return Metric2S(g, std::move(a), std::move(b), std::move(cc), Provenance::induced);
}

std::pair<Field, Field> map_principal_curvatures(const EmbeddingMap& map, const WarpSpec& spec)
{
    const SphereGrid& g = map.grid;
    const Deriv d(g, PsiScheme::spectral, false);
    Fields3 yp, yt, ypp, ypt, ytt;
    for (int c = 0; c < 3; ++c) {
        yp[c] = d.d_psi(map.y[c], 1);
        yt[c] = d.d_theta(map.y[c]);
        ypp[c] = d.d_psipsi(map.y[c], 1);
        ypt[c] = d.d_psi(yt[c], 1);
        ytt[c] = d.d_thetatheta(map.y[c]);
    }
    Field k1(g.size()), k2(g.size());
    for (int i = 0; i < g.n_psi; ++i) {
        const double s = std::sin(g.psi(i));
        for (int j = 0; j < g.n_theta; ++j) {
            const int k = g.idx(i, j);
            const AmbientPoint A(spec, at(map.y, k));
            const Eigen::Matrix3d G = A.matrix(), Gi = G.inverse();
            const auto dG = A.derivative();
            const Vec3 vp = at(yp, k), vt = at(yt, k);
            const Vec3 n = vp.cross(vt);
            const double nn = std::sqrt(n.dot(Gi * n));
            const Vec3 nu_low = n / nn, nu = Gi * nu_low;
            // nu^c Gamma_{c,ab} v^a u^b
            auto gamma = [&](const Vec3& v, const Vec3& u) {
                double acc = 0.0;
                for (int c = 0; c < 3; ++c)
                    for (int a = 0; a < 3; ++a)
                        for (int b = 0; b < 3; ++b)
                            acc += nu[c] * 0.5 * (dG[a](b, c) + dG[b](a, c) - dG[c](a, b)) * v[a] * u[b];
                return acc;
            };
            const double hpp = -(nu_low.dot(at(ypp, k)) + gamma(vp, vp));
            const double hpt = -(nu_low.dot(at(ypt, k)) + gamma(vp, vt)) / s;
            const double htt = -(nu_low.dot(at(ytt, k)) + gamma(vt, vt)) / (s * s);
            const double ga = A.metric(vp, vp), gb = A.metric(vp, vt) / s, gc = A.metric(vt, vt) / (s * s);
            const double det = ga * gc - gb * gb;
            const double tr = (gc * hpp - 2.0 * gb * hpt + ga * htt) / det;
            const double dh = (hpp * htt - hpt * hpt) / det;
            const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - dh));
            k1[k] = 0.5 * tr + disc;
            k2[k] = 0.5 * tr - disc;
        }
    }
    return {k1, k2};
}

// ---------------------------------------------------------------------------

LinearizedOperator::LinearizedOperator(const EmbeddingMap& map, const WarpSpec& spec)
    : map_(map), grid_(map.grid), spec_(spec), d_(map.grid, PsiScheme::spectral, false)
{
    const SphereGrid& g = grid_;
    Fields3 yp, yt;
    for (int c = 0; c < 3; ++c) yp[c] = d_.d_psi(map.y[c], 1), yt[c] = d_.d_theta(map.y[c]);
    gXp_ = gXt_ = Gpp_ = Gpt_ = Gtt_ = zeros(g);
    for (int k = 0; k < g.size(); ++k) {
        const AmbientPoint A(spec, at(map.y, k));
        const Vec3 vp = at(yp, k), vt = at(yt, k);
        put(gXp_, k, A.lower(vp));
        put(gXt_, k, A.lower(vt));
        put(Gpp_, k, A.grad(vp, vp));
        put(Gpt_, k, A.grad(vp, vt));
        put(Gtt_, k, A.grad(vt, vt));
        scale_ = std::max(scale_, A.metric(vp, vp));
    }
    axisym_ = is_axisymmetric(map);
}

std::array<Field, 3> LinearizedOperator::apply(const std::array<Field, 3>& tau) const
{
    const SphereGrid& g = grid_;
    Fields3 tp, tt;
    for (int c = 0; c < 3; ++c) tp[c] = d_.d_psi(tau[c], 1), tt[c] = d_.d_theta(tau[c]);
    Fields3 out = zeros(g);
    for (int i = 0; i < g.n_psi; ++i) {
        const double s = std::sin(g.psi(i));
        for (int j = 0; j < g.n_theta; ++j) {
            const int k = g.idx(i, j);
            double da = 0.0, db = 0.0, dc = 0.0;
            for (int c = 0; c < 3; ++c) {
                da += 2.0 * gXp_[c][k] * tp[c][k] + Gpp_[c][k] * tau[c][k];
                db += gXp_[c][k] * tt[c][k] + gXt_[c][k] * tp[c][k] + Gpt_[c][k] * tau[c][k];
                dc += 2.0 * gXt_[c][k] * tt[c][k] + Gtt_[c][k] * tau[c][k];
            }
            out[0][k] = da;
            out[1][k] = db / s;
            out[2][k] = dc / (s * s);
        }
    }
    return out;
}

std::array<Field, 3> LinearizedOperator::apply_transpose(const std::array<Field, 3>& q) const
{
    const SphereGrid& g = grid_;
    Fields3 out = zeros(g);
    for (int c = 0; c < 3; ++c) {
        Field fp(g.size()), ft(g.size());
        for (int i = 0; i < g.n_psi; ++i) {
            const double s = std::sin(g.psi(i));
            for (int j = 0; j < g.n_theta; ++j) {
                const int k = g.idx(i, j);
                const double qa = q[0][k], qb = q[1][k] / s, qc = q[2][k] / (s * s);
                fp[k] = 2.0 * gXp_[c][k] * qa + gXt_[c][k] * qb;
                ft[k] = gXp_[c][k] * qb + 2.0 * gXt_[c][k] * qc;
                out[c][k] = Gpp_[c][k] * qa + Gpt_[c][k] * qb + Gtt_[c][k] * qc;
            }
        }
        const Field a = d_.d_psi_transpose(fp, 1), b = d_.d_theta_transpose(ft);
        for (int k = 0; k < g.size(); ++k) out[c][k] += a[k] + b[k];
    }
    return out;
}

std::array<Field, 3> LinearizedOperator::project(const std::array<Field, 3>& tau) const
{
    const int n = grid_.n_psi, m = grid_.n_theta;
    Fields3 out = tau;
    for (Field& f : out) {
        for (int i = 0; i < n; ++i) {
            double c = 0.0;
            for (int j = 0; j < m; ++j) c += (j % 2 ? -1.0 : 1.0) * f[i * m + j];
            c /= m;
            for (int j = 0; j < m; ++j) f[i * m + j] -= (j % 2 ? -1.0 : 1.0) * c;
        }
        std::vector<double> h(m, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) h[j] += (i % 2 ? -1.0 : 1.0) * f[i * m + j] / n;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) f[i * m + j] -= (i % 2 ? -1.0 : 1.0) * 0.5 * (h[j] - h[(j + m / 2) % m]);
    }
    return out;
}

LinearizedOperator::BlockBasis LinearizedOperator::block_basis(int k) const
{
    const int n = grid_.n_psi, m = grid_.n_theta;
    BlockBasis B;
    const int modes[3] = {k - 1, k + 1, k};
    for (int part = 0; part < 3; ++part) {
        const int q = wrap_mode(modes[part], m);
        if (q == m / 2) {
            B.Z[part].resize(n, 0);
        } else if (q % 2 != 0) {
            Eigen::VectorXd v(n);
            for (int i = 0; i < n; ++i) v[i] = (i % 2 ? -1.0 : 1.0);
            Eigen::HouseholderQR<Eigen::MatrixXd> qr(v);
            const Eigen::MatrixXd Q = qr.householderQ();
            B.Z[part] = Q.rightCols(n - 1);
        } else {
            B.Z[part] = Eigen::MatrixXd::Identity(n, n);
        }
        B.dim += static_cast<int>(B.Z[part].cols());
    }
    return B;
}

Eigen::MatrixXcd LinearizedOperator::block(int k) const
{
    if (!axisym_) throw UnsupportedError("linearized operator: Fourier blocks need an axisymmetric map");
    const int n = grid_.n_psi, m = grid_.n_theta;
    const BlockBasis B = block_basis(k);
    const double r2 = 1.0 / std::sqrt(2.0);
    const cd I(0.0, 1.0);
    // coefficient of V . u for the three parts, V taken on the theta = 0 column
    auto coef = [&](const Fields3& V, int part) {
        Eigen::VectorXcd out(n);
        for (int i = 0; i < n; ++i) {
            const int id = grid_.idx(i, 0);
            if (part == 0) out[i] = r2 * cd(V[0][id], V[1][id]);
            else if (part == 1) out[i] = r2 * cd(V[0][id], -V[1][id]);
            else out[i] = V[2][id];
        }
        return out;
    };
    Eigen::VectorXd is(n), is2(n);
    for (int i = 0; i < n; ++i) {
        const double s = std::sin(grid_.psi(i));
        is[i] = 1.0 / s;
        is2[i] = 1.0 / (s * s);
    }
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(3 * n, B.dim);
    const int modes[3] = {k - 1, k + 1, k};
    int col = 0;
    for (int part = 0; part < 3; ++part) {
        const Eigen::MatrixXd& Z = B.Z[part];
        if (Z.cols() == 0) continue;
        const int q = wrap_mode(modes[part], m);
        const Eigen::MatrixXcd Zc = Z.cast<cd>();
        const Eigen::MatrixXcd DZ = (d_.psi_matrix(1, q % 2 == 0 ? 1 : -1) * Z).cast<cd>();
        const cd ik = I * d_.theta_multiplier(q);
        const Eigen::VectorXcd cp = coef(gXp_, part), ct = coef(gXt_, part);
        const Eigen::VectorXcd gpp = coef(Gpp_, part), gpt = coef(Gpt_, part), gtt = coef(Gtt_, part);
        const int w = static_cast<int>(Z.cols());
        M.block(0, col, n, w) = 2.0 * cp.asDiagonal() * DZ + gpp.asDiagonal() * Zc;
        M.block(n, col, n, w) =
            is.cast<cd>().asDiagonal() * (Eigen::MatrixXcd((ik * cp).asDiagonal() * Zc) + ct.asDiagonal() * DZ +
                                          gpt.asDiagonal() * Zc);
        M.block(2 * n, col, n, w) =
            is2.cast<cd>().asDiagonal() * (Eigen::MatrixXcd((2.0 * ik * ct).asDiagonal() * Zc) + gtt.asDiagonal() * Zc);
        col += w;
    }
    return M;
}

Eigen::MatrixXd LinearizedOperator::dense() const
{
    const int N = grid_.size();
    if (N > dense_limit) throw UnsupportedError("linearized operator: dense assembly limited to 1024 nodes");
    Eigen::MatrixXd M(3 * N, 3 * N);
    for (int c = 0; c < 3; ++c)
        for (int k = 0; k < N; ++k) {
            Fields3 e = zeros(grid_);
            e[c][k] = 1.0;
            const Fields3 r = apply(project(e));
            for (int cc = 0; cc < 3; ++cc)
                for (int kk = 0; kk < N; ++kk) M(cc * N + kk, c * N + k) = r[cc][kk];
        }
    return M;
}

namespace {

// dimension removed by the projection, per component
int removed_per_component(const SphereGrid& g)
{
    const int half = g.n_theta / 2;
    return g.n_psi + half - (half % 2 != 0 ? 1 : 0);
}

} // namespace

std::vector<double> LinearizedOperator::singular_values() const
{
    std::vector<double> sv;
    if (axisym_) {
        const int m = grid_.n_theta;
        for (int k = -m / 2 + 1; k <= m / 2; ++k) {
            Eigen::BDCSVD<Eigen::MatrixXcd> svd(block(k));
            for (int i = 0; i < svd.singularValues().size(); ++i) sv.push_back(svd.singularValues()[i]);
        }
    } else {
        Eigen::MatrixXd M = dense();
        const int n = static_cast<int>(M.rows());
        std::vector<double> S(n), superb(n);
        const int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', n, n, M.data(), n, S.data(), nullptr, 1, nullptr, 1);
        if (info != 0) throw SolverError("linearized operator: SVD failed", 0.0);
        S.resize(n - 3 * removed_per_component(grid_));
        sv = std::move(S);
    }
    std::sort(sv.begin(), sv.end(), std::greater<>());
    return sv;
}

int LinearizedOperator::kernel_dimension(double rel_tol) const
{
    const std::vector<double> sv = singular_values();
    const double tol = rel_tol * sv.front();
    return static_cast<int>(std::count_if(sv.begin(), sv.end(), [&](double s) { return s <= tol; }));
}

LinearizedOperator::Solution LinearizedOperator::solve_blocks(const std::array<Field, 3>& q, double rel_tol) const
{
    const int n = grid_.n_psi, m = grid_.n_theta;
    Eigen::FFT<double> fft;
    // theta-Fourier coefficients of each output row, q(theta) = sum_k Q_k e^{ik theta}
    std::array<Eigen::MatrixXcd, 3> Q;
    double total = 0.0;
    {
        std::vector<double> row(m);
        std::vector<cd> spec;
        for (int f = 0; f < 3; ++f) {
            Q[f].resize(n, m);
            for (int i = 0; i < n; ++i) {
                std::copy(q[f].begin() + i * m, q[f].begin() + (i + 1) * m, row.begin());
                fft.fwd(spec, row);
                for (int k = 0; k < m; ++k) Q[f](i, k) = spec[k] / double(m);
            }
            total = std::max(total, Q[f].cwiseAbs().maxCoeff());
        }
    }
    std::array<Eigen::MatrixXcd, 3> T;
    for (auto& t : T) t = Eigen::MatrixXcd::Zero(n, m);
    const double r2 = 1.0 / std::sqrt(2.0);
    const cd I(0.0, 1.0);
    int kernel = 0;
    for (int k = -m / 2 + 1; k <= m / 2; ++k) {
        const int col = (k + m) % m;
        Eigen::VectorXcd rhs(3 * n);
        for (int f = 0; f < 3; ++f) rhs.segment(f * n, n) = Q[f].col(col);
        const double size = rhs.cwiseAbs().maxCoeff();
        if (size == 0.0 || size <= 1e-14 * total || size <= 1e-14 * scale_) continue;
        const Eigen::MatrixXcd M = block(k);
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
        int null = 0;
        const Eigen::VectorXcd c = pinv_solve(svd, rhs, rel_tol * svd.singularValues()[0], null);
        kernel += null;
        const BlockBasis B = block_basis(k);
        const int modes[3] = {k - 1, k + 1, k};
        int off = 0;
        for (int part = 0; part < 3; ++part) {
            const int w = static_cast<int>(B.Z[part].cols());
            if (w == 0) continue;
            const Eigen::VectorXcd prof = B.Z[part].cast<cd>() * c.segment(off, w);
            off += w;
            const int qc = ((modes[part] % m) + m) % m;
            if (part == 0) {
                T[0].col(qc) += r2 * prof;
                T[1].col(qc) += I * r2 * prof;
            } else if (part == 1) {
                T[0].col(qc) += r2 * prof;
                T[1].col(qc) -= I * r2 * prof;
            } else {
                T[2].col(qc) += prof;
            }
        }
    }
    if (kernel > max_kernel) {
        std::ostringstream os;
        os << "linearized operator: degenerate linearization, kernel dimension " << kernel;
        throw EmbeddingError(os.str());
    }
    Solution sol;
    sol.tau = zeros(grid_);
    std::vector<cd> spec(m);
    std::vector<double> row(m);
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < m; ++k) spec[k] = T[c](i, k) * double(m);
            fft.inv(row, spec);
            std::copy(row.begin(), row.end(), sol.tau[c].begin() + i * m);
        }
    sol.kernel = kernel;
    sol.route = "fourier-blocks";
    return sol;
}

LinearizedOperator::Solution LinearizedOperator::solve_dense(const std::array<Field, 3>& q, double rel_tol) const
{
    const int N = grid_.size();
    Eigen::MatrixXd M = dense();
    const int n = 3 * N;
    Eigen::MatrixXd U(n, n), VT(n, n);
    std::vector<double> S(n);
    const int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', n, n, M.data(), n, S.data(), U.data(), n, VT.data(), n);
    if (info != 0) throw SolverError("linearized operator: SVD failed", 0.0);
    Eigen::VectorXd b(n);
    for (int c = 0; c < 3; ++c)
        for (int k = 0; k < N; ++k) b[c * N + k] = q[c][k];
    Eigen::VectorXd coef = U.transpose() * b;
    const double tol = rel_tol * S[0];
    int null = 0;
    for (int k = 0; k < n; ++k) {
        if (S[k] > tol) coef[k] /= S[k];
        else coef[k] = 0.0, ++null;
    }
    const Eigen::VectorXd x = VT.transpose() * coef;
    Solution sol;
    sol.tau = zeros(grid_);
    for (int c = 0; c < 3; ++c)
        for (int k = 0; k < N; ++k) sol.tau[c][k] = x[c * N + k];
    sol.kernel = null - 3 * removed_per_component(grid_);
    if (sol.kernel > max_kernel) {
        std::ostringstream os;
        os << "linearized operator: degenerate linearization, kernel dimension " << sol.kernel;
        throw EmbeddingError(os.str());
    }
    sol.route = "dense-svd";
    return sol;
}

LinearizedOperator::Solution LinearizedOperator::solve_refined(const std::array<Field, 3>& q, double rel_tol) const
{
    // preconditioner: Fourier blocks at the theta-average of the map rotated back to theta = 0
    const SphereGrid& g = grid_;
    EmbeddingMap sym{g, zeros(g)};
    for (int i = 0; i < g.n_psi; ++i) {
        Vec3 avg = Vec3::Zero();
        for (int j = 0; j < g.n_theta; ++j) {
            const double c = std::cos(g.theta(j)), s = std::sin(g.theta(j));
            const Vec3 y = at(map_.y, g.idx(i, j));
            avg += Vec3(c * y[0] + s * y[1], -s * y[0] + c * y[1], y[2]);
        }
        avg /= g.n_theta;
        for (int j = 0; j < g.n_theta; ++j) {
            const double c = std::cos(g.theta(j)), s = std::sin(g.theta(j));
            put(sym.y, g.idx(i, j), Vec3(c * avg[0] - s * avg[1], s * avg[0] + c * avg[1], avg[2]));
        }
    }
    const LinearizedOperator P(sym, spec_);
    Solution sol;
    sol.tau = zeros(g);
    Fields3 r = q;
    const double q0 = sup3(q);
    double res = q0, best = q0;
    int stalls = 0;
    for (int it = 0; it < 200 && res > 1e-12 * q0; ++it) {
        const Solution step = P.solve_blocks(r, rel_tol);
        sol.kernel = step.kernel;
        for (int c = 0; c < 3; ++c)
            for (int k = 0; k < g.size(); ++k) sol.tau[c][k] += step.tau[c][k];
        const Fields3 Lt = apply(sol.tau);
        for (int c = 0; c < 3; ++c)
            for (int k = 0; k < g.size(); ++k) r[c][k] = q[c][k] - Lt[c][k];
        res = sup3(r);
        if (!std::isfinite(res) || res > 10.0 * q0) throw SolverError("linearized operator: iterative refinement diverged", res);
        if (res > 0.9 * best) {
            if (++stalls >= 3) break;
        } else {
            stalls = 0;
        }
        best = std::min(best, res);
    }
    sol.route = "block-refinement";
    return sol;
}

LinearizedOperator::Solution LinearizedOperator::solve(const std::array<Field, 3>& q, double rel_tol) const
{
    Solution sol;
    if (axisym_) sol = solve_blocks(q, rel_tol);
    else if (grid_.size() <= dense_limit) sol = solve_dense(q, rel_tol);
    else sol = solve_refined(q, rel_tol);
    const Fields3 r = apply(sol.tau);
    double res = 0.0;
    for (int c = 0; c < 3; ++c)
        for (int k = 0; k < grid_.size(); ++k) res = std::max(res, std::abs(r[c][k] - q[c][k]));
    sol.residual = res;
    return sol;
}

} // namespace weyl
