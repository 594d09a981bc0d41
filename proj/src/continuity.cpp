#include "weyl/embed.hpp"
#include "weyl/errors.hpp"
#include "weyl/estimates.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace weyl {

namespace {

using Fields3 = std::array<Field, 3>;

// Metric homotopy g_t, t in [0, 1].  [0, 1/3]: round metrics of radius phi
// growing from phi_eps to phi_1.  Conformal targets: [1/3, 2/3] blends the
// conformal factor from log phi_1 to the flow limit, [2/3, 1] runs the flow
// backwards.  Other targets: (a, b, c) blend from the round metric on [1/3, 1].
class Path {
public:
    Path(const Metric2S& target, const ContinuityOptions& opts) : target_(target), grid_(target.grid())
    {
        phi1_ = std::sqrt(target.area() / (4.0 * std::numbers::pi));
        phi_eps_ = phi1_;
        std::optional<Field> u = target.conformal_factor();
        if (!u) {
            const double scale = std::max(sup_norm(target.a()), sup_norm(target.c()));
            double off = sup_norm(target.b());
            for (std::size_t k = 0; k < target.a().size(); ++k)
                off = std::max(off, std::abs(target.a()[k] - target.c()[k]));
            if (off <= 1e-12 * scale) {
                Field v(target.a().size());
                for (std::size_t k = 0; k < v.size(); ++k) v[k] = 0.5 * std::log(target.a()[k]);
                u = v;
            }
        }
        if (u) {
            conformal_ = true;
            FlowOptions fo;
            fo.dt = opts.flow_dt;
            fo.variance_tol = 1e-12;
            fo.snapshot_every = 1;
            const FlowResult fr =
                ricci_flow_path(Metric2S::conformal_round(grid_, *u, Provenance::analytic), opts.flow_steps, fo);
            for (const Metric2S& s : fr.snapshots) flow_u_.push_back(*s.conformal_factor());
            flow_t_ = fr.times;
        }
    }

    void set_phi_eps(double p) { phi_eps_ = p; }
    double phi_eps() const { return phi_eps_; }
    double phi1() const { return phi1_; }
    bool conformal() const { return conformal_; }

    Metric2S operator()(double t) const
    {
        if (t <= 1.0 / 3.0) return Metric2S::round(grid_, phi_eps_ + (phi1_ - phi_eps_) * 3.0 * t);
        if (!conformal_) {
            const double tau = std::min(1.0, 1.5 * t - 0.5);
            const double r2 = phi1_ * phi1_;
            Field a(grid_.size()), b(grid_.size()), c(grid_.size());
            for (int k = 0; k < grid_.size(); ++k) {
                a[k] = (1.0 - tau) * r2 + tau * target_.a()[k];
                b[k] = tau * target_.b()[k];
                c[k] = (1.0 - tau) * r2 + tau * target_.c()[k];
            }
            return Metric2S(grid_, std::move(a), std::move(b), std::move(c), Provenance::analytic);
        }
        Field u(grid_.size());
        if (t <= 2.0 / 3.0) {
            const double tau = 3.0 * t - 1.0, c0 = std::log(phi1_);
            const Field& ui = flow_u_.back();
            for (int k = 0; k < grid_.size(); ++k) u[k] = (1.0 - tau) * c0 + tau * ui[k];
        } else {
            const double tau = std::min(1.0, 3.0 * t - 2.0);
            const double T = flow_t_.back() * (1.0 - tau);
            auto it = std::upper_bound(flow_t_.begin(), flow_t_.end(), T);
            std::size_t hi = std::clamp<std::size_t>(it - flow_t_.begin(), 1, flow_t_.size() - 1);
            if (flow_t_.size() == 1) hi = 0;
            const std::size_t lo = hi == 0 ? 0 : hi - 1;
            const double w = hi == lo ? 0.0 : (T - flow_t_[lo]) / (flow_t_[hi] - flow_t_[lo]);
            for (int k = 0; k < grid_.size(); ++k) u[k] = (1.0 - w) * flow_u_[lo][k] + w * flow_u_[hi][k];
            if (tau == 1.0) u = flow_u_.front();
        }
        return Metric2S::conformal_round(grid_, std::move(u), Provenance::flow);
    }

private:
    Metric2S target_;
    SphereGrid grid_;
    double phi1_ = 1.0, phi_eps_ = 1.0;
    bool conformal_ = false;
    std::vector<Field> flow_u_;
    std::vector<double> flow_t_;
};

Fields3 metric_residual(const EmbeddingMap& map, const WarpSpec& spec, const Metric2S& target)
{
    const Metric2S m = map_metric(map, spec);
    Fields3 r{m.a(), m.b(), m.c()};
    for (int k = 0; k < map.grid.size(); ++k) {
        r[0][k] -= target.a()[k];
        r[1][k] -= target.b()[k];
        r[2][k] -= target.c()[k];
    }
    return r;
}

double sup3(const Fields3& f) { return std::max({sup_norm(f[0]), sup_norm(f[1]), sup_norm(f[2])}); }

double max_abs_kappa(const EmbeddingMap& map, const WarpSpec& spec)
{
    const auto [k1, k2] = map_principal_curvatures(map, spec);
    return std::max(sup_norm(k1), sup_norm(k2));
}

struct NewtonResult {
    bool ok = false;
    int iterations = 0;
    double residual = 0.0;
};

NewtonResult newton(EmbeddingMap& y, const WarpSpec& spec, const Metric2S& target, double tol, int max_iter)
{
    NewtonResult out;
    Fields3 r = metric_residual(y, spec, target);
    double res = sup3(r);
    while (res >= tol && out.iterations < max_iter) {
        const LinearizedOperator L(y, spec);
        Fields3 q = r;
        for (Field& f : q)
            for (double& v : f) v = -v;
        const auto sol = L.solve(q);
        ++out.iterations;
        double lambda = 1.0;
        bool accepted = false;
        while (lambda >= 1.0 / 1024.0) {
            EmbeddingMap trial = y;
            for (int c = 0; c < 3; ++c)
                for (int k = 0; k < y.grid.size(); ++k) trial.y[c][k] += lambda * sol.tau[c][k];
            Fields3 rt;
            double rest;
            try {
                rt = metric_residual(trial, spec, target);
                rest = sup3(rt);
            } catch (const DomainError&) {
                rest = std::numeric_limits<double>::infinity();
            }
            if (rest <= (1.0 - 1e-4 * lambda) * res) {
                y = std::move(trial);
                r = std::move(rt);
                res = rest;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) break;
    }
    out.residual = res;
    out.ok = res < tol;
    return out;
}

} // namespace

EmbeddingState continuity_solve(const Metric2S& target, const WarpSpec& spec, const ContinuityOptions& opts)
{
    if (spec.eta_form())
        throw UnsupportedError("continuity_solve: eta-form ambients contain a horizon; use a phi-form warp");
    if (spec.n() != 2) throw UnsupportedError("continuity_solve: surfaces in 3-dimensional ambients only");
    if (!(opts.tol > 0.0)) throw ConfigError("continuity_solve: tol must be positive");
    const SphereGrid& g = target.grid();
    const double step_tol = opts.step_tol > 0.0 ? opts.step_tol : 0.1 * opts.tol;

    Path path(target, opts);
    const double x1 = spec.x_of_phi(path.phi1());

    // curvature demand of the non-round parts fixes the initial sphere
    const int samples = std::max(opts.path_samples, 4);
    std::vector<double> ts;
    for (int k = 0; k < samples; ++k) ts.push_back(double(k) / (samples - 1));
    double Kmax = 1.0 / (path.phi1() * path.phi1());
    std::vector<Field> Rs(ts.size());
    for (std::size_t s = 0; s < ts.size(); ++s) {
        if (ts[s] <= 1.0 / 3.0) continue;
        Rs[s] = intrinsic_curvature(path(ts[s]));
        Kmax = std::max(Kmax, 0.5 * *std::max_element(Rs[s].begin(), Rs[s].end()));
    }
    path.set_phi_eps(std::min(0.5 * path.phi1(), 0.5 / std::sqrt(Kmax)));
    const double x_eps = spec.x_of_phi(path.phi_eps());

    const Interval dom = spec.domain();
    Region region{x_eps, 2.0 * x1};
    if (!(region.hi < dom.hi)) region.hi = 0.5 * (x1 + dom.hi);
    const double threshold = ellipticity_threshold(spec, region);
    for (std::size_t s = 0; s < ts.size(); ++s) {
        const Field R = ts[s] <= 1.0 / 3.0 ? intrinsic_curvature(path(ts[s])) : Rs[s];
        const auto it = std::min_element(R.begin(), R.end());
        if (!(*it > threshold)) {
            const int node = static_cast<int>(it - R.begin());
            std::ostringstream os;
            os << "continuity_solve: path ellipticity failure at t = " << ts[s] << ", node (" << node / g.n_theta
               << "," << node % g.n_theta << "): R = " << *it << " needs > " << threshold;
            throw HypothesisError(os.str(), static_cast<int>(s), node);
        }
    }

    EmbeddingState st{coordinate_sphere_map(g, x_eps), 0.0, target, 0.0, 0, {}};
    {
        const NewtonResult nr = newton(st.map, spec, path(0.0), step_tol, opts.max_newton);
        if (!nr.ok) throw SolverError("continuity_solve: initial sphere does not converge", nr.residual);
        st.trace.push_back({0.0, nr.iterations, nr.residual, max_abs_kappa(st.map, spec)});
    }

    std::optional<EmbeddingMap> prev;
    double t_prev = 0.0;
    double dt = opts.dt0;
    while (st.t < 1.0) {
        double t_new = st.t + dt;
        if (t_new > 1.0 - 1e-12) t_new = 1.0;
        EmbeddingMap y = st.map;
        // the path has kinks at 1/3 and 2/3; extrapolate only inside one part
        auto smooth = [&](double k) { return !(t_prev < k && k < t_new); };
        if (prev && smooth(1.0 / 3.0) && smooth(2.0 / 3.0)) {
            const double w = (t_new - st.t) / (st.t - t_prev);
            for (int c = 0; c < 3; ++c)
                for (int k = 0; k < g.size(); ++k) y.y[c][k] += w * (st.map.y[c][k] - prev->y[c][k]);
        }
        const Metric2S gt = path(t_new);
        NewtonResult nr;
        try {
            nr = newton(y, spec, gt, step_tol, opts.max_newton);
        } catch (const DomainError&) {
            nr.ok = false;
            nr.residual = std::numeric_limits<double>::infinity();
        }
        if (!nr.ok && t_new == 1.0 && nr.residual < opts.tol) nr.ok = true;
        if (!nr.ok) {
            dt *= 0.5;
            if (dt < opts.dt_min) {
                std::ostringstream os;
                os << "continuity_solve: Newton stall at t = " << t_new << " (step halving exhausted)";
                throw SolverError(os.str(), nr.residual);
            }
            continue;
        }
        const double kap = max_abs_kappa(y, spec);
        if (!(kap < opts.kappa_cap)) {
            std::ostringstream os;
            os << "continuity_solve: curvature blow-up at t = " << t_new << ", max |kappa| = " << kap;
            throw SolverError(os.str(), nr.residual);
        }
        prev = std::move(st.map);
        t_prev = st.t;
        st.map = std::move(y);
        st.t = t_new;
        st.trace.push_back({t_new, nr.iterations, nr.residual, kap});
        if (nr.iterations <= 2) dt = std::min(2.0 * dt, 1.0 / 6.0);
    }

    st.residual = sup3(metric_residual(st.map, spec, target));
    if (!(st.residual < opts.tol)) throw SolverError("continuity_solve: residual floor above tol", st.residual);
    try {
        st.kernel = LinearizedOperator(st.map, spec).kernel_dimension();
    } catch (const UnsupportedError&) {
        st.kernel = -1;
    }
    return st;
}

double aligned_distance(const EmbeddingMap& map, const std::vector<std::array<double, 3>>& reference)
{
    const int N = map.grid.size();
    if (static_cast<int>(reference.size()) != N) throw ConfigError("aligned_distance: size mismatch");
    Eigen::MatrixXd P(3, N), Q(3, N);
    for (int k = 0; k < N; ++k)
        for (int c = 0; c < 3; ++c) P(c, k) = map.y[c][k], Q(c, k) = reference[k][c];
    const Eigen::Vector3d pc = P.rowwise().mean(), qc = Q.rowwise().mean();
    P.colwise() -= pc;
    Q.colwise() -= qc;
    const Eigen::Matrix3d H = P * Q.transpose();
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d D = Eigen::Matrix3d::Identity();
    D(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0 ? -1.0 : 1.0;
    const Eigen::Matrix3d R = svd.matrixV() * D * svd.matrixU().transpose();
    return ((R * P) - Q).colwise().norm().maxCoeff();
}

} // namespace weyl
