#include "doctest.h"
#include "weyl/embed.hpp"
#include "weyl/errors.hpp"
#include "weyl/estimates.hpp"
#include "weyl/fixtures.hpp"

#include <cmath>
#include <numbers>
#include <string>

using namespace weyl;

namespace {

using Fields3 = std::array<Field, 3>;

double p2_u(double a, double p) { return a * legendre_p2(std::cos(p)); }
double p2_du(double a, double p) { return -3.0 * a * std::cos(p) * std::sin(p); }

AxisymMetric conformal_p2(double a)
{
    return AxisymMetric::conformal([a](double p) { return p2_u(a, p); }, [a](double p) { return p2_du(a, p); });
}

Field conformal_field(const SphereGrid& g, const std::function<double(double, double)>& u)
{
    Field f(g.size());
    for (int i = 0; i < g.n_psi; ++i)
        for (int j = 0; j < g.n_theta; ++j) f[g.idx(i, j)] = u(g.psi(i), g.theta(j));
    return f;
}

EmbeddingMap map_of(const AxisymEmbedding& e, const SphereGrid& g)
{
    EmbeddingMap m{g, {Field(g.size()), Field(g.size()), Field(g.size())}};
    const auto pts = axisym_points(e, g);
    for (int k = 0; k < g.size(); ++k)
        for (int c = 0; c < 3; ++c) m.y[c][k] = pts[k][c];
    return m;
}

double dot(const Fields3& a, const Fields3& b)
{
    double s = 0.0;
    for (int c = 0; c < 3; ++c)
        for (std::size_t k = 0; k < a[c].size(); ++k) s += a[c][k] * b[c][k];
    return s;
}

double sup3(const Fields3& a)
{
    return std::max({sup_norm(a[0]), sup_norm(a[1]), sup_norm(a[2])});
}

Fields3 smooth_field(const SphereGrid& g, double seed)
{
    Fields3 f;
    for (int c = 0; c < 3; ++c)
        f[c] = conformal_field(g, [&](double p, double t) {
            const double x = std::sin(p) * std::cos(t), y = std::sin(p) * std::sin(t), z = std::cos(p);
            return std::sin(seed + c) * x * z + std::cos(seed * (c + 1)) * y * y + 0.3 * (c + 1) * z * z * z + 0.1 * x * y;
        });
    return f;
}

// rotations e_c x y, and translations e_c when the ambient is flat
std::vector<Fields3> rigid_fields(const EmbeddingMap& m, bool translations)
{
    std::vector<Fields3> out;
    const int N = m.grid.size();
    for (int c = 0; c < 3; ++c) {
        Fields3 r{Field(N), Field(N), Field(N)};
        const int a = (c + 1) % 3, b = (c + 2) % 3;
        for (int k = 0; k < N; ++k) r[a][k] = -m.y[b][k], r[b][k] = m.y[a][k];
        out.push_back(r);
        if (translations) {
            Fields3 t{Field(N, 0.0), Field(N, 0.0), Field(N, 0.0)};
            t[c] = Field(N, 1.0);
            out.push_back(t);
        }
    }
    return out;
}

} // namespace

TEST_CASE("axisymmetric metric validation")
{
    CHECK_THROWS_AS(AxisymMetric::from_alpha(
                        std::numbers::pi, [](double s) { return 2.0 * std::sin(s); },
                        [](double s) { return 2.0 * std::cos(s); }),
                    ConfigError);
    const AxisymMetric r = AxisymMetric::round(2.0);
    CHECK(r.area() == doctest::Approx(16.0 * std::numbers::pi).epsilon(1e-10));
    CHECK(r.s_max() == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-10));
    const SphereGrid g(16, 32);
    const AxisymMetric back = AxisymMetric::from_metric(conformal_p2(0.1).sample(g));
    for (double p : {0.3, 1.0, 2.5}) CHECK(back(p).alpha == doctest::Approx(conformal_p2(0.1)(p).alpha).epsilon(1e-6));
}

TEST_CASE("round spheres embed as coordinate spheres")
{
    const SphereGrid g(32, 64);
    const AxisymEmbedding e1 = embed_axisym(AxisymMetric::round(1.0), WarpSpec::euclidean(), g);
    CHECK(e1.x_north == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(e1.round_trip < 1e-8);
    for (const auto& q : e1.profile) {
        CHECK(q.x == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(q.psi == doctest::Approx(q.s).epsilon(1e-9));
    }
    const AxisymEmbedding e2 = embed_axisym(AxisymMetric::round(2.0), WarpSpec::euclidean(), g);
    CHECK(e2.x_north == doctest::Approx(2.0).epsilon(1e-10));
    const AxisymEmbedding eh = embed_axisym(AxisymMetric::round(1.0), WarpSpec::hyperbolic(), g);
    CHECK(eh.x_north == doctest::Approx(std::asinh(1.0)).epsilon(1e-10));
    CHECK(eh.round_trip < 1e-8);
    const AxisymEmbedding es = embed_axisym(AxisymMetric::round(3.0), preset("schwarzschild-m1"), g);
    CHECK(es.x_north == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("axisymmetric embeddings reproduce their metric")
{
    const SphereGrid g(64, 128);
    for (const std::string name : {"euclidean", "hyperbolic", "schwarzschild-m1"}) {
        const WarpSpec w = preset(name);
        for (const std::string fx : {"sphere", "prolate", "p2"}) {
            const AxisymMetric m = AxisymMetric::from_metric(induced_metric(fixture_graph(fx, w, g)));
            const AxisymEmbedding e = embed_axisym(m, w, g);
            CAPTURE(name);
            CAPTURE(fx);
            CHECK(e.round_trip < 1e-6);
            CHECK(std::abs(e.psi_of_p(0.0)) < 1e-12);
            CHECK(e.psi_of_p(std::numbers::pi) == doctest::Approx(std::numbers::pi).epsilon(1e-10));
            for (double p : {0.4, 1.3, 2.2}) CHECK(e.p_of_psi(e.psi_of_p(p)) == doctest::Approx(p).epsilon(1e-9));
        }
        const double scale = w.eta_form() ? 3.0 : 1.0;
        const AxisymMetric c = AxisymMetric::conformal([scale](double p) { return std::log(scale) + p2_u(0.05, p); },
                                                       [](double p) { return p2_du(0.05, p); });
        CAPTURE(name);
        CHECK(embed_axisym(c, w, g).round_trip < 1e-6);
    }
}

TEST_CASE("axisymmetric embedding errors")
{
    const SphereGrid g(32, 64);
    // alpha_s exceeds 1 on the meridian
    CHECK_THROWS_AS(embed_axisym(conformal_p2(-1.0), WarpSpec::euclidean(), g), EmbeddingError);
    CHECK_THROWS_AS(embed_axisym(AxisymMetric::round(2.0), WarpSpec::spherical(), g), DomainError);
}

TEST_CASE("Brown-York mass of coordinate spheres")
{
    const SphereGrid g(32, 64);
    const WarpSpec w = preset("schwarzschild-m1");
    for (double s : {1.5, 2.0, 5.0}) {
        const double m = brown_york_axisym(make_graph(g, w, [s](double, double) { return s; }));
        CHECK(m == doctest::Approx(s * (1.0 - std::sqrt(1.0 - 1.0 / s))).epsilon(1e-8));
    }
    const double flat = brown_york_axisym(fixture_graph("p2", WarpSpec::euclidean(), SphereGrid(64, 128)));
    CHECK(std::abs(flat) < 1e-6);
}

TEST_CASE("flat mean curvature of round spheres")
{
    const SphereGrid g(16, 32);
    for (double v : flat_mean_curvature(AxisymMetric::round(2.0), g)) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("Ricci flow")
{
    const SphereGrid g(32, 64);
    const FlowResult still = ricci_flow_path(Metric2S::round(g), 10);
    CHECK(still.converged);
    CHECK(still.snapshots.size() == 1);

    for (int which : {2, 3}) {
        const Field u = conformal_field(g, [which](double p, double) {
            return which == 2 ? 0.2 * legendre_p2(std::cos(p)) : 0.3 * legendre_p3(std::cos(p));
        });
        FlowOptions o;
        o.snapshot_every = 5;
        const FlowResult r = ricci_flow_path(Metric2S::conformal_round(g, u), 2000, o);
        CAPTURE(which);
        CHECK(r.converged);
        CHECK(r.variance.back() < 1e-6);
        for (std::size_t k = 1; k < r.variance.size(); ++k) CHECK(r.variance[k] <= r.variance[k - 1] * (1.0 + 1e-9));
        for (double A : r.area) CHECK(A == doctest::Approx(r.area.front()).epsilon(1e-12));
        CHECK(r.snapshots.back().provenance() == Provenance::flow);
        CHECK(r.times.size() == r.snapshots.size());
    }
}

TEST_CASE("Ricci flow needs a conformal start")
{
    const SphereGrid g(16, 32);
    const Field one(g.size(), 1.0);
    Field F(g.size());
    for (int i = 0; i < g.n_psi; ++i)
        for (int j = 0; j < g.n_theta; ++j) F[g.idx(i, j)] = 0.1 * std::pow(std::sin(g.psi(i)), 2) * std::cos(g.theta(j));
    Field G(g.size());
    for (int i = 0; i < g.n_psi; ++i)
        for (int j = 0; j < g.n_theta; ++j) G[g.idx(i, j)] = std::pow(std::sin(g.psi(i)), 2);
    CHECK_THROWS_AS(ricci_flow_path(Metric2S::from_EFG(g, one, F, G), 10), PreconditionError);
}

TEST_CASE("conformal scalar curvature")
{
    const SphereGrid g(32, 64);
    for (double v : conformal_scalar_curvature(g, Field(g.size(), std::log(2.0)))) CHECK(v == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("linearized operator kernel and adjoint")
{
    const SphereGrid g(16, 32);
    const EmbeddingMap sphere = coordinate_sphere_map(g, 1.0);
    const LinearizedOperator L(sphere, WarpSpec::euclidean());
    CHECK(L.axisymmetric());
    CHECK(L.kernel_dimension() == 6);

    for (const Fields3& r : rigid_fields(sphere, true)) CHECK(sup3(L.apply(r)) < 1e-12);

    const Fields3 x = smooth_field(g, 0.3), q = smooth_field(g, 1.7);
    CHECK(dot(L.apply(x), q) == doctest::Approx(dot(x, L.apply_transpose(q))).epsilon(1e-12));

    const AxisymEmbedding e = embed_axisym(AxisymMetric::round(1.0), WarpSpec::hyperbolic(), g);
    const EmbeddingMap hm = map_of(e, g);
    const LinearizedOperator Lh(hm, WarpSpec::hyperbolic());
    CHECK(Lh.kernel_dimension() == 6);
    for (const Fields3& r : rigid_fields(hm, false)) CHECK(sup3(Lh.apply(r)) < 1e-10);
}

TEST_CASE("dense matrix and Fourier blocks agree")
{
    const SphereGrid g(8, 16);
    const AxisymEmbedding e = embed_axisym(conformal_p2(0.1), WarpSpec::euclidean(), g);
    const LinearizedOperator L(map_of(e, g), WarpSpec::euclidean());
    const std::vector<double> sv = L.singular_values();
    const Eigen::MatrixXd D = L.dense();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(D);
    const Eigen::VectorXd s = svd.singularValues();
    REQUIRE(s.size() >= static_cast<Eigen::Index>(sv.size()));
    for (std::size_t k = 0; k < sv.size(); ++k) CHECK(std::abs(sv[k] - s[k]) <= 1e-9 * s[0]);
    CHECK(L.kernel_dimension() == 6);
}

TEST_CASE("linear solve recovers a manufactured field")
{
    const SphereGrid g(16, 32);
    const AxisymEmbedding e = embed_axisym(conformal_p2(0.1), WarpSpec::euclidean(), g);
    const LinearizedOperator L(map_of(e, g), WarpSpec::euclidean());
    const Fields3 truth = L.project(smooth_field(g, 0.9));
    const Fields3 q = L.apply(truth);
    const LinearizedOperator::Solution sol = L.solve(q);
    CHECK(sol.kernel == 6);
    CHECK(sol.residual < 1e-10 * sup3(q));
    Fields3 diff = sol.tau;
    for (int c = 0; c < 3; ++c)
        for (std::size_t k = 0; k < diff[c].size(); ++k) diff[c][k] -= truth[c][k];
    CHECK(sup3(L.apply(diff)) < 1e-10 * sup3(q));
    CHECK(dot(sol.tau, sol.tau) <= dot(truth, truth) * (1.0 + 1e-12));
    // the minimal-norm solution has no rigid component
    for (const Fields3& r : rigid_fields(map_of(e, g), true))
        CHECK(std::abs(dot(sol.tau, L.project(r))) < 1e-8 * std::sqrt(dot(sol.tau, sol.tau) * dot(r, r)));

    const LinearizedOperator::Solution zero = L.solve({Field(g.size(), 0.0), Field(g.size(), 0.0), Field(g.size(), 0.0)});
    CHECK(sup3(zero.tau) == 0.0);
}

TEST_CASE("map conversions")
{
    const SphereGrid g(32, 64);
    const EmbeddingMap s = coordinate_sphere_map(g, 1.5);
    const Metric2S m = map_metric(s, WarpSpec::euclidean());
    for (int k = 0; k < g.size(); ++k) {
        CHECK(m.a()[k] == doctest::Approx(2.25).epsilon(1e-12));
        CHECK(m.c()[k] == doctest::Approx(2.25).epsilon(1e-12));
    }
    const auto [k1, k2] = map_principal_curvatures(s, WarpSpec::hyperbolic());
    for (int k = 0; k < g.size(); ++k) CHECK(k2[k] == doctest::Approx(1.0 / std::tanh(1.5)).epsilon(1e-6));

    const AxisymEmbedding e = embed_axisym(conformal_p2(0.1), WarpSpec::euclidean(), g);
    const RadialGraph gr = map_graph(map_of(e, g), WarpSpec::euclidean());
    for (int i = 0; i < g.n_psi; ++i) CHECK(gr.rho()[g.idx(i, 3)] == doctest::Approx(e.x_of_psi(g.psi(i))).epsilon(1e-6));
}

TEST_CASE("continuity method reaches a round target")
{
    const SphereGrid g(16, 32);
    const EmbeddingState st = continuity_solve(Metric2S::round(g), WarpSpec::euclidean());
    CHECK(st.t == 1.0);
    CHECK(st.residual < 1e-8);
    CHECK(st.kernel == 6);
    for (const TraceEntry& t : st.trace) CHECK(t.newton <= 3);
    std::vector<std::array<double, 3>> ref(g.size());
    const EmbeddingMap unit = coordinate_sphere_map(g, 1.0);
    for (int k = 0; k < g.size(); ++k) ref[k] = {unit.y[0][k], unit.y[1][k], unit.y[2][k]};
    CHECK(aligned_distance(st.map, ref) < 1e-8);
}

TEST_CASE("continuity method matches the axisymmetric embedder")
{
    const SphereGrid g(32, 64);
    const Metric2S target = Metric2S::conformal_round(g, conformal_field(g, [](double p, double) { return p2_u(0.05, p); }));
    const EmbeddingState st = continuity_solve(target, WarpSpec::euclidean());
    CHECK(st.residual < 1e-6);
    const AxisymEmbedding e = embed_axisym(conformal_p2(0.05), WarpSpec::euclidean(), g);
    CHECK(aligned_distance(st.map, axisym_points(e, g)) < 1e-5);

    // curvature monitor against the envelope over the accepted iterates
    const RadialGraph last = map_graph(st.map, WarpSpec::euclidean());
    const BoundCertificate c = bound_certificate({last});
    CHECK(st.trace.back().max_kappa <= c.envelope(c.drive) * (1.0 + 1e-4));
    CHECK(st.trace.back().max_kappa >= c.envelope(c.drive) * (1.0 - 1e-4));

    const EmbeddingState again = continuity_solve(target, WarpSpec::euclidean());
    REQUIRE(again.trace.size() == st.trace.size());
    for (std::size_t k = 0; k < st.trace.size(); ++k) {
        CHECK(again.trace[k].t == st.trace[k].t);
        CHECK(again.trace[k].residual == st.trace[k].residual);
        CHECK(again.trace[k].newton == st.trace[k].newton);
    }
}

TEST_CASE("continuity method errors")
{
    const SphereGrid g(16, 32);
    const Metric2S bad = Metric2S::conformal_round(g, conformal_field(g, [](double p, double) { return p2_u(0.5, p); }));
    CHECK_THROWS_AS(continuity_solve(bad, WarpSpec::euclidean()), HypothesisError);
    CHECK_THROWS_AS(continuity_solve(Metric2S::round(g, 3.0), preset("schwarzschild-m1")), UnsupportedError);
}
