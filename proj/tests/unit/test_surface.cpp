#include "doctest.h"
#include "weyl/errors.hpp"
#include "weyl/surface.hpp"

#include <cmath>

using namespace weyl;

namespace {

double general_rho(double p, double t)
{
    const double x = std::sin(p) * std::cos(t), y = std::sin(p) * std::sin(t), z = std::cos(p);
    return 1.0 + 0.08 * x + 0.05 * z * z * z + 0.06 * x * y;
}

} // namespace

TEST_CASE("round sphere in euclidean space")
{
    const SphereGrid g(16, 32);
    const ShapeData s = shape_of(make_graph(g, WarpSpec::euclidean(), [](double, double) { return 2.0; }));
    for (int k = 0; k < g.size(); ++k) {
        CHECK(s.kappa1[k] == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(s.kappa2[k] == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(s.H[k] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(s.sigma2[k] == doctest::Approx(0.25).epsilon(1e-15));
        CHECK(s.R_intrinsic[k] == doctest::Approx(0.5).epsilon(1e-13));
    }
}

TEST_CASE("coordinate spheres match the slice shape in every preset")
{
    const SphereGrid g(16, 32);
    for (const auto& name : preset_names()) {
        const WarpSpec w = preset(name);
        const double x = w.eta_form() ? 3.0 * w.x0() : 1.0;
        const ShapeData s = shape_of(make_graph(g, w, [&](double, double) { return x; }));
        const SliceShape sl = slice_shape(w, x);
        for (int k = 0; k < g.size(); ++k) {
            CHECK(s.H[k] == doctest::Approx(sl.H_slice).epsilon(1e-14));
            CHECK(s.sigma2[k] == doctest::Approx(sl.sigma2_slice).epsilon(1e-14));
            CHECK(s.h12[k] == 0.0);
        }
        CHECK(sup_norm(gauss_residual(s, w)) < 1e-12);
        CHECK(sup_norm(codazzi_residual(s, w)) < 1e-12);
    }
}

TEST_CASE("axisymmetric graph against the parametric-surface oracle")
{
    // values from tests/oracles/surface_oracle.py
    const SphereGrid g(64, 128);
    const ShapeData s = shape_of(make_graph(g, WarpSpec::euclidean(), [](double p, double) {
        return 2.0 + 0.3 * std::cos(p) * std::cos(p);
    }));
    const double k1[3] = {5.48176588926555826e-1, 5.37016803563905561e-1, 5.00031616969491895e-1};
    const double k2[3] = {5.48121439995851294e-1, 5.12884411296304156e-1, 3.50188287572402546e-1};
    const int rows[3] = {0, 10, 32};
    for (int r = 0; r < 3; ++r)
        for (int j : {0, 17, 64}) {
            const int k = g.idx(rows[r], j);
            CHECK(s.kappa1[k] == doctest::Approx(k1[r]).epsilon(1e-8));
            CHECK(s.kappa2[k] == doctest::Approx(k2[r]).epsilon(1e-8));
        }
}

TEST_CASE("general graph against the parametric-surface oracle")
{
    const SphereGrid g(64, 128);
    const ShapeData s = shape_of(make_graph(g, WarpSpec::euclidean(), general_rho));
    const int nodes[3][2] = {{0, 0}, {13, 40}, {40, 77}};
    const double H[3] = {2.17410337875649747, 1.97583106416677315, 2.19554565415858120};
    const double s2[3] = {1.17877831145109369, 9.74024222445669639e-1, 1.20478413472954586};
    for (int q = 0; q < 3; ++q) {
        const int k = g.idx(nodes[q][0], nodes[q][1]);
        CHECK(s.H[k] == doctest::Approx(H[q]).epsilon(1e-8));
        CHECK(s.sigma2[k] == doctest::Approx(s2[q]).epsilon(1e-8));
    }
}

TEST_CASE("induced metric examples")
{
    const SphereGrid g(16, 32);
    const Metric2S m = induced_metric(make_graph(g, WarpSpec::euclidean(), [](double, double) { return 3.0; }));
    const Field G = m.G();
    for (int i = 0; i < g.n_psi; ++i) {
        const int k = g.idx(i, 5);
        CHECK(m.E()[k] == doctest::Approx(9.0));
        CHECK(m.F()[k] == 0.0);
        CHECK(G[k] == doctest::Approx(9.0 * std::pow(std::sin(g.psi(i)), 2)));
    }
    const WarpSpec h = WarpSpec::hyperbolic();
    const Metric2S mh = induced_metric(make_graph(g, h, [](double, double) { return 0.8; }));
    CHECK(mh.a()[7] == doctest::Approx(std::pow(std::sinh(0.8), 2)).epsilon(1e-15));
    // axisymmetric rho(psi) = 2 + 0.3 cos^2 psi: E = rho'^2 + rho^2
    const SphereGrid g2(64, 128);
    const Metric2S ma = induced_metric(make_graph(g2, WarpSpec::euclidean(), [](double p, double) {
        return 2.0 + 0.3 * std::cos(p) * std::cos(p);
    }));
    for (int i : {3, 20, 50}) {
        const double p = g2.psi(i), r = 2.0 + 0.3 * std::cos(p) * std::cos(p), dr = -0.3 * std::sin(2 * p);
        CHECK(ma.E()[g2.idx(i, 9)] == doctest::Approx(dr * dr + r * r).epsilon(1e-8));
        CHECK(std::abs(ma.F()[g2.idx(i, 9)]) < 1e-12);
    }
}

TEST_CASE("intrinsic curvature")
{
    const SphereGrid g(64, 128);
    CHECK(sup_norm(intrinsic_curvature(Metric2S::round(g))) == doctest::Approx(2.0).epsilon(1e-13));
    const Field R2 = intrinsic_curvature(Metric2S::round(g, 2.0));
    for (double r : R2) CHECK(r == doctest::Approx(0.5).epsilon(1e-13));
    // conformal factor u = 0.1 cos psi: K = e^{-2u} (1 - Lap u), Lap cos = -2 cos
    const Field u = sample(g, [](double p, double) { return 0.1 * std::cos(p); });
    const Metric2S m = Metric2S::conformal_round(g, u);
    const Field R = intrinsic_curvature(m);
    double err = 0.0;
    Field K(g.size());
    for (int i = 0; i < g.n_psi; ++i)
        for (int j = 0; j < g.n_theta; ++j) {
            const int k = g.idx(i, j);
            const double c = std::cos(g.psi(i));
            err = std::max(err, std::abs(0.5 * R[k] - std::exp(-0.2 * c) * (1.0 + 0.2 * c)));
            K[k] = 0.5 * R[k];
        }
    CHECK(err < 1e-8);
    const double gb = Quadrature(g).integrate(K, m.area_density());
    CHECK(std::abs(gb / (4 * M_PI) - 1.0) < 1e-6);
}

TEST_CASE("metric validation")
{
    const SphereGrid g(8, 16);
    Field a(g.size(), 1.0), b(g.size(), 0.0), c(g.size(), 1.0);
    b[5] = 2.0;
    CHECK_THROWS_AS(Metric2S(g, a, b, c, Provenance::analytic), GeometryError);
    CHECK_THROWS_AS(make_graph(g, preset("schwarzschild-m1"), [](double, double) { return 0.9; }), DomainError);
    CHECK(Metric2S::round(g).pole_defect() < 1e-14);
}

TEST_CASE("commutator scope")
{
    const SphereGrid g(16, 32);
    const WarpSpec w = preset("schwarzschild-m1");
    const ShapeData s = shape_of(make_graph(g, w, [](double, double) { return 3.0; }));
    CHECK_THROWS_AS(commutator_residual(s, w), UnsupportedError);
}

TEST_CASE("property: eigen-consistency, orientation flip and serial reference")
{
    const SphereGrid g(32, 64);
    for (const char* name : {"euclidean", "hyperbolic", "schwarzschild-m1"}) {
        const WarpSpec w = preset(name);
        const double base = w.eta_form() ? 3.0 : 1.0;
        const RadialGraph graph = make_graph(g, w, [&](double p, double t) { return base * general_rho(p, t); });
        const ShapeData s = shape_of(graph, Exec::parallel);
        const ShapeData r = shape_of(graph, Exec::serial);
        CHECK(s.sigma2 == r.sigma2);
        CHECK(s.R_intrinsic == r.R_intrinsic);
        for (int k = 0; k < g.size(); ++k) {
            const double detg = s.g11[k] * s.g22[k] - s.g12[k] * s.g12[k];
            const double tr = (s.g22[k] * s.h11[k] - 2 * s.g12[k] * s.h12[k] + s.g11[k] * s.h22[k]) / detg;
            const double det = (s.h11[k] * s.h22[k] - s.h12[k] * s.h12[k]) / detg;
            CHECK(s.kappa1[k] + s.kappa2[k] == doctest::Approx(tr).epsilon(1e-12));
            CHECK(s.kappa1[k] * s.kappa2[k] == doctest::Approx(det).epsilon(1e-12));
        }
        const ShapeData f = s.flipped();
        for (int k = 0; k < g.size(); ++k) {
            CHECK(f.H[k] == -s.H[k]);
            CHECK(f.sigma2[k] == s.sigma2[k]);
        }
    }
}

TEST_CASE("property: |kappa1 kappa2| bounded by the curvature gap where H > 1")
{
    const SphereGrid g(32, 64);
    for (const char* name : {"euclidean", "hyperbolic", "spherical"}) {
        const WarpSpec w = preset(name);
        const ShapeData s = shape_of(make_graph(g, w, general_rho));
        const Field ric = ambient_ric_nu(s, w);
        double gap = 0.0;
        for (int k = 0; k < g.size(); ++k) {
            const AmbientCurvature c = curvature_at(w, s.rho[k]);
            gap = std::max(gap, std::abs(0.5 * s.R_intrinsic[k] - (0.5 * c.Rbar - ric[k])));
        }
        // equality holds pointwise up to the discrete Gauss residual
        const double slack = sup_norm(gauss_residual(s, w));
        for (int k = 0; k < g.size(); ++k)
            if (s.H[k] > 1.0) CHECK(std::abs(s.kappa1[k] * s.kappa2[k]) <= gap + slack);
    }
}

TEST_CASE("property: residuals converge under refinement")
{
    for (const char* name : {"euclidean", "hyperbolic", "spherical", "schwarzschild-m1"}) {
        const WarpSpec w = preset(name);
        const double base = w.eta_form() ? 3.0 : 1.0;
        double prev[3] = {0, 0, 0};
        for (int n : {16, 32, 64}) {
            const SphereGrid g(n, 2 * n);
            const ShapeData s = shape_of(make_graph(g, w, [&](double p, double t) { return base * general_rho(p, t); }));
            const double e[3] = {sup_norm(gauss_residual(s, w)), sup_norm(codazzi_residual(s, w)),
                                 w.space_form() ? sup_norm(commutator_residual(s, w)) : 0.0};
            if (prev[0] > 0) {
                CHECK(prev[0] / e[0] > 4.0);
                CHECK(prev[1] / e[1] > 4.0);
                if (w.space_form()) CHECK(prev[2] / e[2] > 4.0);
            }
            std::copy(e, e + 3, prev);
        }
    }
}
