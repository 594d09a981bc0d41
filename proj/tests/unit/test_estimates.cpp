#include "doctest.h"
#include "weyl/errors.hpp"
#include "weyl/estimates.hpp"
#include "weyl/fixtures.hpp"

#include <cmath>
#include <numbers>

using namespace weyl;

namespace {

double mixed_defect(int n)
{
    const SphereGrid g(n, 2 * n);
    const WarpSpec w = WarpSpec::euclidean();
    return master_identity_defect(shape_of(fixture_graph("mixed", w, g)), w);
}

double region_threshold(const WarpSpec& w, double lo, double hi)
{
    double best = -1e300;
    for (int k = 0; k <= 400; ++k) {
        const AmbientCurvature c = curvature_at(w, lo + (hi - lo) * k / 400.0);
        best = std::max(best, c.Rbar - 2.0 * c.min_ricci());
    }
    return best;
}

} // namespace

TEST_CASE("prescribed f on slices")
{
    const SphereGrid g(16, 32);
    const ShapeData s = shape_of(make_graph(g, WarpSpec::euclidean(), [](double, double) { return 2.0; }));
    const Field f = prescribed_f(s, WarpSpec::euclidean());
    for (double v : f) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));

    const WarpSpec h = WarpSpec::hyperbolic();
    const ShapeData sh = shape_of(make_graph(g, h, [](double, double) { return 1.0; }));
    const Field fh = prescribed_f(sh, h);
    const double s2 = slice_shape(h, 1.0).sigma2_slice;
    for (double v : fh) CHECK(v == doctest::Approx(s2).epsilon(1e-12));
}

TEST_CASE("master identity converges at second order or better")
{
    const double e32 = mixed_defect(32), e64 = mixed_defect(64);
    CHECK(e64 < 1e-6);
    CHECK(e32 / e64 > 3.5);
}

TEST_CASE("master identity on every fixture and preset")
{
    const SphereGrid g(64, 128);
    for (const auto& name : preset_names()) {
        const WarpSpec w = preset(name);
        for (const auto& f : surface_fixtures()) {
            const ShapeData s = shape_of(fixture_graph(f.name, w, g));
            CAPTURE(name);
            CAPTURE(f.name);
            CHECK(master_identity_defect(s, w) < 1e-6);
        }
    }
}

TEST_CASE("ellipticity thresholds reduce to the closed forms")
{
    CHECK(std::abs(ellipticity_threshold(WarpSpec::euclidean(), {0.5, 3.0})) <= 1e-12);
    CHECK(std::abs(ellipticity_threshold(WarpSpec::hyperbolic(), {0.5, 3.0}) + 2.0) <= 1e-12);
    const WarpSpec sp = WarpSpec::spherical();
    CHECK(ellipticity_threshold(sp, {0.2, 1.2}) == doctest::Approx(region_threshold(sp, 0.2, 1.2)).epsilon(1e-12));

    const WarpSpec sch = preset("schwarzschild-m1");
    const double need = region_threshold(sch, 1.5, 3.0);
    CHECK(need == doctest::Approx(2.0 / (1.5 * 1.5 * 1.5)).epsilon(1e-12));
    const SphereGrid g(16, 32);
    const EllipticityReport r = ellipticity_check(Metric2S::round(g), sch, {1.5, 3.0});
    CHECK(r.holds);
    CHECK(r.min_R == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(r.margin == doctest::Approx(2.0 - need).epsilon(1e-9));

    const EllipticityReport e = ellipticity_check(Metric2S::round(g, 2.0), WarpSpec::euclidean(), {0.5, 3.0});
    CHECK(e.holds);
    CHECK_THROWS_AS(ellipticity_check(Metric2S::round(g), sch, {0.5, 3.0}), DomainError);
}

TEST_CASE("ellipticity fails for negative curvature in flat space")
{
    const SphereGrid g(32, 64);
    Field u(g.size());
    for (int i = 0; i < g.n_psi; ++i)
        for (int j = 0; j < g.n_theta; ++j) u[g.idx(i, j)] = 0.5 * legendre_p2(std::cos(g.psi(i)));
    const EllipticityReport r = ellipticity_check(Metric2S::conformal_round(g, u), WarpSpec::euclidean(), {0.5, 2.0});
    CHECK(r.min_R < 0.0);
    CHECK_FALSE(r.holds);
    CHECK(r.margin == doctest::Approx(r.min_R - r.rhs_sup));
}

TEST_CASE("warp potential Hessian identity")
{
    for (const char* name : {"euclidean", "hyperbolic", "spherical"}) {
        const WarpSpec w = preset(name);
        const SphereGrid g(16, 32);
        CHECK(sup_norm(warp_hessian_residual(make_graph(g, w, [](double, double) { return 0.8; }))) < 1e-12);
        double prev = 0.0;
        for (int n : {32, 64}) {
            const SphereGrid gg(n, 2 * n);
            const double r = sup_norm(warp_hessian_residual(fixture_graph("offset", w, gg)));
            if (prev > 0.0) CHECK(prev / r > 3.5);
            prev = r;
        }
    }
}

TEST_CASE("cond_phi fit")
{
    const SphereGrid g(16, 32);
    const RadialGraph sphere = make_graph(g, WarpSpec::euclidean(), [](double, double) { return 2.0; });
    const CondPhiFit fit = cond_phi_fit(sphere, warp_potential_samples(sphere));
    CHECK(fit.feasible);
    CHECK(fit.C1 == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(fit.C2 == doctest::Approx(2.0).epsilon(1e-12));

    const RadialGraph p2 = fixture_graph("p2", WarpSpec::hyperbolic(), SphereGrid(32, 64));
    const CondPhiFit fh = cond_phi_fit(p2, warp_potential_samples(p2));
    CHECK(fh.feasible);
    const ShapeData s = shape_of(p2);
    double inf_dphi = 1e300;
    for (double v : s.dphi) inf_dphi = std::min(inf_dphi, v);
    CHECK(fh.C1 >= inf_dphi * (1.0 - 1e-6));

    const CondPhiFit zero = cond_phi_fit(sphere, Field(g.size(), 0.0));
    CHECK_FALSE(zero.feasible);

    const RadialGraph small = fixture_graph("prolate", WarpSpec::spherical(), SphereGrid(32, 64));
    CHECK(cond_phi_fit(small, distance_squared_samples(small)).feasible);
}

TEST_CASE("bound certificate")
{
    const SphereGrid g(16, 32);
    const WarpSpec w = WarpSpec::euclidean();
    const RadialGraph one = make_graph(g, w, [](double, double) { return 2.0; });
    const BoundCertificate c1 = bound_certificate({one});
    CHECK(c1.fitted_A2 == 0.0);
    CHECK(c1.fitted_A1 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(c1.covers(c1.drive, c1.sup_kappa));

    std::vector<RadialGraph> fam;
    for (double r : {0.5, 1.0, 2.0, 4.0}) fam.push_back(make_graph(g, w, [r](double, double) { return r; }));
    const BoundCertificate c = bound_certificate(fam);
    REQUIRE(c.per_surface.size() == 4);
    for (int k = 0; k < 4; ++k) CHECK(c.per_surface[k].second == doctest::Approx(1.0 / fam[k].rho()[0]).epsilon(1e-13));
    for (const auto& [d, k] : c.per_surface) CHECK(c.covers(d, k));
    CHECK(c.sup_kappa == doctest::Approx(2.0).epsilon(1e-13));

    // serial and parallel evaluation agree exactly
    const BoundCertificate cs = bound_certificate(fam, Exec::serial);
    CHECK(cs.fitted_A1 == c.fitted_A1);
    CHECK(cs.fitted_A2 == c.fitted_A2);
}

TEST_CASE("bound certificate rejects negative extrinsic scalar curvature")
{
    const SphereGrid g(32, 64);
    const WarpSpec w = WarpSpec::euclidean();
    const RadialGraph ok = make_graph(g, w, [](double, double) { return 1.0; });
    const RadialGraph bad = make_graph(g, w, [](double p, double t) {
        return 1.0 + 0.3 * std::pow(std::sin(p), 4) * std::cos(4.0 * t);
    });
    CHECK(sup_norm(shape_of(bad).sigma2) > 0.0);
    try {
        bound_certificate({ok, bad});
        FAIL("expected HypothesisError");
    } catch (const HypothesisError& e) {
        CHECK(std::string(e.what()).find("surface 1") != std::string::npos);
    }
}

TEST_CASE("fit_envelope is an upper envelope with minimal slope")
{
    std::vector<CertificateMember> ms;
    for (int k = 0; k < 6; ++k) ms.push_back({0.5 * k, 1.0 + 0.3 * k * k, 0.0, 0.0});
    const BoundCertificate c = fit_envelope(ms);
    for (const auto& m : ms) CHECK(m.sup_kappa <= c.envelope(m.drive) * (1.0 + 1e-12));
    CHECK(c.fitted_A2 == 0.0);
    CHECK(c.fitted_A1 == doctest::Approx(1.0 + 0.3 * 25).epsilon(1e-15));
}

TEST_CASE("horizon obstruction on Schwarzschild slices")
{
    const WarpSpec w = preset("schwarzschild-m1");
    const SphereGrid g(32, 64);
    for (double s : {1.1, 1.5, 2.0, 5.0}) {
        const HorizonObstruction h = horizon_obstruction(make_graph(g, w, [s](double, double) { return s; }));
        CAPTURE(s);
        CHECK(h.R_at_min == doctest::Approx(2.0 / (s * s)).epsilon(1e-8));
        CHECK(h.gauss_cap == doctest::Approx(2.0 / (s * s)).epsilon(1e-12));
        CHECK(h.contradiction);
    }
    const HorizonObstruction p = horizon_obstruction(fixture_graph("offset", w, g));
    CHECK(p.contradiction);
    CHECK(p.R_at_min <= p.gauss_cap * (1.0 + 1e-6));
    CHECK_THROWS_AS(horizon_obstruction(make_graph(g, WarpSpec::euclidean(), [](double, double) { return 1.0; })),
                    UnsupportedError);
}

TEST_CASE("Laplacian of f ratio")
{
    const WarpSpec w = WarpSpec::euclidean();
    const ShapeData s = shape_of(make_graph(SphereGrid(16, 32), w, [](double, double) { return 1.5; }));
    CHECK(laplacian_f_check(s, w).ratio_sup < 1e-10);

    for (const char* name : {"euclidean", "spherical"}) {
        const WarpSpec a = preset(name);
        std::vector<double> r;
        for (int n : {32, 64, 128}) r.push_back(laplacian_f_check(shape_of(fixture_graph("mixed", a, SphereGrid(n, 2 * n))), a).ratio_sup);
        CAPTURE(name);
        CHECK(std::isfinite(r[2]));
        CHECK(std::abs(r[1] - r[0]) < 0.1 * r[0]);
        CHECK(std::abs(r[2] - r[1]) < 0.1 * r[1]);
    }
}

TEST_CASE("Brown-York mass on Schwarzschild slices")
{
    const SphereGrid g(16, 32);
    for (double s : {2.0, 10.0, 1000.0}) {
        const double eta = std::sqrt(1.0 - 1.0 / s);
        const double m = brown_york_mass(Metric2S::round(g, s), Field(g.size(), 2.0 * eta / s), Field(g.size(), 2.0 / s));
        CHECK(m == doctest::Approx(s * (1.0 - eta)).epsilon(1e-12));
    }
    const double big = brown_york_mass(Metric2S::round(g, 1000.0), Field(g.size(), 2.0 * std::sqrt(1.0 - 1e-3) / 1000.0),
                                       Field(g.size(), 2e-3));
    CHECK(std::abs(big - 0.5) < 1e-3);
    CHECK(brown_york_mass(Metric2S::round(g), Field(g.size(), 2.0), Field(g.size(), 2.0)) == 0.0);
}

TEST_CASE("Brown-York mass errors")
{
    const SphereGrid g(16, 32);
    CHECK_THROWS_AS(brown_york_mass(Metric2S::round(g), Field(10, 0.0), Field(g.size(), 0.0)), ConfigError);
    Field u(g.size());
    for (int i = 0; i < g.n_psi; ++i)
        for (int j = 0; j < g.n_theta; ++j) u[g.idx(i, j)] = 0.5 * legendre_p2(std::cos(g.psi(i)));
    CHECK_THROWS_AS(brown_york_mass(Metric2S::conformal_round(g, u), Field(g.size(), 1.0), Field(g.size(), 1.0)),
                    EmbeddingError);
}
