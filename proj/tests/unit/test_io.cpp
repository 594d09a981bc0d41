#include "doctest.h"
#include "weyl/errors.hpp"
#include "weyl/fixtures.hpp"
#include "weyl/io.hpp"

#include <cmath>
#include <numbers>

using namespace weyl;
using io::json;

TEST_CASE("shortest round-trip formatting")
{
    for (double v : {0.1, 1.0 / 3.0, 2.0, -1e-300, 5.857864376269049e-1, 1e22}) {
        const std::string s = io::format_double(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(2.0) == "2");
}

TEST_CASE("manifold descriptors")
{
    const WarpSpec a = io::manifold_from_json(json::parse(R"({"family": "ads-schwarzschild", "n": 2, "m": 1.0, "kappa": -1.0})"));
    CHECK(a.eta_form());
    CHECK(a.m() == 1.0);
    CHECK(a.kappa_cosmo() == -1.0);
    const WarpSpec c = io::manifold_from_json(json::parse(R"({"family": "custom", "phi_table": {"r": [0, 0.5, 1, 1.5, 2], "phi": [0, 0.5, 1, 1.5, 2]}})"));
    CHECK(c.sample(1.2).phi == doctest::Approx(1.2).epsilon(1e-12));
    for (const auto& p : preset_names()) {
        const WarpSpec w = io::manifold_from_json(io::manifold_to_json(preset(p)));
        CHECK(io::manifold_to_json(w) == io::manifold_to_json(preset(p)));
    }
    CHECK_THROWS_AS(io::manifold_from_json(json::parse(R"({"family": "flat"})")), ConfigError);
    CHECK_THROWS_AS(io::manifold_from_json(json::parse(R"({"family": "schwarzschild"})")), ConfigError);
    CHECK_THROWS_AS(io::load_manifold("/nonexistent/manifold.json"), ConfigError);
}

TEST_CASE("surface JSON")
{
    const SphereGrid g(16, 32);
    const WarpSpec w = WarpSpec::euclidean();
    const RadialGraph f = fixture_graph("mixed", w, g);
    const RadialGraph back = io::surface_from_json(io::surface_to_json(f), w, SphereGrid(8, 16));
    CHECK(back.rho() == f.rho());
    CHECK(back.grid().n_psi == 16);

    json ax{{"rho_axisym", {{"psi", json::array()}, {"rho", json::array()}}}};
    for (int k = 0; k <= 200; ++k) {
        const double p = std::numbers::pi * k / 200.0;
        ax["rho_axisym"]["psi"].push_back(p);
        ax["rho_axisym"]["rho"].push_back(1.0 + 0.1 * std::cos(p) * std::cos(p));
    }
    const RadialGraph r = io::surface_from_json(ax, w, g);
    for (int i = 0; i < g.n_psi; ++i)
        CHECK(r.rho()[g.idx(i, 5)] == doctest::Approx(1.0 + 0.1 * std::pow(std::cos(g.psi(i)), 2)).epsilon(1e-6));
    CHECK_THROWS_AS(io::surface_from_json(json::parse(R"({"grid": {"n_psi": 8, "n_theta": 16}, "rho": [1, 2]})"), w, g),
                    ConfigError);
}

TEST_CASE("metric JSON")
{
    const SphereGrid g(16, 32);
    const Metric2S m = io::metric_from_json(json::parse(R"({"conformal_round": {"u_coeffs": [0.1, 0, 0.05]}})"), g);
    REQUIRE(m.conformal_factor());
    for (int i = 0; i < g.n_psi; ++i)
        CHECK((*m.conformal_factor())[g.idx(i, 0)]
              == doctest::Approx(0.1 + 0.05 * legendre_p2(std::cos(g.psi(i)))).epsilon(1e-14));
    const Metric2S back = io::metric_from_json(io::metric_to_json(m), g);
    for (int k = 0; k < g.size(); ++k) CHECK(back.a()[k] == doctest::Approx(m.a()[k]).epsilon(1e-13));

    const AxisymMetric ax = io::axisym_metric_from_json(json::parse(R"({"conformal_round": {"u_coeffs": [0, 0, 0.05]}})"), g);
    const double p = 0.7, u = 0.05 * legendre_p2(std::cos(p));
    CHECK(ax(p).alpha == doctest::Approx(std::exp(u) * std::sin(p)).epsilon(1e-14));
}

TEST_CASE("run configuration")
{
    const io::RunConfig c = io::run_config_from_json(
        json::parse(R"({"manifold": "hyperbolic", "resolution": [32, 64], "seed": 3, "tolerances": {"master_identity": 1e-7}})"));
    CHECK(c.grid().n_psi == 32);
    CHECK(c.seed == 3);
    CHECK(c.tolerance("master_identity", 1.0) == 1e-7);
    CHECK(c.tolerance("other", 1.0) == 1.0);
    CHECK_THROWS_AS(io::run_config_from_json(json::parse(R"({"resolution": [4, 64]})")), ConfigError);
    CHECK_THROWS_AS(io::run_config_from_json(json::parse(R"({"resolution": [32, 4096]})")), ConfigError);
    CHECK_THROWS_AS(io::run_config_from_json(json::parse(R"({"tolerances": {"x": -1}})")), ConfigError);
}
