#include "weyl/fixtures.hpp"

#include "weyl/errors.hpp"

#include <cmath>

namespace weyl {

double legendre_p2(double z) { return 0.5 * (3.0 * z * z - 1.0); }
double legendre_p3(double z) { return 0.5 * (5.0 * z * z * z - 3.0 * z); }

namespace {

struct Cart {
    double x, y, z;
};

Cart cart(double p, double t) { return {std::sin(p) * std::cos(t), std::sin(p) * std::sin(t), std::cos(p)}; }

std::vector<SurfaceFixture> build()
{
    std::vector<SurfaceFixture> f;
    f.push_back({"sphere", [](double, double) { return 1.0; }, true});
    f.push_back({"prolate", [](double p, double) { return 1.0 + 0.15 * std::cos(p) * std::cos(p); }, false});
    f.push_back({"p2", [](double p, double) { return 1.0 + 0.1 * legendre_p2(std::cos(p)); }, false});
    f.push_back({"lobe2",
                 [](double p, double t) { return 1.0 + 0.1 * std::sin(p) * std::sin(p) * std::cos(2.0 * t); }, false});
    f.push_back({"offset",
                 [](double p, double t) {
                     return 1.0 + 0.08 * std::sin(p) * std::cos(t) + 0.05 * std::pow(std::cos(p), 3);
                 },
                 false});
    f.push_back({"mixed",
                 [](double p, double t) {
                     const Cart c = cart(p, t);
                     return 1.0 + 0.08 * c.x + 0.05 * c.z * c.z * c.z + 0.06 * c.x * c.y;
                 },
                 false});
    f.push_back({"saddle",
                 [](double p, double t) {
                     const Cart c = cart(p, t);
                     return 1.0 + 0.05 * (c.x * c.x - c.y * c.y) + 0.04 * c.y * c.z;
                 },
                 false});
    return f;
}

} // namespace

const std::vector<SurfaceFixture>& surface_fixtures()
{
    static const std::vector<SurfaceFixture> all = build();
    return all;
}

const SurfaceFixture& surface_fixture(const std::string& name)
{
    for (const auto& f : surface_fixtures())
        if (f.name == name) return f;
    throw ConfigError("unknown fixture '" + name + "'");
}

double fixture_base(const WarpSpec& spec) { return spec.eta_form() ? 3.0 * spec.x0() : 1.0; }

RadialGraph fixture_graph(const std::string& name, const WarpSpec& spec, const SphereGrid& grid)
{
    const SurfaceFixture& f = surface_fixture(name);
    const double base = fixture_base(spec);
    return make_graph(grid, spec, [&](double p, double t) { return base * f.shape(p, t); });
}

std::vector<RadialGraph> hyperbolic_family(const SphereGrid& grid, bool held_out)
{
    const WarpSpec w = WarpSpec::hyperbolic();
    const double step = 1.5 / 11.0;
    std::vector<RadialGraph> out;
    const int count = held_out ? 4 : 12;
    for (int k = 0; k < count; ++k) {
        const double r0 = held_out ? 0.5 + (3.0 * k + 1.5) * step : 0.5 + k * step;
        const double eps = held_out ? 0.05 : 0.02 + 0.06 * ((5 * k) % 12) / 11.0;
        out.push_back(make_graph(grid, w, [=](double p, double) { return r0 * (1.0 + eps * legendre_p2(std::cos(p))); }));
    }
    return out;
}

} // namespace weyl
