#pragma once

#include "weyl/surface.hpp"

#include <functional>
#include <string>
#include <vector>

namespace weyl {

// Canonical test surfaces: rho = base * shape(psi, theta), where base is 1 in
// space forms and three times the horizon coordinate in eta-form warps.
struct SurfaceFixture {
    std::string name;
    std::function<double(double, double)> shape;
    bool slice = false;
};

const std::vector<SurfaceFixture>& surface_fixtures();
const SurfaceFixture& surface_fixture(const std::string& name);
double fixture_base(const WarpSpec& spec);
RadialGraph fixture_graph(const std::string& name, const WarpSpec& spec, const SphereGrid& grid);

// Convex axisymmetric graphs rho = r0 (1 + eps P2(cos psi)) in hyperbolic
// space: 12 fitting members with r0 in [0.5, 2], or 4 held-out members with r0
// between them.
std::vector<RadialGraph> hyperbolic_family(const SphereGrid& grid, bool held_out = false);

// Legendre polynomials P2, P3 in cos psi.
double legendre_p2(double z);
double legendre_p3(double z);

} // namespace weyl
