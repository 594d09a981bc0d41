#pragma once

#include "weyl/embed.hpp"

#include "json.hpp"

#include <map>
#include <optional>
#include <string>

namespace weyl::io {

using json = nlohmann::json;

// Shortest decimal string that reads back to the same double.
std::string format_double(double v);

json read_json(const std::string& path);
void write_text(const std::string& path, const std::string& text);
// Two-space indented, keys sorted, trailing newline.
std::string dump(const json& j);

// {"family": "ads-schwarzschild", "n": 2, "m": 1.0, "kappa": -1.0},
// {"family": "custom", "phi_table": {"r": [...], "phi": [...]}} or
// {"family": "custom", "eta_table": {"s": [...], "eta": [...]}}.
WarpSpec manifold_from_json(const json& j);
json manifold_to_json(const WarpSpec& spec);
// A preset name or a descriptor file.
WarpSpec load_manifold(const std::string& name_or_path);

// {"grid": {"n_psi", "n_theta"}, "rho": [...]} with rho flat (psi-major) or one
// row per psi, or {"rho_axisym": {"psi": [...], "rho": [...]}} resampled onto
// the fallback grid.
RadialGraph surface_from_json(const json& j, const WarpSpec& spec, const SphereGrid& fallback);
json surface_to_json(const RadialGraph& graph);

// {"grid", "E", "F", "G"} or {"conformal_round": {"u_coeffs": [c0, c1, ...]}},
// u = sum c_l P_l(cos psi).
Metric2S metric_from_json(const json& j, const SphereGrid& fallback);
json metric_to_json(const Metric2S& metric);
AxisymMetric axisym_metric_from_json(const json& j, const SphereGrid& fallback);

struct RunConfig {
    std::string manifold = "euclidean";
    std::string surface;
    std::string metric;
    int n_psi = 64;
    int n_theta = 128;
    std::map<std::string, double> tolerances;
    std::uint64_t seed = 0;
    std::string output;

    // ConfigError outside [8, 1024] x [16, 2048] or for an odd n_theta
    void validate() const;
    SphereGrid grid() const;
    double tolerance(const std::string& key, double fallback) const;
};

RunConfig run_config_from_json(const json& j);

} // namespace weyl::io
