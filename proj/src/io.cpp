#include "weyl/io.hpp"
#include "weyl/errors.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace weyl::io {

namespace {

template <class T>
T field(const json& j, const char* key, const char* what)
{
    if (!j.contains(key)) throw ConfigError(std::string(what) + ": missing \"" + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string(what) + ": bad \"" + key + "\": " + e.what());
    }
}

std::vector<double> numbers(const json& j, const char* what)
{
    std::vector<double> out;
    if (!j.is_array()) throw ConfigError(std::string(what) + ": expected an array");
    for (const json& v : j) {
        if (v.is_array()) {
            for (const json& w : v) {
                if (!w.is_number()) throw ConfigError(std::string(what) + ": non-numeric entry");
                out.push_back(w.get<double>());
            }
        } else if (v.is_number()) {
            out.push_back(v.get<double>());
        } else {
            throw ConfigError(std::string(what) + ": non-numeric entry");
        }
    }
    return out;
}

SphereGrid grid_from(const json& j, const SphereGrid& fallback)
{
    if (!j.contains("grid")) return fallback;
    const json& g = j.at("grid");
    return SphereGrid(field<int>(g, "n_psi", "grid"), field<int>(g, "n_theta", "grid"));
}

json grid_to_json(const SphereGrid& g) { return {{"n_psi", g.n_psi}, {"n_theta", g.n_theta}}; }

Field sized(std::vector<double> v, const SphereGrid& g, const char* what)
{
    if (static_cast<int>(v.size()) != g.size())
        throw ConfigError(std::string(what) + ": expected " + std::to_string(g.size()) + " values, got "
                          + std::to_string(v.size()));
    return v;
}

struct LegendreSeries {
    std::vector<double> c;
    double operator()(double p) const
    {
        double s = 0.0;
        for (std::size_t l = 0; l < c.size(); ++l) s += c[l] * boost::math::legendre_p(static_cast<int>(l), std::cos(p));
        return s;
    }
    double derivative(double p) const
    {
        double s = 0.0;
        for (std::size_t l = 1; l < c.size(); ++l)
            s += c[l] * boost::math::legendre_p_prime(static_cast<int>(l), std::cos(p));
        return -std::sin(p) * s;
    }
};

LegendreSeries legendre_of(const json& j)
{
    const json& cr = j.at("conformal_round");
    LegendreSeries u{numbers(field<json>(cr, "u_coeffs", "conformal_round"), "u_coeffs")};
    if (u.c.empty()) throw ConfigError("conformal_round: u_coeffs is empty");
    return u;
}

} // namespace

std::string format_double(double v)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("'" + path + "': " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
    if (!out) throw ConfigError("write failed for '" + path + "'");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

WarpSpec manifold_from_json(const json& j)
{
    if (!j.is_object()) throw ConfigError("manifold: expected an object");
    const std::string fam = field<std::string>(j, "family", "manifold");
    const int n = j.value("n", 2);
    if (fam == "euclidean") return WarpSpec::euclidean(n);
    if (fam == "hyperbolic") return WarpSpec::hyperbolic(n);
    if (fam == "spherical") return WarpSpec::spherical(n);
    if (fam == "schwarzschild") return WarpSpec::ads_schwarzschild(field<double>(j, "m", "manifold"), 0.0, n);
    if (fam == "ads-schwarzschild")
        return WarpSpec::ads_schwarzschild(field<double>(j, "m", "manifold"), field<double>(j, "kappa", "manifold"), n);
    if (fam == "reissner-nordstrom")
        return WarpSpec::reissner_nordstrom(field<double>(j, "m", "manifold"), field<double>(j, "q", "manifold"), n);
    if (fam == "custom") {
        if (j.contains("phi_table")) {
            const json& t = j.at("phi_table");
            return WarpSpec::custom_phi(numbers(field<json>(t, "r", "phi_table"), "r"),
                                        numbers(field<json>(t, "phi", "phi_table"), "phi"), n);
        }
        if (j.contains("eta_table")) {
            const json& t = j.at("eta_table");
            return WarpSpec::custom_eta(numbers(field<json>(t, "s", "eta_table"), "s"),
                                        numbers(field<json>(t, "eta", "eta_table"), "eta"), n);
        }
        throw ConfigError("manifold: custom family needs phi_table or eta_table");
    }
    throw ConfigError("manifold: unknown family '" + fam + "'");
}

json manifold_to_json(const WarpSpec& spec)
{
    json j{{"n", spec.n()}};
    switch (spec.family()) {
    case Family::euclidean: j["family"] = "euclidean"; break;
    case Family::hyperbolic: j["family"] = "hyperbolic"; break;
    case Family::spherical: j["family"] = "spherical"; break;
    case Family::ads_schwarzschild:
        j["family"] = "ads-schwarzschild";
        j["m"] = spec.m();
        j["kappa"] = spec.kappa_cosmo();
        break;
    case Family::reissner_nordstrom:
        j["family"] = "reissner-nordstrom";
        j["m"] = spec.m();
        j["q"] = spec.q();
        break;
    case Family::custom: throw UnsupportedError("manifold_to_json: custom tables are not written back");
    }
    return j;
}

WarpSpec load_manifold(const std::string& name_or_path)
{
    for (const auto& p : preset_names())
        if (p == name_or_path) return preset(p);
    return manifold_from_json(read_json(name_or_path));
}

RadialGraph surface_from_json(const json& j, const WarpSpec& spec, const SphereGrid& fallback)
{
    if (!j.is_object()) throw ConfigError("surface: expected an object");
    if (j.contains("rho")) {
        const SphereGrid g = grid_from(j, fallback);
        return RadialGraph(g, sized(numbers(j.at("rho"), "rho"), g, "surface rho"), spec);
    }
    if (j.contains("rho_axisym")) {
        const json& a = j.at("rho_axisym");
        const Pchip f(numbers(field<json>(a, "psi", "rho_axisym"), "psi"), numbers(field<json>(a, "rho", "rho_axisym"), "rho"));
        const SphereGrid g = grid_from(j, fallback);
        if (f.front() > g.psi(0) || f.back() < g.psi(g.n_psi - 1))
            throw ConfigError("surface: rho_axisym does not cover the grid colatitudes");
        return make_graph(g, spec, [&](double p, double) { return f(p).f; });
    }
    throw ConfigError("surface: needs \"rho\" or \"rho_axisym\"");
}

json surface_to_json(const RadialGraph& graph)
{
    return {{"grid", grid_to_json(graph.grid())}, {"rho", graph.rho()}};
}

Metric2S metric_from_json(const json& j, const SphereGrid& fallback)
{
    if (!j.is_object()) throw ConfigError("metric: expected an object");
    const SphereGrid g = grid_from(j, fallback);
    if (j.contains("conformal_round")) {
        const LegendreSeries u = legendre_of(j);
        Field f(g.size());
        for (int i = 0; i < g.n_psi; ++i)
            for (int k = 0; k < g.n_theta; ++k) f[g.idx(i, k)] = u(g.psi(i));
        return Metric2S::conformal_round(g, std::move(f));
    }
    if (j.contains("E")) {
        return Metric2S::from_EFG(g, sized(numbers(j.at("E"), "E"), g, "metric E"),
                                  sized(numbers(field<json>(j, "F", "metric"), "F"), g, "metric F"),
                                  sized(numbers(field<json>(j, "G", "metric"), "G"), g, "metric G"));
    }
    throw ConfigError("metric: needs E, F, G arrays or conformal_round");
}

json metric_to_json(const Metric2S& metric)
{
    return {{"grid", grid_to_json(metric.grid())},
            {"E", metric.E()},
            {"F", metric.F()},
            {"G", metric.G()},
            {"provenance", to_string(metric.provenance())}};
}

AxisymMetric axisym_metric_from_json(const json& j, const SphereGrid& fallback)
{
    if (j.is_object() && j.contains("conformal_round")) {
        const LegendreSeries u = legendre_of(j);
        return AxisymMetric::conformal([u](double p) { return u(p); }, [u](double p) { return u.derivative(p); });
    }
    return AxisymMetric::from_metric(metric_from_json(j, fallback));
}

void RunConfig::validate() const
{
    if (n_psi < 8 || n_psi > 1024) throw ConfigError("resolution: n_psi must be in [8, 1024]");
    if (n_theta < 16 || n_theta > 2048) throw ConfigError("resolution: n_theta must be in [16, 2048]");
    if (n_theta % 2 != 0) throw ConfigError("resolution: n_theta must be even");
    for (const auto& [k, v] : tolerances)
        if (!(v > 0.0)) throw ConfigError("tolerance '" + k + "' must be positive");
}

SphereGrid RunConfig::grid() const
{
    validate();
    return SphereGrid(n_psi, n_theta);
}

double RunConfig::tolerance(const std::string& key, double fallback) const
{
    const auto it = tolerances.find(key);
    return it == tolerances.end() ? fallback : it->second;
}

RunConfig run_config_from_json(const json& j)
{
    if (!j.is_object()) throw ConfigError("config: expected an object");
    RunConfig c;
    try {
        c.manifold = j.value("manifold", c.manifold);
        c.surface = j.value("surface", c.surface);
        c.metric = j.value("metric", c.metric);
        c.seed = j.value("seed", c.seed);
        c.output = j.value("output", c.output);
        if (j.contains("resolution")) {
            const json& r = j.at("resolution");
            if (r.is_array() && r.size() == 2) {
                c.n_psi = r[0].get<int>();
                c.n_theta = r[1].get<int>();
            } else {
                c.n_psi = field<int>(r, "n_psi", "resolution");
                c.n_theta = field<int>(r, "n_theta", "resolution");
            }
        }
        if (j.contains("tolerances")) c.tolerances = j.at("tolerances").get<std::map<std::string, double>>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

} // namespace weyl::io
