#include "weyl/embed.hpp"
#include "weyl/errors.hpp"
#include "weyl/estimates.hpp"
#include "weyl/fixtures.hpp"
#include "weyl/io.hpp"
#include "weyl/parallel.hpp"
#include "weyl/symfunc.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <regex>
#include <sstream>

using namespace weyl;
using io::json;
namespace fs = std::filesystem;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_error = 1;
constexpr int exit_failed = 2;
constexpr int exit_usage = 64;

struct Options {
    std::string config;
    std::string manifold;
    std::string surface;
    std::string metric;
    int n_psi = 64;
    int n_theta = 128;
    std::uint64_t seed = 0;
    bool json_out = false;
    std::string out;
    std::string dump;
    double tol = 0.0;

    CLI::Option* o_manifold = nullptr;
    CLI::Option* o_surface = nullptr;
    CLI::Option* o_metric = nullptr;
    CLI::Option* o_n_psi = nullptr;
    CLI::Option* o_n_theta = nullptr;
    CLI::Option* o_seed = nullptr;
    CLI::Option* o_out = nullptr;
    CLI::Option* o_tol = nullptr;

    io::RunConfig cfg;

    // config file values fill whatever was not given on the command line
    void resolve()
    {
        if (!config.empty()) cfg = io::run_config_from_json(io::read_json(config));
        if (o_manifold && o_manifold->count()) cfg.manifold = manifold;
        if (o_surface && o_surface->count()) cfg.surface = surface;
        if (o_metric && o_metric->count()) cfg.metric = metric;
        if (o_n_psi && o_n_psi->count()) cfg.n_psi = n_psi;
        if (o_n_theta && o_n_theta->count()) cfg.n_theta = n_theta;
        if (o_seed && o_seed->count()) cfg.seed = seed;
        if (o_out && o_out->count()) cfg.output = out;
        cfg.validate();
    }

    double tolerance(const std::string& key, double fallback) const
    {
        if (o_tol && o_tol->count()) return tol;
        return cfg.tolerance(key, fallback);
    }

    WarpSpec spec() const { return io::load_manifold(cfg.manifold); }
    SphereGrid grid() const { return cfg.grid(); }

    RadialGraph load_surface(const WarpSpec& w) const
    {
        if (cfg.surface.empty()) throw ConfigError("--surface is required");
        return io::surface_from_json(io::read_json(cfg.surface), w, grid());
    }

    json load_metric_json() const
    {
        if (cfg.metric.empty()) throw ConfigError("--metric is required");
        return io::read_json(cfg.metric);
    }
};

struct Command {
    Options opt;
    std::function<json(Options&)> run;
    bool plain_value = false; // human output is the "value" field alone
};

void add_common(CLI::App* app, Options& o, bool surface, bool metric)
{
    app->add_option("--config", o.config, "run configuration JSON");
    o.o_manifold = app->add_option("--manifold,--preset,--ambient", o.manifold, "preset name or manifold descriptor JSON");
    if (surface) o.o_surface = app->add_option("--surface", o.surface, "surface JSON");
    if (metric) o.o_metric = app->add_option("--metric", o.metric, "metric JSON");
    o.o_n_psi = app->add_option("--n-psi", o.n_psi, "colatitude nodes when the input has no grid");
    o.o_n_theta = app->add_option("--n-theta", o.n_theta, "longitude nodes when the input has no grid");
    o.o_seed = app->add_option("--seed", o.seed, "random seed");
    app->add_flag("--json", o.json_out, "machine-readable stdout");
}

void add_out(CLI::App* app, Options& o, const char* help = "write the JSON report here")
{
    o.o_out = app->add_option("--out", o.out, help);
}

void add_tol(CLI::App* app, Options& o, const char* help)
{
    o.o_tol = app->add_option("--tol", o.tol, help)->check(CLI::PositiveNumber);
}

std::string csv_line(std::initializer_list<double> vals)
{
    std::string s;
    for (double v : vals) {
        if (!s.empty()) s += ',';
        s += io::format_double(v);
    }
    return s + "\n";
}

void write_dump(const std::string& path, const SphereGrid& g, const std::vector<std::pair<std::string, const Field*>>& cols)
{
    std::string text = "psi,theta";
    for (const auto& c : cols) text += "," + c.first;
    text += "\n";
    for (int i = 0; i < g.n_psi; ++i)
        for (int j = 0; j < g.n_theta; ++j) {
            const int k = g.idx(i, j);
            text += io::format_double(g.psi(i)) + "," + io::format_double(g.theta(j));
            for (const auto& c : cols) text += "," + io::format_double((*c.second)[k]);
            text += "\n";
        }
    io::write_text(path, text);
}

// "s=[a,b]", "r=[a,b]" or "[a,b]"
Region parse_region(const std::string& text)
{
    static const std::regex re(R"(^\s*(?:[A-Za-z]+\s*=\s*)?\[\s*([^,\]]+?)\s*,\s*([^,\]]+?)\s*\]\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, re)) throw ConfigError("region must look like s=[a,b], got '" + text + "'");
    try {
        return {std::stod(m[1].str()), std::stod(m[2].str())};
    } catch (const std::exception&) {
        throw ConfigError("region bounds are not numbers: '" + text + "'");
    }
}

// "s=2" or "2"
double parse_slice(const std::string& text)
{
    const auto eq = text.find('=');
    const std::string v = eq == std::string::npos ? text : text.substr(eq + 1);
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("slice must look like s=<value>, got '" + text + "'");
    }
}

json pair_list(const std::vector<std::pair<double, double>>& v)
{
    json a = json::array();
    for (const auto& [x, y] : v) a.push_back({x, y});
    return a;
}

json certificate_json(const BoundCertificate& c)
{
    return {{"A1", c.fitted_A1},         {"A2", c.fitted_A2}, {"sup_kappa", c.sup_kappa},
            {"drive", c.drive},          {"per_surface", pair_list(c.per_surface)}};
}

std::vector<RadialGraph> family_members(const json& list, const fs::path& base, const WarpSpec& w, const SphereGrid& g)
{
    std::vector<RadialGraph> out;
    if (!list.is_array()) throw ConfigError("family: expected an array of surfaces");
    for (const json& e : list) {
        if (e.is_string()) out.push_back(io::surface_from_json(io::read_json((base / e.get<std::string>()).string()), w, g));
        else out.push_back(io::surface_from_json(e, w, g));
    }
    return out;
}

// ---------------------------------------------------------------------------

json cmd_ambient_info(Options& o, const std::optional<double>& at)
{
    o.resolve();
    const WarpSpec w = o.spec();
    json r{{"family", w.family() == Family::custom ? std::string("custom") : io::manifold_to_json(w).value("family", "")},
           {"label", w.label()},
           {"n", w.n()},
           {"eta_form", w.eta_form()},
           {"domain", {w.domain().lo, std::isfinite(w.domain().hi) ? json(w.domain().hi) : json("inf")}},
           {"x0", w.x0()},
           {"has_horizon", w.has_horizon()}};
    if (w.eta_form() && w.family() != Family::custom) {
        const HorizonRoots h = horizon_roots(w);
        r["horizon"] = {{"s_lower", h.s_lower}, {"s_upper", std::isfinite(h.s_upper) ? json(h.s_upper) : json("inf")}};
    }
    if (at) {
        const WarpEval e = warp_eval(w, *at);
        const AmbientCurvature c = curvature_at(w, *at);
        const SliceShape s = slice_shape(w, *at);
        json p{{"x", *at},
               {"phi", e.phi},
               {"phi_prime", e.phi_prime},
               {"phi_second", e.phi_second},
               {"Phi", e.Phi},
               {"R_tan", c.R_tan},
               {"R_rad", c.R_rad},
               {"Rbar", c.Rbar},
               {"Ric_tan", c.Ric_tan},
               {"Ric_rad", c.Ric_rad},
               {"slice_kappa", s.kappa_slice},
               {"slice_H", s.H_slice},
               {"slice_sigma2", s.sigma2_slice}};
        if (w.eta_form()) {
            const StaticResidual sr = static_residual(w, *at);
            p["static_lambda_tan"] = sr.lambda_tan;
            p["static_lambda_rad"] = sr.lambda_rad;
        }
        r["at"] = p;
    }
    return r;
}

json cmd_surface_analyze(Options& o)
{
    o.resolve();
    const WarpSpec w = o.spec();
    const RadialGraph graph = o.load_surface(w);
    const ShapeData s = shape_of(graph);
    const Field gr = gauss_residual(s, w), cr = codazzi_residual(s, w);
    double k1 = -1e300, k2 = 1e300, s2min = 1e300;
    for (int k = 0; k < graph.grid().size(); ++k) {
        k1 = std::max(k1, s.kappa1[k]);
        k2 = std::min(k2, s.kappa2[k]);
        s2min = std::min(s2min, s.sigma2[k]);
    }
    json r{{"grid", {graph.grid().n_psi, graph.grid().n_theta}},
           {"kappa1_max", k1},
           {"kappa2_min", k2},
           {"H_sup", sup_norm(s.H)},
           {"sigma2_min", s2min},
           {"gauss_residual", sup_norm(gr)},
           {"codazzi_residual", sup_norm(cr)},
           {"gauss_bonnet_defect", gauss_bonnet_defect(s.metric())},
           {"gradient_sup", graph.gradient_sup()},
           {"flagged", graph.flagged()}};
    if (w.space_form()) r["commutator_residual"] = sup_norm(commutator_residual(s, w));
    if (!o.dump.empty())
        write_dump(o.dump, graph.grid(),
                   {{"kappa1", &s.kappa1}, {"kappa2", &s.kappa2}, {"H", &s.H}, {"sigma2", &s.sigma2},
                    {"gauss_residual", &gr}, {"codazzi_residual", &cr}});
    return r;
}

json cmd_master_identity(Options& o)
{
    o.resolve();
    const WarpSpec w = o.spec();
    const RadialGraph graph = o.load_surface(w);
    const ShapeData s = shape_of(graph);
    const Field f = prescribed_f(s, w);
    Field res(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) res[k] = s.sigma2[k] - f[k];
    const double tol = o.tolerance("master_identity", 1e-5);
    const double d = sup_norm(res);
    if (!o.dump.empty()) write_dump(o.dump, graph.grid(), {{"sigma2", &s.sigma2}, {"f", &f}, {"residual", &res}});
    return {{"defect", d}, {"tol", tol}, {"pass", d < tol}};
}

json cmd_gauss_codazzi(Options& o)
{
    o.resolve();
    const WarpSpec w = o.spec();
    const ShapeData s = shape_of(o.load_surface(w));
    const double g = sup_norm(gauss_residual(s, w)), c = sup_norm(codazzi_residual(s, w));
    const double tol = o.tolerance("gauss_codazzi", 1e-5);
    return {{"gauss", g}, {"codazzi", c}, {"tol", tol}, {"pass", g < tol && c < tol}};
}

json cmd_commutator(Options& o)
{
    o.resolve();
    const WarpSpec w = o.spec();
    const double c = sup_norm(commutator_residual(shape_of(o.load_surface(w)), w));
    const double tol = o.tolerance("commutator", 1e-4);
    return {{"commutator", c}, {"tol", tol}, {"pass", c < tol}};
}

json cmd_lemma21(Options& o, int n, int samples)
{
    o.resolve();
    const double tol = o.tolerance("lemma21", symfunc::default_tol);
    const symfunc::SuiteReport r = symfunc::lemma21_suite(n, samples, o.cfg.seed, tol);
    return {{"n", r.n},
            {"samples", r.samples},
            {"passed", r.passed},
            {"interior", r.interior},
            {"boundary", r.boundary},
            {"negative", r.negative},
            {"seed", r.seed},
            {"counterexample_rejected", r.counterexample_rejected},
            {"pass", r.pass()}};
}

json cmd_ellipticity(Options& o, const std::string& region_text, int samples)
{
    o.resolve();
    const WarpSpec w = o.spec();
    const Region region = parse_region(region_text);
    Metric2S m = Metric2S::round(o.grid());
    if (!o.cfg.metric.empty()) m = io::metric_from_json(o.load_metric_json(), o.grid());
    else if (!o.cfg.surface.empty()) m = induced_metric(o.load_surface(w));
    else throw ConfigError("--metric or --surface is required");
    const EllipticityReport r = ellipticity_check(m, w, region, samples);
    return {{"region", {region.lo, region.hi}},
            {"min_R", r.min_R},
            {"rhs_sup", r.rhs_sup},
            {"margin", r.margin},
            {"holds", r.holds},
            {"pass", r.holds}};
}

json cmd_horizon(Options& o)
{
    o.resolve();
    const WarpSpec w = o.spec();
    const HorizonObstruction h = horizon_obstruction(o.load_surface(w));
    return {{"R_at_min", h.R_at_min},
            {"gauss_cap", h.gauss_cap},
            {"ellipticity_needs", h.ellipticity_needs},
            {"contradiction", h.contradiction},
            {"node", h.node},
            {"pass", h.contradiction}};
}

json cmd_hessian_phi(Options& o)
{
    o.resolve();
    const WarpSpec w = o.spec();
    const RadialGraph graph = o.load_surface(w);
    const Field res = warp_hessian_residual(graph);
    const CondPhiFit fit = cond_phi_fit(graph, warp_potential_samples(graph));
    const double tol = o.tolerance("hessian_phi", 1e-6);
    const double r = sup_norm(res);
    if (!o.dump.empty()) write_dump(o.dump, graph.grid(), {{"residual", &res}});
    return {{"residual", r},
            {"tol", tol},
            {"cond_phi", {{"C1", fit.C1}, {"C2", fit.C2}, {"feasible", fit.feasible}}},
            {"pass", r < tol}};
}

json cmd_delta_f(Options& o)
{
    o.resolve();
    const WarpSpec w = o.spec();
    const LaplacianFCheck c = laplacian_f_check(shape_of(o.load_surface(w)), w);
    return {{"ratio_sup", c.ratio_sup}, {"pass", std::isfinite(c.ratio_sup)}};
}

json cmd_certify(Options& o, const std::string& family_path)
{
    o.resolve();
    const WarpSpec w = o.spec();
    const json fam = io::read_json(family_path);
    const fs::path base = fs::path(family_path).parent_path();
    if (!fam.contains("surfaces")) throw ConfigError("family: missing \"surfaces\"");
    const BoundCertificate c = bound_certificate(family_members(fam.at("surfaces"), base, w, o.grid()));
    json r = certificate_json(c);
    bool ok = true;
    for (const auto& [d, k] : c.per_surface) ok = ok && c.covers(d, k);
    if (fam.contains("held_out")) {
        json held = json::array();
        const auto members = family_members(fam.at("held_out"), base, w, o.grid());
        for (std::size_t q = 0; q < members.size(); ++q) {
            const CertificateMember m = certificate_member(members[q], static_cast<int>(c.per_surface.size() + q));
            const bool cov = c.covers(m.drive, m.sup_kappa);
            ok = ok && cov;
            held.push_back({{"drive", m.drive}, {"sup_kappa", m.sup_kappa}, {"covered", cov}});
        }
        r["held_out"] = held;
    }
    r["pass"] = ok;
    return r;
}

json cmd_brown_york(Options& o, const std::string& slice)
{
    o.resolve();
    const WarpSpec w = o.spec();
    const SphereGrid g = o.grid();
    RadialGraph graph = slice.empty() ? o.load_surface(w)
                                      : make_graph(g, w, [x = parse_slice(slice)](double, double) { return x; });
    bool axisym = true;
    const SphereGrid& gg = graph.grid();
    const double scale = sup_norm(graph.rho());
    for (int i = 0; i < gg.n_psi && axisym; ++i)
        for (int j = 1; j < gg.n_theta; ++j)
            if (std::abs(graph.rho()[gg.idx(i, j)] - graph.rho()[gg.idx(i, 0)]) > 1e-12 * scale) {
                axisym = false;
                break;
            }
    json r;
    if (axisym) {
        r["value"] = brown_york_axisym(graph);
        r["method"] = "axisymmetric";
    } else {
        const Metric2S m = induced_metric(graph);
        ContinuityOptions co;
        co.tol = o.tolerance("continuity", co.tol);
        const EmbeddingState st = continuity_solve(m, WarpSpec::euclidean(), co);
        const auto [k1, k2] = map_principal_curvatures(st.map, WarpSpec::euclidean());
        Field Ho(k1.size());
        for (std::size_t k = 0; k < Ho.size(); ++k) Ho[k] = k1[k] + k2[k];
        r["value"] = brown_york_mass(m, shape_of(graph).H, Ho);
        r["method"] = "continuity";
        r["embedding_residual"] = st.residual;
    }
    return r;
}

json cmd_embed_axisym(Options& o)
{
    o.resolve();
    const WarpSpec w = o.spec();
    const AxisymEmbedding e = embed_axisym(io::axisym_metric_from_json(o.load_metric_json(), o.grid()), w, o.grid());
    if (!o.cfg.output.empty()) {
        std::string text = "s,r,psi\n";
        for (const ProfileSample& p : e.profile) text += csv_line({p.s, p.x, p.psi});
        io::write_text(o.cfg.output, text);
    }
    return {{"x_north", e.x_north},
            {"x_south", e.x_south},
            {"round_trip", e.round_trip},
            {"samples", e.profile.size()},
            {"pass", e.round_trip < o.tolerance("round_trip", 1e-6)}};
}

json cmd_embed_continuity(Options& o, const std::string& trace_path)
{
    o.resolve();
    const WarpSpec w = o.spec();
    const Metric2S target = io::metric_from_json(o.load_metric_json(), o.grid());
    ContinuityOptions co;
    co.tol = o.tolerance("continuity", co.tol);
    const EmbeddingState st = continuity_solve(target, w, co);
    json records = json::array();
    for (const TraceEntry& t : st.trace)
        records.push_back({{"t", t.t}, {"newton", t.newton}, {"residual", t.residual}, {"max_kappa", t.max_kappa}});
    const json r{{"t", st.t}, {"residual", st.residual}, {"kernel", st.kernel}, {"tol", co.tol},
                 {"steps", st.trace.size()}, {"pass", st.residual < co.tol}};
    if (!trace_path.empty()) {
        json tr = r;
        tr["records"] = records;
        io::write_text(trace_path, io::dump(tr));
    }
    if (!o.cfg.output.empty()) {
        const SphereGrid& g = st.map.grid;
        write_dump(o.cfg.output, g, {{"y1", &st.map.y[0]}, {"y2", &st.map.y[1]}, {"y3", &st.map.y[2]}});
    }
    return r;
}

json cmd_flow(Options& o, int steps, double dt, int every, const std::string& dir)
{
    o.resolve();
    FlowOptions fo;
    fo.dt = dt;
    fo.snapshot_every = every;
    fo.variance_tol = o.tolerance("variance", fo.variance_tol);
    const FlowResult r = ricci_flow_path(io::metric_from_json(o.load_metric_json(), o.grid()), steps, fo);
    if (!dir.empty()) {
        fs::create_directories(dir);
        for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
            json j = io::metric_to_json(r.snapshots[k]);
            j["t"] = r.times[k];
            char name[32];
            std::snprintf(name, sizeof name, "snapshot_%05zu.json", k);
            io::write_text((fs::path(dir) / name).string(), io::dump(j));
        }
    }
    double drift = 0.0;
    for (double a : r.area) drift = std::max(drift, std::abs(a - r.area.front()) / r.area.front());
    return {{"steps", r.variance.size() - 1},
            {"converged", r.converged},
            {"variance", r.variance.back()},
            {"area_drift", drift},
            {"snapshots", r.snapshots.size()},
            {"pass", r.converged}};
}

json cmd_fixtures(Options& o, const std::string& dir)
{
    o.resolve();
    const WarpSpec w = o.spec();
    const SphereGrid g = o.grid();
    const fs::path root(dir);
    fs::create_directories(root);
    json written = json::array();
    auto put = [&](const std::string& name, const json& j) {
        io::write_text((root / name).string(), io::dump(j));
        written.push_back(name);
    };
    for (const auto& p : preset_names()) put("manifold_" + p + ".json", io::manifold_to_json(preset(p)));
    for (const auto& f : surface_fixtures()) put(f.name + ".json", io::surface_to_json(fixture_graph(f.name, w, g)));
    const double base = fixture_base(w);
    put("sphere2.json", io::surface_to_json(make_graph(g, w, [base](double, double) { return 2.0 * base; })));
    put("metric_round.json", {{"conformal_round", {{"u_coeffs", {0.0}}}}});
    put("metric_p2.json", {{"conformal_round", {{"u_coeffs", {0.0, 0.0, 0.05}}}}});
    put("metric_p2_flow.json", {{"conformal_round", {{"u_coeffs", {0.0, 0.0, 0.2}}}}});
    put("metric_p3_flow.json", {{"conformal_round", {{"u_coeffs", {0.0, 0.0, 0.0, 0.3}}}}});
    json fam{{"surfaces", json::array()}, {"held_out", json::array()}};
    for (const RadialGraph& m : hyperbolic_family(g)) fam["surfaces"].push_back(io::surface_to_json(m));
    for (const RadialGraph& m : hyperbolic_family(g, true)) fam["held_out"].push_back(io::surface_to_json(m));
    put("family_hyperbolic.json", fam);
    return {{"directory", dir}, {"files", written}};
}

void print_human(const json& r)
{
    for (const auto& [k, v] : r.items()) {
        if (v.is_number_float()) std::cout << k << " = " << io::format_double(v.get<double>()) << "\n";
        else if (v.is_primitive()) std::cout << k << " = " << v.dump() << "\n";
        else if (v.is_array() && v.size() <= 4 && std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_primitive(); }))
            std::cout << k << " = " << v.dump() << "\n";
        else std::cout << k << ": " << v.size() << " entries\n";
    }
}

int finish(const Command& c, const json& r)
{
    if (c.opt.json_out) std::cout << io::dump(r);
    else if (c.plain_value && r.contains("value")) std::cout << io::format_double(r["value"].get<double>()) << "\n";
    else print_human(r);
    if (r.contains("pass") && !r["pass"].get<bool>()) return exit_failed;
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"weyl: warped-product surface geometry, estimates and isometric embedding"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    std::vector<std::unique_ptr<Command>> cmds;
    Command* chosen = nullptr;
    auto command = [&](CLI::App* sub, bool plain = false) {
        cmds.push_back(std::make_unique<Command>());
        Command* c = cmds.back().get();
        c->plain_value = plain;
        sub->callback([&chosen, c] { chosen = c; });
        return c;
    };

    // ambient info
    auto* ambient = app.add_subcommand("ambient", "ambient manifold queries");
    ambient->require_subcommand(1);
    auto* info = ambient->add_subcommand("info", "warp data, curvature and slice shape");
    Command* c_info = command(info);
    add_common(info, c_info->opt, false, false);
    double at = 0.0;
    CLI::Option* o_at = info->add_option("--at", at, "radial coordinate to evaluate at");
    c_info->run = [&](Options& o) { return cmd_ambient_info(o, o_at->count() ? std::optional<double>(at) : std::nullopt); };

    // surface analyze
    auto* surface = app.add_subcommand("surface", "surface geometry");
    surface->require_subcommand(1);
    auto* analyze = surface->add_subcommand("analyze", "shape summary and residuals");
    Command* c_an = command(analyze);
    add_common(analyze, c_an->opt, true, false);
    add_out(analyze, c_an->opt);
    analyze->add_option("--dump", c_an->opt.dump, "per-node CSV");
    c_an->run = cmd_surface_analyze;

    // checks
    auto* check = app.add_subcommand("check", "property checks; exit 2 when a check fails");
    check->require_subcommand(1);
    auto surface_check = [&](const char* name, const char* help, const char* tol_help, json (*fn)(Options&)) {
        auto* s = check->add_subcommand(name, help);
        Command* c = command(s);
        add_common(s, c->opt, true, false);
        add_out(s, c->opt);
        s->add_option("--dump", c->opt.dump, "per-node CSV");
        if (tol_help) add_tol(s, c->opt, tol_help);
        c->run = fn;
        return s;
    };
    surface_check("master-identity", "sigma_2(kappa) against the prescribed f", "pass threshold (default 1e-5)",
                  cmd_master_identity);
    surface_check("gauss-codazzi", "Gauss and Codazzi residuals", "pass threshold (default 1e-5)", cmd_gauss_codazzi);
    surface_check("commutator", "commutator identity residual (space forms)", "pass threshold (default 1e-4)",
                  cmd_commutator);
    surface_check("horizon", "horizon obstruction inequality chain", nullptr, cmd_horizon);
    surface_check("hessian-phi", "warp potential Hessian identity and cond_phi fit", "pass threshold (default 1e-6)",
                  cmd_hessian_phi);
    surface_check("delta-f", "ratio |Lap f| / (|h|^2 + |grad H| + 1)", nullptr, cmd_delta_f);

    auto* l21 = check->add_subcommand("lemma21", "randomized sigma_2 inequality suite");
    Command* c_l21 = command(l21);
    add_common(l21, c_l21->opt, false, false);
    add_out(l21, c_l21->opt);
    add_tol(l21, c_l21->opt, "comparison tolerance");
    int l21_n = 3, l21_samples = 10000;
    l21->add_option("--n", l21_n, "dimension")->check(CLI::Range(2, 64));
    l21->add_option("--samples", l21_samples, "instances")->check(CLI::Range(1, 100000000));
    c_l21->run = [&](Options& o) { return cmd_lemma21(o, l21_n, l21_samples); };

    auto* ell = check->add_subcommand("ellipticity", "min R against the ambient threshold over a region");
    Command* c_ell = command(ell);
    add_common(ell, c_ell->opt, true, true);
    add_out(ell, c_ell->opt);
    std::string region;
    int ell_samples = 401;
    ell->add_option("--region", region, "s=[a,b] or r=[a,b]")->required();
    ell->add_option("--samples", ell_samples, "region samples")->check(CLI::Range(2, 1000000));
    c_ell->run = [&](Options& o) { return cmd_ellipticity(o, region, ell_samples); };

    // certify bound
    auto* certify = app.add_subcommand("certify", "estimate certificates");
    certify->require_subcommand(1);
    auto* bound = certify->add_subcommand("bound", "curvature envelope over a family");
    Command* c_bound = command(bound);
    add_common(bound, c_bound->opt, false, false);
    add_out(bound, c_bound->opt, "write the certificate JSON here");
    std::string family;
    bound->add_option("--family", family, "family JSON {\"surfaces\": [...], \"held_out\": [...]}")->required();
    c_bound->run = [&](Options& o) { return cmd_certify(o, family); };

    // mass brown-york
    auto* mass = app.add_subcommand("mass", "quasi-local mass");
    mass->require_subcommand(1);
    auto* by = mass->add_subcommand("brown-york", "Brown-York mass of a surface or a coordinate sphere");
    Command* c_by = command(by, true);
    add_common(by, c_by->opt, true, false);
    add_out(by, c_by->opt);
    add_tol(by, c_by->opt, "embedding tolerance for non-axisymmetric surfaces");
    std::string slice;
    by->add_option("--slice", slice, "coordinate sphere, e.g. s=2");
    c_by->run = [&](Options& o) { return cmd_brown_york(o, slice); };

    // embed
    auto* embed = app.add_subcommand("embed", "isometric embedding");
    embed->require_subcommand(1);
    auto* eax = embed->add_subcommand("axisym", "shooting embedder for rotationally symmetric metrics");
    Command* c_eax = command(eax);
    add_common(eax, c_eax->opt, false, true);
    add_out(eax, c_eax->opt, "profile CSV (s, r, psi)");
    add_tol(eax, c_eax->opt, "round-trip pass threshold (default 1e-6)");
    c_eax->run = cmd_embed_axisym;

    auto* econt = embed->add_subcommand("continuity", "continuity method for general metrics");
    Command* c_ec = command(econt);
    add_common(econt, c_ec->opt, false, true);
    add_out(econt, c_ec->opt, "map CSV (psi, theta, y1, y2, y3)");
    add_tol(econt, c_ec->opt, "final metric residual (default 1e-6)");
    std::string trace;
    econt->add_option("--trace", trace, "trace JSON");
    c_ec->run = [&](Options& o) { return cmd_embed_continuity(o, trace); };

    // flow
    auto* flow = app.add_subcommand("flow", "normalized Ricci flow of a conformal metric");
    Command* c_flow = command(flow);
    add_common(flow, c_flow->opt, false, true);
    add_tol(flow, c_flow->opt, "variance stopping threshold (default 1e-6)");
    int steps = 1000, every = 10;
    double dt = 0.01;
    std::string snapshots;
    flow->add_option("--steps", steps, "maximum steps")->check(CLI::NonNegativeNumber);
    flow->add_option("--dt", dt, "time step")->check(CLI::PositiveNumber);
    flow->add_option("--every", every, "snapshot interval in steps")->check(CLI::NonNegativeNumber);
    flow->add_option("--snapshots", snapshots, "directory for snapshot metric JSON");
    c_flow->run = [&](Options& o) { return cmd_flow(o, steps, dt, every, snapshots); };

    // fixtures
    auto* fix = app.add_subcommand("fixtures", "write canonical surfaces, metrics and manifolds");
    Command* c_fix = command(fix);
    add_common(fix, c_fix->opt, false, false);
    std::string fix_dir = "fixtures";
    fix->add_option("--out", fix_dir, "output directory");
    c_fix->run = [&](Options& o) { return cmd_fixtures(o, fix_dir); };

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }
    if (!chosen) {
        std::cerr << app.help();
        return exit_usage;
    }

    try {
        apply_thread_env();
        const json r = chosen->run(chosen->opt);
        if (chosen->opt.o_out && chosen->opt.o_out->count() && chosen != c_eax && chosen != c_ec)
            io::write_text(chosen->opt.out, io::dump(r));
        return finish(*chosen, r);
    } catch (const ConfigError& e) {
        std::cerr << "weyl: " << e.what() << "\n";
        return exit_error;
    } catch (const DomainError& e) {
        std::cerr << "weyl: " << e.what() << "\n";
        return exit_error;
    } catch (const UnsupportedError& e) {
        std::cerr << "weyl: " << e.what() << "\n";
        return exit_error;
    } catch (const Error& e) {
        const json r{{"pass", false}, {"error", e.what()}};
        if (chosen->opt.o_out && chosen->opt.o_out->count() && chosen != c_eax && chosen != c_ec)
            io::write_text(chosen->opt.out, io::dump(r));
        if (chosen->opt.json_out) std::cout << io::dump(r);
        std::cerr << "weyl: " << e.what() << "\n";
        return exit_failed;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "weyl: " << e.what() << "\n";
        return exit_error;
    }
}
