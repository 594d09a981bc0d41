#pragma once

#include "weyl/surface.hpp"

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace weyl {

// Rotationally symmetric metric L(p)^2 dp^2 + alpha(p)^2 dtheta^2, p in [0, pi].
// Arclength s_max = integral of L; alpha vanishes at both poles with
// alpha_s = +1 at p = 0 and -1 at p = pi.
class AxisymMetric {
public:
    struct Value {
        double L, alpha, alpha_p;
    };
    using Profile = std::function<Value(double p)>;

    // Throws ConfigError if alpha is not positive inside or the poles do not
    // close to 1e-8.
    AxisymMetric(Profile profile, double closure_tol = 1e-8);

    // ds^2 + alpha(s)^2 dtheta^2 on [0, s_max]
    static AxisymMetric from_alpha(double s_max, std::function<double(double)> alpha,
                                   std::function<double(double)> dalpha);
    // e^{2u(p)} times the unit round metric, u given with its derivative
    static AxisymMetric conformal(std::function<double(double)> u, std::function<double(double)> du);
    static AxisymMetric round(double radius);
    // Metric2S with b = 0 and no theta-dependence (to 1e-10 relative), else
    // ConfigError.  Profiles come from cosine series of sqrt(a) and sqrt(c).
    static AxisymMetric from_metric(const Metric2S& m);

    Value operator()(double p) const { return f_(p); }
    double area() const { return area_; }
    double s_max() const { return s_max_; }
    // Metric2S in coordinates (psi, theta) = (p, theta)
    Metric2S sample(const SphereGrid& grid) const;

private:
    Profile f_;
    double area_ = 0.0;
    double s_max_ = 0.0;
};

struct ProfileSample {
    double s;   // arclength from the north pole
    double x;   // ambient radial coordinate
    double psi; // ambient polar angle
    double p;   // intrinsic polar parameter
    double dx, dp; // d/dpsi of x and p
};

struct AxisymEmbedding {
    std::vector<ProfileSample> profile; // dense, increasing psi
    double x_north = 0.0;
    double x_south = 0.0;
    // sup-norm of induced_metric(graph) against the input metric pulled back
    double round_trip = 0.0;
    RadialGraph graph;
    // Maps between the intrinsic parameter p and the ambient angle psi.
    double psi_of_p(double p) const;
    double x_of_psi(double psi) const;
    double p_of_psi(double psi) const;
};

// Integrates the profile ODE in the ambient angle and shoots on the north-pole
// radius.  Throws EmbeddingError when the profile leaves the solvable region
// (with the failing arclength) and DomainError when phi cannot reach the
// metric's size.
AxisymEmbedding embed_axisym(const AxisymMetric& metric, const WarpSpec& spec, const SphereGrid& grid);

// Mean curvature of the flat isometric embedding of an axisymmetric metric,
// sampled at the nodes psi_i of the grid read as intrinsic p.
Field flat_mean_curvature(const AxisymMetric& metric, const SphereGrid& grid);

// Brown-York mass of an axisymmetric radial graph, H_o from the flat
// embedding of its induced metric.
double brown_york_axisym(const RadialGraph& graph);

// ---------------------------------------------------------------------------
// Normalized Ricci flow of g = e^{2u} round:  u_t = rbar / 2 - e^{-2u} (1 - Lap u).

struct FlowOptions {
    double dt = 0.01;
    double variance_tol = 1e-6;
    int snapshot_every = 10;
};

struct FlowResult {
    std::vector<Metric2S> snapshots; // first is the start, last the terminal state
    std::vector<double> times;
    std::vector<double> variance; // area-weighted variance of R, every step
    std::vector<double> area;     // every step
    bool converged = false;
};

// Throws PreconditionError for a start that is not conformally round on the
// grid (no conformal factor and b != 0 or a != c).
FlowResult ricci_flow_path(const Metric2S& start, int steps, const FlowOptions& opts = {});

// Scalar curvature 2 e^{-2u} (1 - Lap u) with the flow's own discrete Laplacian.
Field conformal_scalar_curvature(const SphereGrid& grid, const Field& u);

// ---------------------------------------------------------------------------
// Embedding maps and the linearized system.

// A map S^2 -> N written in pseudo-Cartesian coordinates y in R^3: the point
// has radial coordinate |y| and direction y / |y|.
struct EmbeddingMap {
    SphereGrid grid;
    std::array<Field, 3> y;
};

EmbeddingMap coordinate_sphere_map(const SphereGrid& grid, double x);

bool is_axisymmetric(const EmbeddingMap& map, double rel_tol = 1e-10);

// Radial graph of an axisymmetric, star-shaped map, read off the meridian and
// interpolated to the grid angles.  UnsupportedError for other maps.
RadialGraph map_graph(const EmbeddingMap& map, const WarpSpec& spec);

// Frame components (a, b, c) of the pulled-back ambient metric.
Metric2S map_metric(const EmbeddingMap& map, const WarpSpec& spec);

// Principal curvatures of the map, kappa1 >= kappa2 per node.
std::pair<Field, Field> map_principal_curvatures(const EmbeddingMap& map, const WarpSpec& spec);

// The operator tau -> 2 sym(dX, D tau) at a fixed map, with tau in the same
// pseudo-Cartesian components.  Derivatives use spectral psi without the polar
// filter; the theta-Nyquist mode and the psi-Nyquist profiles (-1)^i of odd
// theta-modes are removed from the unknowns.
class LinearizedOperator {
public:
    LinearizedOperator(const EmbeddingMap& map, const WarpSpec& spec);

    const SphereGrid& grid() const { return grid_; }
    bool axisymmetric() const { return axisym_; }

    // (delta a, delta b, delta c) for a field tau (3 components)
    std::array<Field, 3> apply(const std::array<Field, 3>& tau) const;
    std::array<Field, 3> apply_transpose(const std::array<Field, 3>& q) const;

    // Projection of tau onto the admissible unknowns.
    std::array<Field, 3> project(const std::array<Field, 3>& tau) const;

    // Singular values of the operator restricted to admissible unknowns,
    // descending.  Uses Fourier blocks for axisymmetric maps, otherwise a
    // dense SVD (small grids only; UnsupportedError above 4096 nodes).
    std::vector<double> singular_values() const;
    int kernel_dimension(double rel_tol = 1e-6) const;

    // Minimal-norm least-squares solution of L tau = q with singular values
    // below rel_tol * sigma_max treated as kernel.
    struct Solution {
        std::array<Field, 3> tau;
        int kernel = 0;
        double residual = 0.0; // sup-norm of L tau - q
        std::string route;
    };
    Solution solve(const std::array<Field, 3>& q, double rel_tol = 1e-6) const;

    // Dense matrix on the admissible basis (columns) for small grids.
    Eigen::MatrixXd dense() const;

    // Fourier block of mode k: rows (da, db, dc) x n_psi, columns the admissible
    // (A, B, gamma) profiles.  Axisymmetric maps only.
    Eigen::MatrixXcd block(int k) const;

private:
    struct BlockBasis {
        Eigen::MatrixXd Z[3]; // n_psi x dim per part, orthonormal columns
        int dim = 0;
    };
    BlockBasis block_basis(int k) const;
    Solution solve_blocks(const std::array<Field, 3>& q, double rel_tol) const;
    Solution solve_dense(const std::array<Field, 3>& q, double rel_tol) const;
    Solution solve_refined(const std::array<Field, 3>& q, double rel_tol) const;

    EmbeddingMap map_;
    SphereGrid grid_;
    WarpSpec spec_;
    Deriv d_;
    bool axisym_ = false;
    // coefficient vectors per node: gXp = gbar y_psi, gXt = gbar y_theta, and
    // gradients in y of gbar(y_psi, y_psi), gbar(y_psi, y_theta), gbar(y_theta, y_theta)
    std::array<Field, 3> gXp_, gXt_, Gpp_, Gpt_, Gtt_;
    double scale_ = 0.0; // sup of gbar(y_psi, y_psi); right-hand sides below roundoff of it are dropped
    std::vector<double> sv_cache_;
};

// ---------------------------------------------------------------------------
// Continuity method.

struct ContinuityOptions {
    double tol = 1e-6;          // final sup-norm metric residual
    double step_tol = 0.0;      // per-t Newton tolerance, 0 means tol / 10
    double dt0 = 1.0 / 24.0;
    double dt_min = 1e-5;
    int max_newton = 12;
    int flow_steps = 4000;
    double flow_dt = 0.01;
    int path_samples = 61;      // ellipticity samples along the path
    double kappa_cap = 1e6;
};

struct TraceEntry {
    double t;
    int newton;
    double residual;
    double max_kappa;
};

struct EmbeddingState {
    EmbeddingMap map;
    double t = 0.0;
    Metric2S target;
    double residual = 0.0;
    int kernel = 0;
    std::vector<TraceEntry> trace;
};

// Three-part homotopy (scaled coordinate spheres, conformal blend to the
// flow's constant-curvature limit, reversed flow) for conformal targets; a
// linear (a, b, c) blend from a round metric otherwise.  Errors:
// HypothesisError for a path ellipticity failure (t sample, node),
// SolverError on Newton stall or a residual floor above tol,
// UnsupportedError for eta-form warps.
EmbeddingState continuity_solve(const Metric2S& target, const WarpSpec& spec, const ContinuityOptions& opts = {});

// Rigid alignment (Kabsch) of the map onto reference points, returns the
// sup distance after alignment.  Flat ambient only.
double aligned_distance(const EmbeddingMap& map, const std::vector<std::array<double, 3>>& reference);

// Cartesian points of the axisymmetric embedding at intrinsic p = psi_i.
std::vector<std::array<double, 3>> axisym_points(const AxisymEmbedding& e, const SphereGrid& grid);

} // namespace weyl
