#pragma once

// End-to-end transmission driver: sample the boundary data at the scheme's
// nodes, run the all-at-once CQ-BEM solve of the two-by-two block system,
// and post-process the densities into interior/exterior fields through the
// layer potentials,
//   u_- = S(s/m) lambda - D(s/m) phi,
//   u_+ = -S(s) (kappa lambda - b1) + D(s) (phi - b0).

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "heatcq/cq.hpp"
#include "heatcq/errors.hpp"
#include "heatcq/geometry.hpp"
#include "heatcq/kernel.hpp"
#include "heatcq/operators.hpp"
#include "heatcq/trace_space.hpp"

namespace heatcq {

// Boundary data closure: x on Gamma, outward unit normal at x, time.
using BoundaryFunction = std::function<double(const Vec2&, const Vec2&, double)>;

struct TransmissionProblem {
    Polygon geometry;
    double rho = 1.0;    // density times heat capacity of the inclusion
    double kappa = 1.0;  // conductivity of the inclusion
    BoundaryFunction beta0;  // Dirichlet jump datum (H^{1/2}-valued)
    BoundaryFunction beta1;  // Neumann jump datum (H^{-1/2}-valued)
    double end_time = 1.0;

    [[nodiscard]] double m() const { return kappa / rho; }

    void validate() const {
        if (!(rho > 0.0)) throw ConfigError("rho: must be positive");
        if (!(kappa > 0.0)) throw ConfigError("kappa: must be positive");
        if (!(end_time > 0.0)) throw ConfigError("T: must be positive");
        if (!beta0 || !beta1) throw ConfigError("boundary data: both jump data must be set");
    }
};

// Stage-stacked coefficient history of the density pair (lambda, phi).
// Node list: BDF exposes the steps t_1..t_N (the t_0 entry is retained
// internally; it vanishes for causal data); Runge-Kutta exposes all N*s
// stages at times t_n + c_i k.
class DensityHistory {
  public:
    DensityHistory(const CQScheme& scheme, int nx, int ny,
                   std::vector<Eigen::VectorXd> stacked)
        : scheme_(scheme), nx_(nx), ny_(ny) {
        const int stages = scheme.stages();
        if (static_cast<int>(stacked.size()) != scheme.history_length())
            throw std::invalid_argument("DensityHistory: history length mismatch");
        lambda_.reserve(stacked.size());
        phi_.reserve(stacked.size());
        for (const auto& entry : stacked) {
            if (entry.size() != static_cast<int>(stages) * (nx + ny))
                throw std::invalid_argument("DensityHistory: entry dimension mismatch");
            Eigen::VectorXd lam(stages * nx), ph(stages * ny);
            for (int i = 0; i < stages; ++i) {
                lam.segment(i * nx, nx) = entry.segment(i * (nx + ny), nx);
                ph.segment(i * ny, ny) = entry.segment(i * (nx + ny) + nx, ny);
            }
            lambda_.push_back(std::move(lam));
            phi_.push_back(std::move(ph));
        }
    }

    [[nodiscard]] const CQScheme& scheme() const { return scheme_; }
    [[nodiscard]] int dim_x() const { return nx_; }
    [[nodiscard]] int dim_y() const { return ny_; }

    [[nodiscard]] int node_count() const {
        return scheme_.multistage() ? scheme_.num_steps() * scheme_.stages() : scheme_.num_steps();
    }

    [[nodiscard]] double node_time(int j) const {
        if (scheme_.multistage())
            return scheme_.node_time(j / scheme_.stages(), j % scheme_.stages());
        return scheme_.node_time(j + 1);
    }

    [[nodiscard]] Eigen::VectorXd lambda_node(int j) const {
        if (scheme_.multistage())
            return lambda_[j / scheme_.stages()].segment((j % scheme_.stages()) * nx_, nx_);
        return lambda_[j + 1];
    }

    [[nodiscard]] Eigen::VectorXd phi_node(int j) const {
        if (scheme_.multistage())
            return phi_[j / scheme_.stages()].segment((j % scheme_.stages()) * ny_, ny_);
        return phi_[j + 1];
    }

    // Step values at t_j, j = 0..N; the Runge-Kutta step value is the last
    // stage of the previous entry (stiff accuracy), zero at t_0.
    [[nodiscard]] Eigen::VectorXd lambda_step(int j) const {
        if (!scheme_.multistage()) return lambda_[j];
        if (j == 0) return Eigen::VectorXd::Zero(nx_);
        return lambda_[j - 1].segment((scheme_.stages() - 1) * nx_, nx_);
    }

    [[nodiscard]] Eigen::VectorXd phi_step(int j) const {
        if (!scheme_.multistage()) return phi_[j];
        if (j == 0) return Eigen::VectorXd::Zero(ny_);
        return phi_[j - 1].segment((scheme_.stages() - 1) * ny_, ny_);
    }

    // Raw stage-stacked histories, aligned with the scheme's sample nodes.
    [[nodiscard]] const std::vector<Eigen::VectorXd>& lambda_history() const { return lambda_; }
    [[nodiscard]] const std::vector<Eigen::VectorXd>& phi_history() const { return phi_; }

  private:
    CQScheme scheme_;
    int nx_, ny_;
    std::vector<Eigen::VectorXd> lambda_;  // per entry: stages * nx
    std::vector<Eigen::VectorXd> phi_;     // per entry: stages * ny
};

// Galerkin loads of the exact data plus their L2 projections at every sample
// node of the scheme, stage-stacked per history entry.
[[nodiscard]] inline RhsSampleHistory sample_boundary_data(const TransmissionProblem& problem,
                                                           const TraceSpacePair& spaces,
                                                           const CQScheme& scheme) {
    problem.validate();
    const int stages = scheme.stages();
    const int nx = spaces.dim_X();
    const int ny = spaces.dim_Y();
    const BoundaryMesh& mesh = spaces.mesh();
    RhsSampleHistory data;
    const int length = scheme.history_length();
    data.load_x_b0.assign(length, Eigen::VectorXd::Zero(stages * nx));
    data.load_y_b1.assign(length, Eigen::VectorXd::Zero(stages * ny));
    data.proj_x_b1.assign(length, Eigen::VectorXd::Zero(stages * nx));
    data.proj_y_b0.assign(length, Eigen::VectorXd::Zero(stages * ny));
    for (int n = 0; n < length; ++n) {
        for (int i = 0; i < stages; ++i) {
            const double t = scheme.node_time(n, i);
            const auto b0 = [&](int panel, double, const Vec2& x) {
                return problem.beta0(x, mesh.panel(panel).normal, t);
            };
            const auto b1 = [&](int panel, double, const Vec2& x) {
                return problem.beta1(x, mesh.panel(panel).normal, t);
            };
            data.load_x_b0[n].segment(i * nx, nx) = spaces.load_X<double>(b0);
            data.load_y_b1[n].segment(i * ny, ny) = spaces.load_Y<double>(b1);
            data.proj_x_b1[n].segment(i * nx, nx) = spaces.project_X<double>(b1);
            data.proj_y_b0[n].segment(i * ny, ny) = spaces.project_Y<double>(b0);
        }
    }
    return data;
}

[[nodiscard]] inline DensityHistory solve_transmission(const TransmissionProblem& problem,
                                                       const TraceSpacePair& spaces,
                                                       const CQScheme& scheme,
                                                       const ContourParameters& contour,
                                                       int workers = 1,
                                                       const AssemblyOptions& opts = {}) {
    problem.validate();
    const RhsSampleHistory data = sample_boundary_data(problem, spaces, scheme);
    const double m = problem.m();
    const double kappa = problem.kappa;
    auto make_system = [&](const Complex& s) {
        return FrequencySystem(spaces, s, m, kappa, opts);
    };
    auto stacked = solve_convolution_system(make_system, data, scheme, contour, workers);
    return DensityHistory(scheme, spaces.dim_X(), spaces.dim_Y(), std::move(stacked));
}

struct FieldSnapshot {
    int step_index = 0;
    double time = 0.0;
    std::vector<Vec2> points;
    std::vector<int> region;   // -1 interior, +1 exterior
    Eigen::VectorXd u_minus;   // interior representation, evaluated everywhere
    Eigen::VectorXd u_plus;    // exterior representation, evaluated everywhere
    Eigen::VectorXd u;         // combined field u_- chi_- + u_+ chi_+
};

namespace detail {

// Forward CQ convolution of a layer-potential combination at fixed points:
// apply(s, v) assembles the potential rows at the scalar frequency and
// contracts them with the density block v.
[[nodiscard]] inline std::vector<Eigen::VectorXd> potential_convolution(
    const TraceSpacePair& spaces, const std::vector<Vec2>& points, double freq_scale,
    double coef_s, double coef_d, const std::vector<Eigen::VectorXd>& density_pair_history,
    const CQScheme& scheme, const ContourParameters& contour, int workers,
    const AssemblyOptions& opts) {
    const int nx = spaces.dim_X();
    const int ny = spaces.dim_Y();
    const auto apply = [&](const Complex& s, const Eigen::VectorXcd& v) {
        const LaplaceFrequency freq(s * freq_scale);
        Eigen::VectorXcd out = Eigen::VectorXcd::Zero(points.size());
        Eigen::RowVectorXcd srow, drow;
        for (size_t pidx = 0; pidx < points.size(); ++pidx) {
            potential_rows(spaces, freq, points[pidx], srow, drow, opts);
            out(pidx) = coef_s * (srow * v.head(nx))(0) + coef_d * (drow * v.tail(ny))(0);
        }
        return out;
    };
    return forward_convolution(apply, density_pair_history, scheme, contour, workers);
}

}  // namespace detail

// Evaluate the fields at the requested step indices (0..N).  All points get
// both representations; the combined field follows the point-in-polygon
// classification.  Points on or numerically touching Gamma raise
// NearSingularError from the potential evaluation.
[[nodiscard]] inline std::vector<FieldSnapshot> evaluate_fields(
    const DensityHistory& densities, const TransmissionProblem& problem,
    const TraceSpacePair& spaces, const std::vector<Vec2>& points,
    const std::vector<int>& step_indices, const ContourParameters& contour, int workers = 1,
    const AssemblyOptions& opts = {}) {
    problem.validate();
    const CQScheme& scheme = densities.scheme();
    const int stages = scheme.stages();
    const int nx = densities.dim_x();
    const int ny = densities.dim_y();
    const int length = scheme.history_length();
    const int np = static_cast<int>(points.size());

    // Interior convolution argument: [lambda; phi] per stage.
    std::vector<Eigen::VectorXd> pair_int(length, Eigen::VectorXd::Zero(stages * (nx + ny)));
    // Exterior argument: [kappa lambda - Pi_X b1; phi - Pi_Y b0] per stage.
    std::vector<Eigen::VectorXd> pair_ext(length, Eigen::VectorXd::Zero(stages * (nx + ny)));
    const RhsSampleHistory data = sample_boundary_data(problem, spaces, scheme);
    for (int n = 0; n < length; ++n) {
        for (int i = 0; i < stages; ++i) {
            const auto lam = densities.lambda_history()[n].segment(i * nx, nx);
            const auto phi = densities.phi_history()[n].segment(i * ny, ny);
            pair_int[n].segment(i * (nx + ny), nx) = lam;
            pair_int[n].segment(i * (nx + ny) + nx, ny) = phi;
            pair_ext[n].segment(i * (nx + ny), nx) =
                problem.kappa * lam - data.proj_x_b1[n].segment(i * nx, nx);
            pair_ext[n].segment(i * (nx + ny) + nx, ny) =
                phi - data.proj_y_b0[n].segment(i * ny, ny);
        }
    }

    // u_- = S(s/m) lambda - D(s/m) phi;  u_+ = -S(s) g1 + D(s) g0.
    const auto hist_minus = detail::potential_convolution(
        spaces, points, 1.0 / problem.m(), 1.0, -1.0, pair_int, scheme, contour, workers, opts);
    const auto hist_plus = detail::potential_convolution(spaces, points, 1.0, -1.0, 1.0, pair_ext,
                                                         scheme, contour, workers, opts);

    // Per-point step values at the requested indices.
    const auto step_value = [&](const std::vector<Eigen::VectorXd>& hist, int j, int pidx) {
        if (!scheme.multistage()) return hist[j](pidx);
        if (j == 0) return 0.0;
        return hist[j - 1]((stages - 1) * np + pidx);
    };

    std::vector<int> region(np);
    for (int p = 0; p < np; ++p)
        region[p] = problem.geometry.contains(points[p]) ? -1 : +1;

    std::vector<FieldSnapshot> out;
    out.reserve(step_indices.size());
    for (const int j : step_indices) {
        if (j < 0 || j > scheme.num_steps())
            throw std::invalid_argument("evaluate_fields: step index out of range");
        FieldSnapshot snap;
        snap.step_index = j;
        snap.time = j * scheme.step_size();
        snap.points = points;
        snap.region = region;
        snap.u_minus.resize(np);
        snap.u_plus.resize(np);
        snap.u.resize(np);
        for (int p = 0; p < np; ++p) {
            snap.u_minus(p) = step_value(hist_minus, j, p);
            snap.u_plus(p) = step_value(hist_plus, j, p);
            snap.u(p) = region[p] < 0 ? snap.u_minus(p) : snap.u_plus(p);
        }
        out.push_back(std::move(snap));
    }
    return out;
}

// Horseshoe demo: exterior point sources on a circle drive a high-
// conductivity inclusion.  The total field is u_src + u with u solving the
// transmission problem for the jump data (gamma u_src, d_nu u_src).
struct DemoParameters {
    Polygon geometry = horseshoe_polygon();
    double kappa = 100.0;
    double rho = 1.0;
    int num_sources = 8;
    Vec2 source_center = Vec2(1.5, 1.5);
    double source_radius = 2.6;
    double t_lag = 1e-3;
    std::string scheme = "bdf:4";
    double step_size = 1.0 / 128.0;
    double end_time = 1.0;
    int degree = 2;
    double mesh_h = 0.25;
    std::vector<double> snapshot_times = {0.0, 0.06, 0.2, 0.375, 0.75, 1.0};
};

[[nodiscard]] inline std::vector<Vec2> demo_source_points(const DemoParameters& params) {
    std::vector<Vec2> sources;
    sources.reserve(params.num_sources);
    for (int j = 0; j < params.num_sources; ++j) {
        const double angle = 2.0 * M_PI * j / params.num_sources;
        sources.push_back(params.source_center +
                          params.source_radius * Vec2(std::cos(angle), std::sin(angle)));
    }
    return sources;
}

// The source field solves the exterior heat equation (unit coefficients),
// time-lagged so it is numerically causal.
[[nodiscard]] inline double demo_source_field(const std::vector<Vec2>& sources, double t_lag,
                                              const Vec2& x, double t) {
    double u = 0.0;
    for (const Vec2& src : sources) u += heat_kernel_time(1.0, x, src, t + t_lag);
    return u;
}

[[nodiscard]] inline TransmissionProblem make_demo_problem(const DemoParameters& params) {
    const std::vector<Vec2> sources = demo_source_points(params);
    const double t_lag = params.t_lag;
    TransmissionProblem problem{params.geometry, params.rho, params.kappa,
                                [sources, t_lag](const Vec2& x, const Vec2&, double t) {
                                    return demo_source_field(sources, t_lag, x, t);
                                },
                                [sources, t_lag](const Vec2& x, const Vec2& normal, double t) {
                                    double flux = 0.0;
                                    for (const Vec2& src : sources)
                                        flux += heat_kernel_normal_derivative(1.0, x, src,
                                                                              normal, t + t_lag);
                                    return flux;
                                },
                                params.end_time};
    return problem;
}

// Runs the demo end to end and returns total-field snapshots: u in each
// snapshot includes the analytic source field on top of the computed
// transmission correction.
[[nodiscard]] inline std::vector<FieldSnapshot> run_demo_simulation(
    const DemoParameters& params, const std::vector<Vec2>& points, int workers = 1,
    int contour_override = 0) {
    const TransmissionProblem problem = make_demo_problem(params);
    const int steps = static_cast<int>(std::llround(params.end_time / params.step_size));
    const CQScheme scheme = CQScheme::parse(params.scheme, params.step_size, steps);
    const ContourParameters contour = ContourParameters::standard(scheme, contour_override);

    const BoundaryMesh mesh = mesh_polygon(params.geometry, params.mesh_h);
    const TraceSpacePair spaces(mesh, params.degree);
    const DensityHistory densities =
        solve_transmission(problem, spaces, scheme, contour, workers);

    std::vector<int> indices;
    indices.reserve(params.snapshot_times.size());
    for (const double t : params.snapshot_times)
        indices.push_back(
            std::clamp(static_cast<int>(std::llround(t / params.step_size)), 0, steps));

    std::vector<FieldSnapshot> snaps =
        evaluate_fields(densities, problem, spaces, points, indices, contour, workers);
    const std::vector<Vec2> sources = demo_source_points(params);
    for (FieldSnapshot& snap : snaps) {
        for (size_t p = 0; p < snap.points.size(); ++p) {
            const double usrc = demo_source_field(sources, params.t_lag, snap.points[p], snap.time);
            snap.u_plus(p) += snap.region[p] > 0 ? usrc : 0.0;
            snap.u(p) = snap.region[p] < 0 ? snap.u_minus(p) : snap.u_plus(p);
        }
    }
    return snaps;
}

}  // namespace heatcq
