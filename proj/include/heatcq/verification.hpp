#pragma once

// Manufactured solutions, the error functionals
//   E^phi          = max_j || phi(t_j) - phi_j ||_{L2(Gamma)},
//   E^{lambda,0}   = max_j || lambda(t_j) - lambda_j ||_{L2(Gamma)},
//   E^{lambda,-1/2}= max_j || Pi_X lambda(t_j) - lambda_j ||_{-1/2,Gamma},
// (maxima over step values; the -1/2 norm is the discrete V(1)-energy), and
// convergence-rate estimation over (k, h)-halving ladders.

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "heatcq/cq.hpp"
#include "heatcq/errors.hpp"
#include "heatcq/geometry.hpp"
#include "heatcq/kernel.hpp"
#include "heatcq/operators.hpp"
#include "heatcq/solver.hpp"
#include "heatcq/trace_space.hpp"

namespace heatcq {

// Exact transmission pair: u_- is a time-lagged heat kernel centered outside
// the inclusion, u_+ = 0.  The exact densities are lambda = d_nu u_- and
// phi = gamma u_-; the jump data are beta0 = gamma u_-, beta1 = kappa d_nu u_-.
class ManufacturedSolution {
  public:
    ManufacturedSolution(const Vec2& x_sc, double m, double t_lag, const Polygon& geometry)
        : x_sc_(x_sc), m_(m), t_lag_(t_lag) {
        if (!(m > 0.0)) throw ConfigError("m: must be positive");
        if (t_lag < 0.0) throw ConfigError("t_lag: must be nonnegative");
        if (geometry.contains(x_sc) || geometry.distance_to_boundary(x_sc) == 0.0)
            throw ConfigError("x_sc: source point must lie strictly outside the inclusion");
    }

    [[nodiscard]] const Vec2& source() const { return x_sc_; }
    [[nodiscard]] double m() const { return m_; }
    [[nodiscard]] double t_lag() const { return t_lag_; }

    [[nodiscard]] double value(const Vec2& x, double t) const {
        return heat_kernel_time(m_, x, x_sc_, t + t_lag_);
    }

    [[nodiscard]] double normal_derivative(const Vec2& x, const Vec2& nu, double t) const {
        return heat_kernel_normal_derivative(m_, x, x_sc_, nu, t + t_lag_);
    }

    [[nodiscard]] double exact_phi(const Vec2& x, double t) const { return value(x, t); }

    [[nodiscard]] double exact_lambda(const Vec2& x, const Vec2& nu, double t) const {
        return normal_derivative(x, nu, t);
    }

    // The transmission problem whose exact solution is (u_-, 0); requires
    // kappa / rho = m so that u_- solves the interior equation.
    [[nodiscard]] TransmissionProblem problem(const Polygon& geometry, double kappa, double rho,
                                              double end_time) const {
        if (std::abs(kappa / rho - m_) > 1e-12 * m_)
            throw ConfigError("kappa: manufactured solution requires kappa / rho = m");
        const ManufacturedSolution self = *this;
        return TransmissionProblem{
            geometry, rho, kappa,
            [self](const Vec2& x, const Vec2&, double t) { return self.value(x, t); },
            [self, kappa](const Vec2& x, const Vec2& nu, double t) {
                return kappa * self.normal_derivative(x, nu, t);
            },
            end_time};
    }

  private:
    Vec2 x_sc_;
    double m_;
    double t_lag_;
};

struct ErrorTriple {
    double e_phi = 0.0;
    double e_lambda_0 = 0.0;
    double e_lambda_mhalf = 0.0;
};

// Maximum over the step values t_j, j = 0..N.  L2 errors by direct
// quadrature of |exact - discrete|^2 with an enriched rule; the -1/2 error
// compares against the per-step L2 projection in the V(1)-energy norm.
[[nodiscard]] inline ErrorTriple compute_errors(const DensityHistory& densities,
                                                const ManufacturedSolution& exact,
                                                const TraceSpacePair& spaces,
                                                const DiscreteNormOperators& norms) {
    const BoundaryMesh& mesh = spaces.mesh();
    const CQScheme& scheme = densities.scheme();
    const QuadratureRule rule = gauss_legendre(spaces.degree() + 6);
    ErrorTriple err;
    for (int j = 0; j <= scheme.num_steps(); ++j) {
        const double t = j * scheme.step_size();
        const Eigen::VectorXd lam = densities.lambda_step(j);
        const Eigen::VectorXd phi = densities.phi_step(j);
        double phi_sq = 0.0, lam_sq = 0.0;
        for (int i = 0; i < mesh.num_panels(); ++i) {
            const Panel& panel = mesh.panel(i);
            for (int q = 0; q < rule.size(); ++q) {
                const double u = rule.points[q];
                const Vec2 x = panel.point(u);
                const double w = rule.weights[q] * panel.length;
                const double dphi =
                    exact.exact_phi(x, t) - spaces.eval_Y_function<double>(phi, i, u);
                const double dlam = exact.exact_lambda(x, panel.normal, t) -
                                    spaces.eval_X_function<double>(lam, i, u);
                phi_sq += w * dphi * dphi;
                lam_sq += w * dlam * dlam;
            }
        }
        const Eigen::VectorXd proj_lam = spaces.project_X<double>(
            [&](int panel, double, const Vec2& x) {
                return exact.exact_lambda(x, mesh.panel(panel).normal, t);
            });
        err.e_phi = std::max(err.e_phi, std::sqrt(phi_sq));
        err.e_lambda_0 = std::max(err.e_lambda_0, std::sqrt(lam_sq));
        err.e_lambda_mhalf =
            std::max(err.e_lambda_mhalf,
                     energy_norm<double>(norms.hminushalf, (proj_lam - lam).eval()));
    }
    return err;
}

struct ConvergenceLevel {
    int level = 0;
    double k = 0.0;
    double h = 0.0;
    ErrorTriple errors;
};

struct ConvergenceRecord {
    std::vector<ConvergenceLevel> levels;
};

struct RateFit {
    double rate = 0.0;
    bool monotone = true;   // errors strictly decreasing over the fitted levels
    int levels_used = 0;
};

// Least-squares slope of log(error) vs log(k), discarding the coarsest
// level (preasymptotic).  An optional floor drops trailing levels whose
// error has stopped decreasing (stagnation against a resolution floor):
// a level is dropped if its error is below `floor` or if the decrease from
// the previous level is less than 1.4x.
[[nodiscard]] inline RateFit fit_rate(const std::vector<double>& ks,
                                      const std::vector<double>& errors, double floor = 0.0) {
    if (ks.size() != errors.size() || ks.size() < 3)
        throw std::invalid_argument("fit_rate: need at least 3 levels");
    std::vector<double> lk, le;
    bool monotone = true;
    for (size_t i = 1; i < ks.size(); ++i) {  // skip the coarsest level
        if (!(errors[i] > 0.0)) throw NumericalError("fit_rate: nonpositive error");
        const bool stagnated =
            floor > 0.0 && (errors[i] < floor || (i > 1 && errors[i - 1] / errors[i] < 1.4));
        if (stagnated && lk.size() >= 2) break;
        if (errors[i] >= errors[i - 1]) monotone = false;
        lk.push_back(std::log(ks[i]));
        le.push_back(std::log(errors[i]));
    }
    const int n = static_cast<int>(lk.size());
    double sk = 0.0, se = 0.0, skk = 0.0, ske = 0.0;
    for (int i = 0; i < n; ++i) {
        sk += lk[i];
        se += le[i];
        skk += lk[i] * lk[i];
        ske += lk[i] * le[i];
    }
    RateFit fit;
    fit.rate = (n * ske - sk * se) / (n * skk - sk * sk);
    fit.monotone = monotone;
    fit.levels_used = n;
    return fit;
}

struct ObservedRates {
    RateFit phi;
    RateFit lambda_0;
    RateFit lambda_mhalf;
};

[[nodiscard]] inline ObservedRates estimate_rates(const ConvergenceRecord& record,
                                                  double floor = 0.0) {
    std::vector<double> ks, ep, el0, elm;
    for (const auto& lvl : record.levels) {
        ks.push_back(lvl.k);
        ep.push_back(lvl.errors.e_phi);
        el0.push_back(lvl.errors.e_lambda_0);
        elm.push_back(lvl.errors.e_lambda_mhalf);
    }
    for (size_t i = 1; i < ks.size(); ++i)
        if (!(ks[i] < ks[i - 1]))
            throw std::invalid_argument("estimate_rates: levels must be strictly decreasing in k");
    ObservedRates out;
    out.phi = fit_rate(ks, ep, floor);
    out.lambda_0 = fit_rate(ks, el0, floor);
    out.lambda_mhalf = fit_rate(ks, elm, floor);
    return out;
}

// One manufactured-solution refinement ladder: level l halves both k and h
// (uniform mesh refinement keeps the ratio k/h fixed).
struct StudyConfig {
    Polygon geometry = paper_quadrilateral();
    double rho = 1.5;
    double kappa = 1.2;
    std::string scheme = "bdf:2";
    double k0 = 0.125;       // coarsest step size
    double end_time = 1.0;
    int levels = 4;
    int degree = 2;          // X_h degree p (Y_h has degree p + 1)
    double h0 = 0.5;         // coarsest target mesh width
    Vec2 x_sc = Vec2(1.5, 1.6);
    double t_lag = 1e-3;
    int workers = 1;
    int contour_override = 0;
};

[[nodiscard]] inline ConvergenceRecord run_convergence_study(const StudyConfig& cfg) {
    if (cfg.levels < 1) throw ConfigError("levels: must be >= 1");
    const ManufacturedSolution exact(cfg.x_sc, cfg.kappa / cfg.rho, cfg.t_lag, cfg.geometry);
    const TransmissionProblem problem =
        exact.problem(cfg.geometry, cfg.kappa, cfg.rho, cfg.end_time);
    ConvergenceRecord record;
    BoundaryMesh mesh = mesh_polygon(cfg.geometry, cfg.h0);
    for (int level = 0; level < cfg.levels; ++level) {
        const double k = cfg.k0 / std::pow(2.0, level);
        const int steps = static_cast<int>(std::llround(cfg.end_time / k));
        const CQScheme scheme = CQScheme::parse(cfg.scheme, k, steps);
        const ContourParameters contour =
            ContourParameters::standard(scheme, cfg.contour_override);
        const TraceSpacePair spaces(mesh, cfg.degree);
        const DensityHistory densities =
            solve_transmission(problem, spaces, scheme, contour, cfg.workers);
        const DiscreteNormOperators norms = build_norm_operators(spaces);
        ConvergenceLevel lvl;
        lvl.level = level;
        lvl.k = k;
        lvl.h = mesh.max_panel_length();
        lvl.errors = compute_errors(densities, exact, spaces, norms);
        record.levels.push_back(lvl);
        if (level + 1 < cfg.levels) mesh = refine_uniform(mesh);
    }
    return record;
}

}  // namespace heatcq
