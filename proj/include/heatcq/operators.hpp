#pragma once

// Galerkin assembly of the Laplace-domain boundary integral operators
// V, K, K^T, W on a trace-space pair, the Costabel-Stephan block system at
// one frequency, and layer-potential evaluation matrices.
//
// Singular panel interactions use the logarithmic kernel splits
//   K0(sqrt(s) r)            = -log(r) I0(sqrt(s) r) + (analytic in r^2),
//   sqrt(s) K1(sqrt(s) r)/r  = 1/r^2 + (s/2) Itld(s r^2) log(r) + (analytic),
// integrating the log factor with a log-weighted Gauss rule (coincident
// panels via the diagonal substitution, adjacent panels via Duffy maps).
// W is assembled through the Maue integration-by-parts identity
//   <W(s) phi, psi> = int int G [phi'(y) psi'(x) + s (nu_x . nu_y) phi psi].

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "heatcq/bessel.hpp"
#include "heatcq/errors.hpp"
#include "heatcq/geometry.hpp"
#include "heatcq/kernel.hpp"
#include "heatcq/trace_space.hpp"

namespace heatcq {

struct AssemblyOptions {
    int n_gauss = 0;      // smooth Gauss points per direction; 0 = degree + 12
    int n_log = 0;        // log-Gauss points; 0 = same as n_gauss
    double near_factor = 2.0;  // separated panels closer than factor*length get subdivided
    int max_depth = 40;        // subdivision recursion cap
};

struct OperatorMatrices {
    Eigen::MatrixXcd v;        // dim X x dim X
    Eigen::MatrixXcd k;        // dim X x dim Y
    Eigen::MatrixXcd kt;       // dim Y x dim X, transpose of k
    Eigen::MatrixXcd w;        // dim Y x dim Y
    Eigen::MatrixXd duality;   // dim X x dim Y
};

namespace detail {

// Accumulates weighted kernel values against all basis products of one panel
// pair.  wg multiplies the single-layer kernel (feeds V and W), wdl the
// double-layer kernel (feeds K).
class PairAccumulator {
  public:
    PairAccumulator(const TraceSpacePair& spaces, const Complex& s, int pi, int pj)
        : spaces_(spaces),
          s_(s),
          li_(spaces.mesh().panel(pi).length),
          lj_(spaces.mesh().panel(pj).length),
          nunu_(spaces.mesh().panel(pi).normal.dot(spaces.mesh().panel(pj).normal)),
          nx_(spaces.modes_per_panel()),
          ny_(spaces.nodes_per_panel()),
          v_(Eigen::MatrixXcd::Zero(nx_, nx_)),
          k_(Eigen::MatrixXcd::Zero(nx_, ny_)),
          w_(Eigen::MatrixXcd::Zero(ny_, ny_)),
          xu_(nx_), xv_(nx_), yu_(ny_), yv_(ny_), dyu_(ny_), dyv_(ny_) {}

    void add(double u, double v, const Complex& wg, const Complex& wdl) {
        spaces_.eval_X(u, xu_.data());
        spaces_.eval_X(v, xv_.data());
        spaces_.eval_Y(u, yu_.data(), dyu_.data());
        spaces_.eval_Y(v, yv_.data(), dyv_.data());
        for (int a = 0; a < nx_; ++a) {
            const double fa = xu_[a];
            for (int b = 0; b < nx_; ++b) v_(a, b) += wg * (fa * xv_[b]);
        }
        for (int a = 0; a < nx_; ++a) {
            const double fa = xu_[a];
            for (int b = 0; b < ny_; ++b) k_(a, b) += wdl * (fa * yv_[b]);
        }
        const Complex snn = s_ * nunu_;
        for (int a = 0; a < ny_; ++a) {
            const double da = dyu_[a] / li_;
            const double fa = yu_[a];
            for (int b = 0; b < ny_; ++b)
                w_(a, b) += wg * (da * dyv_[b] / lj_) + (wg * snn) * (fa * yv_[b]);
        }
    }

    [[nodiscard]] const Eigen::MatrixXcd& v() const { return v_; }
    [[nodiscard]] const Eigen::MatrixXcd& k() const { return k_; }
    [[nodiscard]] const Eigen::MatrixXcd& w() const { return w_; }

  private:
    const TraceSpacePair& spaces_;
    Complex s_;
    double li_, lj_, nunu_;
    int nx_, ny_;
    Eigen::MatrixXcd v_, k_, w_;
    std::vector<double> xu_, xv_, yu_, yv_, dyu_, dyv_;
};

// Smooth tensor-Gauss integration of the full kernels on a parameter
// sub-rectangle of a separated panel pair.
inline void integrate_cell(PairAccumulator& acc, const BoundaryMesh& mesh,
                           const LaplaceFrequency& s, int pi, int pj, const QuadratureRule& rule,
                           double ua, double ub, double va, double vb) {
    const Panel& pa = mesh.panel(pi);
    const Panel& pb = mesh.panel(pj);
    const double jac = pa.length * pb.length * (ub - ua) * (vb - va);
    for (int qu = 0; qu < rule.size(); ++qu) {
        const double u = ua + (ub - ua) * rule.points[qu];
        const Vec2 x = pa.point(u);
        for (int qv = 0; qv < rule.size(); ++qv) {
            const double v = va + (vb - va) * rule.points[qv];
            const Vec2 y = pb.point(v);
            const Vec2 d = x - y;
            const double r = d.norm();
            const K01 bes = bessel_k01(s.root() * r);
            const double wq = rule.weights[qu] * rule.weights[qv] * jac / (2.0 * M_PI);
            const Complex wg = wq * bes.k0;
            const Complex wdl = wq * s.root() * bes.k1 / r * pb.normal.dot(d);
            acc.add(u, v, wg, wdl);
        }
    }
}

inline void integrate_separated_adaptive(PairAccumulator& acc, const BoundaryMesh& mesh,
                                         const LaplaceFrequency& s, int pi, int pj,
                                         const QuadratureRule& rule, const AssemblyOptions& opts,
                                         double ua, double ub, double va, double vb, int depth) {
    const Panel& pa = mesh.panel(pi);
    const Panel& pb = mesh.panel(pj);
    const double len_u = pa.length * (ub - ua);
    const double len_v = pb.length * (vb - va);
    const double dist = detail::segment_segment_distance(pa.point(ua), pa.point(ub), pb.point(va),
                                                         pb.point(vb));
    if (depth >= opts.max_depth || dist >= opts.near_factor * std::max(len_u, len_v)) {
        integrate_cell(acc, mesh, s, pi, pj, rule, ua, ub, va, vb);
        return;
    }
    if (len_u >= len_v) {
        const double um = 0.5 * (ua + ub);
        integrate_separated_adaptive(acc, mesh, s, pi, pj, rule, opts, ua, um, va, vb, depth + 1);
        integrate_separated_adaptive(acc, mesh, s, pi, pj, rule, opts, um, ub, va, vb, depth + 1);
    } else {
        const double vm = 0.5 * (va + vb);
        integrate_separated_adaptive(acc, mesh, s, pi, pj, rule, opts, ua, ub, va, vm, depth + 1);
        integrate_separated_adaptive(acc, mesh, s, pi, pj, rule, opts, ua, ub, vm, vb, depth + 1);
    }
}

// Coincident panel: log split along the diagonal r = L|u - v|.  The
// double-layer kernel vanishes identically (nu(y) . (x - y) = 0 on a
// straight panel), so only the single-layer values are produced.
inline void integrate_coincident(PairAccumulator& acc, const BoundaryMesh& mesh,
                                 const LaplaceFrequency& s, int pi, const QuadratureRule& gauss,
                                 const QuadratureRule& logr) {
    const double len = mesh.panel(pi).length;
    const Complex sv = s.value();
    const double jac = len * len / (2.0 * M_PI);
    // Analytic-in-r^2 part plus the constant -log(len) piece: tensor Gauss.
    for (int qu = 0; qu < gauss.size(); ++qu) {
        const double u = gauss.points[qu];
        for (int qv = 0; qv < gauss.size(); ++qv) {
            const double v = gauss.points[qv];
            const double r2 = (len * (u - v)) * (len * (u - v));
            const Complex smooth = -std::log(len) * bessel_i0_sq(sv * r2) +
                                   k0_log_remainder(sv, s.root(), r2);
            const Complex wg = gauss.weights[qu] * gauss.weights[qv] * jac * smooth;
            acc.add(u, v, wg, 0.0);
        }
    }
    // -log|u - v| part: outer log-Gauss in the gap w, inner Gauss along the
    // diagonal, both orientations of the triangle.
    for (int qw = 0; qw < logr.size(); ++qw) {
        const double gap = logr.points[qw];
        const double r2 = (len * gap) * (len * gap);
        const Complex i0 = bessel_i0_sq(sv * r2);
        for (int qt = 0; qt < gauss.size(); ++qt) {
            const double t = gauss.points[qt] * (1.0 - gap);
            const Complex wg =
                logr.weights[qw] * gauss.weights[qt] * (1.0 - gap) * jac * i0;
            acc.add(t + gap, t, wg, 0.0);
            acc.add(t, t + gap, wg, 0.0);
        }
    }
}

// Panels sharing one vertex: Duffy maps on the two parameter triangles with
// the log split in the radial variable.
inline void integrate_adjacent(PairAccumulator& acc, const BoundaryMesh& mesh,
                               const LaplaceFrequency& s, int pi, int pj,
                               const QuadratureRule& gauss, const QuadratureRule& logr) {
    const Panel& pa = mesh.panel(pi);
    const Panel& pb = mesh.panel(pj);
    const double li = pa.length, lj = pb.length;
    const Complex sv = s.value();
    // Locate the shared vertex and the local directions leaving it.
    double ui0 = -1.0, uj0 = -1.0;
    const double tol = 1e-12 * std::max(li, lj);
    for (const double cu : {0.0, 1.0})
        for (const double cv : {0.0, 1.0})
            if ((pa.point(cu) - pb.point(cv)).norm() < tol) {
                ui0 = cu;
                uj0 = cv;
            }
    if (ui0 < 0.0) throw NumericalError("integrate_adjacent: panels share no vertex");
    const Vec2 di = (ui0 == 0.0) ? pa.tangent : Vec2(-pa.tangent);
    const Vec2 dj = (uj0 == 0.0) ? pb.tangent : Vec2(-pb.tangent);
    const double cosq = di.dot(dj);
    const auto uof = [ui0](double p) { return ui0 == 0.0 ? p : 1.0 - p; };
    const auto vof = [uj0](double q) { return uj0 == 0.0 ? q : 1.0 - q; };

    for (int tri = 0; tri < 2; ++tri) {
        // Triangle 0: (p, q) = (rho, rho tau); triangle 1: (rho tau, rho).
        // In both, r = rho * rg(tau) with rg bounded away from zero.
        const auto rg = [&](double tau) {
            return tri == 0 ? std::sqrt(li * li + tau * tau * lj * lj - 2.0 * tau * li * lj * cosq)
                            : std::sqrt(tau * tau * li * li + lj * lj - 2.0 * tau * li * lj * cosq);
        };
        const auto pq = [&](double rho, double tau) {
            return tri == 0 ? std::pair<double, double>{rho, rho * tau}
                            : std::pair<double, double>{rho * tau, rho};
        };
        const auto nd_of = [&](double p, double q) {
            const Vec2 diff = p * li * di - q * lj * dj;  // x - y
            return pb.normal.dot(diff);
        };
        // Smooth part in (rho, tau): tensor Gauss.
        for (int qr = 0; qr < gauss.size(); ++qr) {
            const double rho = gauss.points[qr];
            for (int qt = 0; qt < gauss.size(); ++qt) {
                const double tau = gauss.points[qt];
                const auto [p, q] = pq(rho, tau);
                const double rgt = rg(tau);
                const double r = rho * rgt;
                const double r2 = r * r;
                const double wq =
                    gauss.weights[qr] * gauss.weights[qt] * rho * li * lj / (2.0 * M_PI);
                const Complex gsm = -std::log(rgt) * bessel_i0_sq(sv * r2) +
                                    k0_log_remainder(sv, s.root(), r2);
                const double nd = nd_of(p, q);
                const Complex dlsm =
                    nd / r2 + nd * (0.5 * sv * bessel_i1tilde_sq(sv * r2) * std::log(rgt) +
                                    k1_smooth_remainder(sv, s.root(), r2));
                acc.add(uof(p), vof(q), wq * gsm, wq * dlsm);
            }
        }
        // log(rho) part: log-Gauss radially, Gauss in tau.
        for (int qr = 0; qr < logr.size(); ++qr) {
            const double rho = logr.points[qr];
            for (int qt = 0; qt < gauss.size(); ++qt) {
                const double tau = gauss.points[qt];
                const auto [p, q] = pq(rho, tau);
                const double r2 = rho * rg(tau) * rho * rg(tau);
                const double wq =
                    logr.weights[qr] * gauss.weights[qt] * rho * li * lj / (2.0 * M_PI);
                const Complex glog = bessel_i0_sq(sv * r2);
                const Complex dllog = -0.5 * sv * bessel_i1tilde_sq(sv * r2) * nd_of(p, q);
                acc.add(uof(p), vof(q), wq * glog, wq * dllog);
            }
        }
    }
}

inline QuadratureRule assembly_gauss(const TraceSpacePair& spaces, const AssemblyOptions& opts) {
    return gauss_legendre(opts.n_gauss > 0 ? opts.n_gauss : spaces.degree() + 12);
}

inline QuadratureRule assembly_log(const TraceSpacePair& spaces, const AssemblyOptions& opts) {
    const int n = opts.n_log > 0 ? opts.n_log
                                 : (opts.n_gauss > 0 ? opts.n_gauss : spaces.degree() + 12);
    return log_gauss(n);
}

}  // namespace detail

// Assemble V, K, K^T, W and the duality matrix at one frequency in a single
// sweep over panel pairs (the Bessel evaluations dominate and are shared).
inline OperatorMatrices assemble_operators(const TraceSpacePair& spaces, const LaplaceFrequency& s,
                                           const AssemblyOptions& opts = {}) {
    const BoundaryMesh& mesh = spaces.mesh();
    const int n = mesh.num_panels();
    const QuadratureRule gauss = detail::assembly_gauss(spaces, opts);
    const QuadratureRule logr = detail::assembly_log(spaces, opts);

    OperatorMatrices out;
    out.v = Eigen::MatrixXcd::Zero(spaces.dim_X(), spaces.dim_X());
    out.k = Eigen::MatrixXcd::Zero(spaces.dim_X(), spaces.dim_Y());
    out.w = Eigen::MatrixXcd::Zero(spaces.dim_Y(), spaces.dim_Y());

    const int mx = spaces.modes_per_panel();
    const int my = spaces.nodes_per_panel();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            detail::PairAccumulator acc(spaces, s.value(), i, j);
            switch (mesh.relation(i, j)) {
                case PanelRelation::Coincident:
                    detail::integrate_coincident(acc, mesh, s, i, gauss, logr);
                    break;
                case PanelRelation::SharedVertex:
                    detail::integrate_adjacent(acc, mesh, s, i, j, gauss, logr);
                    break;
                case PanelRelation::Separated:
                    detail::integrate_separated_adaptive(acc, mesh, s, i, j, gauss, opts, 0.0, 1.0,
                                                         0.0, 1.0, 0);
                    break;
            }
            for (int a = 0; a < mx; ++a)
                for (int b = 0; b < mx; ++b)
                    out.v(spaces.x_global(i, a), spaces.x_global(j, b)) += acc.v()(a, b);
            for (int a = 0; a < mx; ++a)
                for (int b = 0; b < my; ++b)
                    out.k(spaces.x_global(i, a), spaces.y_global(j, b)) += acc.k()(a, b);
            for (int a = 0; a < my; ++a)
                for (int b = 0; b < my; ++b)
                    out.w(spaces.y_global(i, a), spaces.y_global(j, b)) += acc.w()(a, b);
        }
    }
    out.kt = out.k.transpose();
    out.duality = spaces.duality();
    return out;
}

enum class OperatorKind { V, K, KT, W };

inline Eigen::MatrixXcd assemble_operator(OperatorKind which, const LaplaceFrequency& s,
                                          const TraceSpacePair& spaces,
                                          const AssemblyOptions& opts = {}) {
    const OperatorMatrices all = assemble_operators(spaces, s, opts);
    switch (which) {
        case OperatorKind::V: return all.v;
        case OperatorKind::K: return all.k;
        case OperatorKind::KT: return all.kt;
        case OperatorKind::W: return all.w;
    }
    throw std::invalid_argument("assemble_operator: unknown kind");
}

// Discrete trace-norm operators: V(1)-energy realizes H^{-1/2}, W(1) + L2
// realizes H^{1/2}.
inline DiscreteNormOperators build_norm_operators(const TraceSpacePair& spaces,
                                                  const AssemblyOptions& opts = {}) {
    const OperatorMatrices at_one = assemble_operators(spaces, LaplaceFrequency(1.0), opts);
    DiscreteNormOperators ops;
    ops.gram_x = spaces.gram_X();
    ops.gram_y = spaces.gram_Y();
    ops.hminushalf = at_one.v.real();
    ops.hhalf = at_one.w.real() + ops.gram_y;
    return ops;
}

// The Costabel-Stephan block system at frequency s:
//   A(s) = [ V(s/m) + kappa V(s)     -K(s/m) - K(s)          ]
//          [ K^T(s/m) + K^T(s)        W(s/m) + (1/kappa) W(s) ]
// with the right-hand side map built from the exterior-frequency operators.
class FrequencySystem {
  public:
    FrequencySystem(const TraceSpacePair& spaces, const Complex& s, double m, double kappa,
                    const AssemblyOptions& opts = {})
        : nx_(spaces.dim_X()), ny_(spaces.dim_Y()), kappa_(kappa) {
        if (!(m > 0.0) || !(kappa > 0.0))
            throw std::invalid_argument("FrequencySystem: m and kappa must be positive");
        const LaplaceFrequency s_int(s / m);
        const LaplaceFrequency s_ext(s);
        const OperatorMatrices interior = assemble_operators(spaces, s_int, opts);
        const OperatorMatrices exterior = assemble_operators(spaces, s_ext, opts);
        v_ext_ = exterior.v;
        k_ext_ = exterior.k;
        w_ext_ = exterior.w;
        a_.resize(nx_ + ny_, nx_ + ny_);
        a_.topLeftCorner(nx_, nx_) = interior.v + kappa * exterior.v;
        a_.topRightCorner(nx_, ny_) = -(interior.k + exterior.k);
        a_.bottomLeftCorner(ny_, nx_) = interior.kt + exterior.kt;
        a_.bottomRightCorner(ny_, ny_) = interior.w + w_ext_ / kappa;
        lu_.compute(a_);
        if (!lu_.isInvertible() || !a_.allFinite())
            throw ContourError("FrequencySystem: singular block matrix at s = (" +
                               std::to_string(s.real()) + ", " + std::to_string(s.imag()) + ")");
    }

    [[nodiscard]] int dimension() const { return nx_ + ny_; }
    [[nodiscard]] const Eigen::MatrixXcd& matrix() const { return a_; }

    // RHS of the transmission system from the data pair (b0, b1):
    //   (1/2) [ <mu_i, b0> ; (1/kappa) <b1, phi_i> ]
    //   + [ V(s) , -K(s) ; (1/kappa) K^T(s) , (1/kappa) W(s) ] [ Pi_X b1 ; Pi_Y b0 ].
    // Loads come from exact-data quadratures, the operator term from the L2
    // projections of the data onto the trace spaces.
    [[nodiscard]] Eigen::VectorXcd rhs(const Eigen::VectorXcd& load_x_b0,
                                       const Eigen::VectorXcd& load_y_b1,
                                       const Eigen::VectorXcd& proj_x_b1,
                                       const Eigen::VectorXcd& proj_y_b0) const {
        if (load_x_b0.size() != nx_ || load_y_b1.size() != ny_ || proj_x_b1.size() != nx_ ||
            proj_y_b0.size() != ny_)
            throw std::invalid_argument("FrequencySystem::rhs: dimension mismatch");
        Eigen::VectorXcd out(nx_ + ny_);
        out.head(nx_) = 0.5 * load_x_b0 + v_ext_ * proj_x_b1 - k_ext_ * proj_y_b0;
        out.tail(ny_) = (0.5 / kappa_) * load_y_b1 +
                        (k_ext_.transpose() * proj_x_b1 + w_ext_ * proj_y_b0) / kappa_;
        return out;
    }

    [[nodiscard]] Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const {
        return lu_.solve(b);
    }

  private:
    int nx_, ny_;
    double kappa_;
    Eigen::MatrixXcd a_;
    Eigen::MatrixXcd v_ext_, k_ext_, w_ext_;
    Eigen::FullPivLU<Eigen::MatrixXcd> lu_;
};

// Single-layer and double-layer potential rows at one off-boundary point:
// srow maps X_h coefficients to (S(s) lambda)(x), drow maps Y_h coefficients
// to (D(s) phi)(x).  Panels near the point are subdivided until the
// point-to-subpanel distance exceeds twice the subpanel length.
inline void potential_rows(const TraceSpacePair& spaces, const LaplaceFrequency& s, const Vec2& x,
                           Eigen::RowVectorXcd& srow, Eigen::RowVectorXcd& drow,
                           const AssemblyOptions& opts = {}) {
    const BoundaryMesh& mesh = spaces.mesh();
    const double diam = mesh.polygon().diameter();
    srow = Eigen::RowVectorXcd::Zero(spaces.dim_X());
    drow = Eigen::RowVectorXcd::Zero(spaces.dim_Y());
    const QuadratureRule gauss = detail::assembly_gauss(spaces, opts);
    const int mx = spaces.modes_per_panel();
    const int my = spaces.nodes_per_panel();
    std::vector<double> xv(mx), yv(my);

    for (int j = 0; j < mesh.num_panels(); ++j) {
        const Panel& p = mesh.panel(j);
        if (detail::point_segment_distance(x, p.a, p.b) < 1e-10 * diam)
            throw NearSingularError("potential_rows: evaluation point touches the boundary");
        // Iterative stack of parameter intervals to subdivide.
        std::vector<std::pair<double, double>> stack{{0.0, 1.0}};
        std::vector<int> depth{0};
        while (!stack.empty()) {
            const auto [va, vb] = stack.back();
            stack.pop_back();
            const int d = depth.back();
            depth.pop_back();
            const double len = p.length * (vb - va);
            const double dist = detail::point_segment_distance(x, p.point(va), p.point(vb));
            if (d < opts.max_depth && dist < 2.0 * len) {
                const double vm = 0.5 * (va + vb);
                stack.push_back({va, vm});
                stack.push_back({vm, vb});
                depth.push_back(d + 1);
                depth.push_back(d + 1);
                continue;
            }
            for (int q = 0; q < gauss.size(); ++q) {
                const double v = va + (vb - va) * gauss.points[q];
                const Vec2 y = p.point(v);
                const Vec2 diff = x - y;
                const double r = diff.norm();
                const K01 bes = bessel_k01(s.root() * r);
                const double wq = gauss.weights[q] * len / (2.0 * M_PI);
                const Complex gval = wq * bes.k0;
                const Complex dlval = wq * s.root() * bes.k1 / r * p.normal.dot(diff);
                spaces.eval_X(v, xv.data());
                spaces.eval_Y(v, yv.data(), nullptr);
                for (int b = 0; b < mx; ++b) srow(spaces.x_global(j, b)) += gval * xv[b];
                for (int b = 0; b < my; ++b) drow(spaces.y_global(j, b)) += dlval * yv[b];
            }
        }
    }
}

enum class PotentialKind { SingleLayer, DoubleLayer };

inline Eigen::MatrixXcd potential_eval_matrix(PotentialKind which, const LaplaceFrequency& s,
                                              const TraceSpacePair& spaces,
                                              const std::vector<Vec2>& points,
                                              const AssemblyOptions& opts = {}) {
    const int cols = which == PotentialKind::SingleLayer ? spaces.dim_X() : spaces.dim_Y();
    Eigen::MatrixXcd mat(static_cast<int>(points.size()), cols);
    Eigen::RowVectorXcd srow, drow;
    for (size_t i = 0; i < points.size(); ++i) {
        potential_rows(spaces, s, points[i], srow, drow, opts);
        mat.row(static_cast<int>(i)) = which == PotentialKind::SingleLayer ? srow : drow;
    }
    return mat;
}

}  // namespace heatcq
