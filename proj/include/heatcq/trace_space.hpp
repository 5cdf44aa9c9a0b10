#pragma once

// Discrete trace spaces on a panel mesh:
//   X_h: discontinuous polynomials of degree p (per-panel shifted-Legendre
//        modal basis), a subspace of H^{-1/2}(Gamma);
//   Y_h: globally continuous piecewise polynomials of degree p+1 (Lagrange
//        basis at Gauss-Lobatto nodes, corner nodes shared), in H^{1/2}(Gamma).
// Both have dimension (p+1) * #panels on a closed curve.

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "heatcq/geometry.hpp"
#include "heatcq/quadrature.hpp"

namespace heatcq {

class TraceSpacePair {
  public:
    TraceSpacePair(const BoundaryMesh& mesh, int p)
        : mesh_(&mesh), p_(p), smooth_rule_(gauss_legendre(p + 4)) {
        if (p < 0) throw std::invalid_argument("TraceSpacePair: degree must be >= 0");
        const QuadratureRule gll = gauss_lobatto(p + 2);
        y_nodes_ = gll.points;
        // Barycentric weights for the Y_h nodal basis on [0, 1].
        const int m = nodes_per_panel();
        y_bary_.assign(m, 1.0);
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                if (k != j) y_bary_[j] /= (y_nodes_[j] - y_nodes_[k]);
        // Nodal differentiation matrix, used when an evaluation point hits a node.
        y_diff_.resize(m, m);
        for (int i = 0; i < m; ++i) {
            double row = 0.0;
            for (int j = 0; j < m; ++j) {
                if (i == j) continue;
                y_diff_(i, j) = y_bary_[j] / y_bary_[i] / (y_nodes_[i] - y_nodes_[j]);
                row += y_diff_(i, j);
            }
            y_diff_(i, i) = -row;
        }
    }

    [[nodiscard]] const BoundaryMesh& mesh() const { return *mesh_; }
    [[nodiscard]] int degree() const { return p_; }
    [[nodiscard]] int dim_X() const { return (p_ + 1) * mesh_->num_panels(); }
    [[nodiscard]] int dim_Y() const { return (p_ + 1) * mesh_->num_panels(); }
    [[nodiscard]] int modes_per_panel() const { return p_ + 1; }
    [[nodiscard]] int nodes_per_panel() const { return p_ + 2; }
    [[nodiscard]] const QuadratureRule& smooth_rule() const { return smooth_rule_; }

    [[nodiscard]] int x_global(int panel, int mode) const { return panel * (p_ + 1) + mode; }

    // Panel-local Y node -> global DOF.  Each panel owns its start vertex and
    // its p interior nodes; the end vertex belongs to the next panel.
    [[nodiscard]] int y_global(int panel, int local) const {
        const int n = mesh_->num_panels();
        if (local == p_ + 1) return ((panel + 1) % n) * (p_ + 1);
        return panel * (p_ + 1) + local;
    }

    // Shifted-Legendre values P~_a(u), a = 0..p, at reference coordinate u.
    void eval_X(double u, double* vals) const {
        const double x = 2.0 * u - 1.0;
        vals[0] = 1.0;
        if (p_ >= 1) vals[1] = x;
        for (int a = 2; a <= p_; ++a)
            vals[a] = ((2.0 * a - 1.0) * x * vals[a - 1] - (a - 1.0) * vals[a - 2]) / a;
    }

    // Lagrange values and reference derivatives of the p+2 Y_h panel basis
    // functions at u; derivatives are with respect to u (divide by the panel
    // length for arclength derivatives).
    void eval_Y(double u, double* vals, double* derivs) const {
        const int m = nodes_per_panel();
        int hit = -1;
        for (int j = 0; j < m; ++j)
            if (std::abs(u - y_nodes_[j]) < 1e-13) hit = j;
        if (hit >= 0) {
            for (int j = 0; j < m; ++j) {
                vals[j] = (j == hit) ? 1.0 : 0.0;
                if (derivs) derivs[j] = y_diff_(hit, j);
            }
            return;
        }
        double q = 0.0, dq = 0.0;
        for (int k = 0; k < m; ++k) {
            q += y_bary_[k] / (u - y_nodes_[k]);
            dq -= y_bary_[k] / ((u - y_nodes_[k]) * (u - y_nodes_[k]));
        }
        for (int j = 0; j < m; ++j) {
            const double nj = y_bary_[j] / (u - y_nodes_[j]);
            const double dnj = -y_bary_[j] / ((u - y_nodes_[j]) * (u - y_nodes_[j]));
            vals[j] = nj / q;
            if (derivs) derivs[j] = (dnj * q - nj * dq) / (q * q);
        }
    }

    // L2(Gamma) Gram of X_h: block diagonal with diag(L_i / (2a + 1)).
    [[nodiscard]] Eigen::MatrixXd gram_X() const {
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim_X(), dim_X());
        for (int i = 0; i < mesh_->num_panels(); ++i)
            for (int a = 0; a <= p_; ++a)
                g(x_global(i, a), x_global(i, a)) = mesh_->panel(i).length / (2.0 * a + 1.0);
        return g;
    }

    [[nodiscard]] Eigen::MatrixXd gram_Y() const {
        const int m = nodes_per_panel();
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim_Y(), dim_Y());
        std::vector<double> vals(m);
        for (int i = 0; i < mesh_->num_panels(); ++i) {
            Eigen::MatrixXd local = Eigen::MatrixXd::Zero(m, m);
            for (int q = 0; q < smooth_rule_.size(); ++q) {
                eval_Y(smooth_rule_.points[q], vals.data(), nullptr);
                const double w = smooth_rule_.weights[q] * mesh_->panel(i).length;
                for (int a = 0; a < m; ++a)
                    for (int b = 0; b < m; ++b) local(a, b) += w * vals[a] * vals[b];
            }
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) g(y_global(i, a), y_global(i, b)) += local(a, b);
        }
        return g;
    }

    // Duality matrix M_{ij} = <mu_i, phi_j> between X_h and Y_h.
    [[nodiscard]] Eigen::MatrixXd duality() const {
        Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(dim_X(), dim_Y());
        const int m = nodes_per_panel();
        std::vector<double> xv(p_ + 1), yv(m);
        for (int i = 0; i < mesh_->num_panels(); ++i) {
            for (int q = 0; q < smooth_rule_.size(); ++q) {
                const double u = smooth_rule_.points[q];
                eval_X(u, xv.data());
                eval_Y(u, yv.data(), nullptr);
                const double w = smooth_rule_.weights[q] * mesh_->panel(i).length;
                for (int a = 0; a <= p_; ++a)
                    for (int b = 0; b < m; ++b)
                        mat(x_global(i, a), y_global(i, b)) += w * xv[a] * yv[b];
            }
        }
        return mat;
    }

    // L2 load vector of f against the X_h basis; f(panel, u, point).
    template <typename Scalar, typename F>
    [[nodiscard]] Eigen::Vector<Scalar, Eigen::Dynamic> load_X(F&& f) const {
        Eigen::Vector<Scalar, Eigen::Dynamic> load =
            Eigen::Vector<Scalar, Eigen::Dynamic>::Zero(dim_X());
        std::vector<double> xv(p_ + 1);
        for (int i = 0; i < mesh_->num_panels(); ++i) {
            for (int q = 0; q < smooth_rule_.size(); ++q) {
                const double u = smooth_rule_.points[q];
                eval_X(u, xv.data());
                const Scalar val = f(i, u, mesh_->point(i, u));
                const double w = smooth_rule_.weights[q] * mesh_->panel(i).length;
                for (int a = 0; a <= p_; ++a) load(x_global(i, a)) += w * xv[a] * val;
            }
        }
        return load;
    }

    template <typename Scalar, typename F>
    [[nodiscard]] Eigen::Vector<Scalar, Eigen::Dynamic> load_Y(F&& f) const {
        Eigen::Vector<Scalar, Eigen::Dynamic> load =
            Eigen::Vector<Scalar, Eigen::Dynamic>::Zero(dim_Y());
        const int m = nodes_per_panel();
        std::vector<double> yv(m);
        for (int i = 0; i < mesh_->num_panels(); ++i) {
            for (int q = 0; q < smooth_rule_.size(); ++q) {
                const double u = smooth_rule_.points[q];
                eval_Y(u, yv.data(), nullptr);
                const Scalar val = f(i, u, mesh_->point(i, u));
                const double w = smooth_rule_.weights[q] * mesh_->panel(i).length;
                for (int b = 0; b < m; ++b) load(y_global(i, b)) += w * yv[b] * val;
            }
        }
        return load;
    }

    // L2 projections: solve Gram c = load.  X_h's Gram is diagonal; Y_h's is
    // solved densely (problem sizes stay small).
    template <typename Scalar, typename F>
    [[nodiscard]] Eigen::Vector<Scalar, Eigen::Dynamic> project_X(F&& f) const {
        auto load = load_X<Scalar>(std::forward<F>(f));
        for (int i = 0; i < mesh_->num_panels(); ++i)
            for (int a = 0; a <= p_; ++a)
                load(x_global(i, a)) *= (2.0 * a + 1.0) / mesh_->panel(i).length;
        return load;
    }

    template <typename Scalar, typename F>
    [[nodiscard]] Eigen::Vector<Scalar, Eigen::Dynamic> project_Y(F&& f) const {
        const auto load = load_Y<Scalar>(std::forward<F>(f));
        const auto ldlt = gram_Y().ldlt();
        if constexpr (std::is_same_v<Scalar, std::complex<double>>) {
            const Eigen::VectorXd re = ldlt.solve(load.real().eval());
            const Eigen::VectorXd im = ldlt.solve(load.imag().eval());
            Eigen::VectorXcd out(dim_Y());
            for (int i = 0; i < dim_Y(); ++i) out(i) = std::complex<double>(re(i), im(i));
            return out;
        } else {
            return ldlt.solve(load);
        }
    }

    // Pointwise evaluation of a discrete function from its coefficients.
    template <typename Scalar>
    [[nodiscard]] Scalar eval_X_function(const Eigen::Vector<Scalar, Eigen::Dynamic>& c, int panel,
                                         double u) const {
        std::vector<double> xv(p_ + 1);
        eval_X(u, xv.data());
        Scalar out{};
        for (int a = 0; a <= p_; ++a) out += c(x_global(panel, a)) * xv[a];
        return out;
    }

    template <typename Scalar>
    [[nodiscard]] Scalar eval_Y_function(const Eigen::Vector<Scalar, Eigen::Dynamic>& c, int panel,
                                         double u) const {
        const int m = nodes_per_panel();
        std::vector<double> yv(m);
        eval_Y(u, yv.data(), nullptr);
        Scalar out{};
        for (int b = 0; b < m; ++b) out += c(y_global(panel, b)) * yv[b];
        return out;
    }

  private:
    const BoundaryMesh* mesh_;
    int p_;
    QuadratureRule smooth_rule_;       // Gauss-Legendre with p+4 points
    std::vector<double> y_nodes_;      // Gauss-Lobatto nodes on [0, 1]
    std::vector<double> y_bary_;       // barycentric weights
    Eigen::MatrixXd y_diff_;           // nodal differentiation matrix
};

// sqrt(Re v^H G v) for a real symmetric positive (semi)definite norm matrix G.
template <typename Scalar>
[[nodiscard]] inline double energy_norm(const Eigen::MatrixXd& g,
                                        const Eigen::Vector<Scalar, Eigen::Dynamic>& v) {
    if (g.rows() != v.size()) throw std::invalid_argument("energy_norm: dimension mismatch");
    if constexpr (std::is_same_v<Scalar, std::complex<double>>) {
        const Eigen::VectorXd re = v.real();
        const Eigen::VectorXd im = v.imag();
        const double q = re.dot(g * re) + im.dot(g * im);
        return std::sqrt(std::max(0.0, q));
    } else {
        return std::sqrt(std::max(0.0, v.dot(g * v)));
    }
}

// Discrete realizations of the trace norms: L2 Grams plus the V(1) energy
// (H^{-1/2}) and W(1) + L2 energy (H^{1/2}); the operator parts are filled in
// by the assembly module.
struct DiscreteNormOperators {
    Eigen::MatrixXd gram_x;      // L2 on X_h
    Eigen::MatrixXd gram_y;      // L2 on Y_h
    Eigen::MatrixXd hminushalf;  // Re V(1) on X_h
    Eigen::MatrixXd hhalf;       // Re W(1) + L2 on Y_h
};

}  // namespace heatcq
