#pragma once

// One-dimensional quadrature rules on the reference interval [0, 1]:
// Gauss-Legendre (weight 1), Gauss-Lobatto (weight 1, endpoints included)
// and log-Gauss (weight log(1/x)), the building blocks for smooth and
// weakly singular panel integration.

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace heatcq {

struct QuadratureRule {
    std::vector<double> points;   // ascending, inside [0, 1]
    std::vector<double> weights;  // positive, summing to the weight-function mass

    [[nodiscard]] int size() const { return static_cast<int>(points.size()); }
};

namespace detail {

// Legendre P_n(x) and P_n'(x) on [-1, 1] by the three-term recurrence.
inline std::pair<double, double> legendre_with_derivative(int n, double x) {
    double p0 = 1.0, p1 = x;
    if (n == 0) return {1.0, 0.0};
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    const double dp = n * (x * p1 - p0) / (x * x - 1.0);
    return {p1, dp};
}

}  // namespace detail

// Gauss-Legendre rule with n points, exact for polynomials of degree 2n-1.
inline QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
    QuadratureRule rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Tricomi initial guess, then Newton on P_n; converges in a few steps.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 60; ++it) {
            const auto [p, d] = detail::legendre_with_derivative(n, x);
            dp = d;
            const double dx = p / d;
            x -= dx;
            if (std::abs(dx) < 1e-15) {
                dp = detail::legendre_with_derivative(n, x).second;
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Mirror to ascending order and map [-1,1] -> [0,1].
        rule.points[n - 1 - i] = 0.5 * (x + 1.0);
        rule.weights[n - 1 - i] = 0.5 * w;
    }
    return rule;
}

// Gauss-Lobatto rule with n >= 2 points including both endpoints; exact for
// polynomials of degree 2n-3.  Used for the nodal basis of the continuous
// trace space (shared corner nodes) and endpoint-sensitive checks.
inline QuadratureRule gauss_lobatto(int n) {
    if (n < 2) throw std::invalid_argument("gauss_lobatto: need n >= 2");
    QuadratureRule rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    const int m = n - 1;  // interior nodes are the roots of P_m'
    rule.points.front() = 0.0;
    rule.points.back() = 1.0;
    const double w_end = 2.0 / (n * m);
    rule.weights.front() = 0.5 * w_end;
    rule.weights.back() = 0.5 * w_end;
    for (int i = 1; i < m; ++i) {
        // Interlacing initial guess between Chebyshev-like extrema.
        double x = std::cos(M_PI * i / m);
        for (int it = 0; it < 80; ++it) {
            // P_m'(x) root search: derivative of P_m', via the ODE
            // (1-x^2) P_m'' = 2x P_m' - m(m+1) P_m.
            const auto [p, d] = detail::legendre_with_derivative(m, x);
            const double dd = (2.0 * x * d - m * (m + 1.0) * p) / (1.0 - x * x);
            const double dx = d / dd;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double p = detail::legendre_with_derivative(m, x).first;
        rule.points[n - 1 - i] = 0.5 * (x + 1.0);
        rule.weights[n - 1 - i] = 0.5 * 2.0 / (n * m * p * p);
    }
    return rule;
}

// Gaussian rule for the weight log(1/x) on (0, 1): integrates
// int_0^1 f(x) log(1/x) dx exactly for f of degree 2n-1.  Built by the
// modified Chebyshev algorithm with monic shifted-Legendre modified moments
// followed by Golub-Welsch.
inline QuadratureRule log_gauss(int n) {
    if (n < 1) throw std::invalid_argument("log_gauss: need n >= 1");
    const int nm = 2 * n;
    // Modified moments of log(1/x) against the monic shifted-Legendre
    // polynomials pi_k: m_0 = 1, m_k = (-1)^k / (k (k+1) binom(2k, k)).
    std::vector<double> mom(nm);
    mom[0] = 1.0;
    double binom = 1.0;  // binom(2k, k)
    for (int k = 1; k < nm; ++k) {
        binom *= (2.0 * k) * (2.0 * k - 1.0) / (static_cast<double>(k) * k);
        mom[k] = ((k % 2 == 0) ? 1.0 : -1.0) / (k * (k + 1.0) * binom);
    }
    // Monic shifted-Legendre recurrence coefficients on [0, 1].
    std::vector<double> a(nm, 0.5), b(nm, 0.0);
    for (int k = 1; k < nm; ++k) b[k] = k * k / (4.0 * (4.0 * k * k - 1.0));

    // Modified Chebyshev: recover the recurrence (alpha_k, beta_k) of the
    // orthogonal polynomials of the log weight from the modified moments.
    std::vector<double> alpha(n), beta(n);
    std::vector<double> sig_prev2(nm, 0.0), sig_prev = mom, sig(nm, 0.0);
    alpha[0] = a[0] + mom[1] / mom[0];
    beta[0] = mom[0];
    for (int k = 1; k < n; ++k) {
        std::fill(sig.begin(), sig.end(), 0.0);
        for (int l = k; l < nm - k; ++l) {
            sig[l] = sig_prev[l + 1] - (alpha[k - 1] - a[l]) * sig_prev[l] -
                     beta[k - 1] * sig_prev2[l] + b[l] * sig_prev[l - 1];
        }
        alpha[k] = a[k] + sig[k + 1] / sig[k] - sig_prev[k] / sig_prev[k - 1];
        beta[k] = sig[k] / sig_prev[k - 1];
        sig_prev2 = sig_prev;
        sig_prev = sig;
    }

    // Golub-Welsch: eigen-decompose the symmetric Jacobi matrix.
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        jacobi(k, k) = alpha[k];
        if (k + 1 < n) {
            const double off = std::sqrt(beta[k + 1]);
            jacobi(k, k + 1) = off;
            jacobi(k + 1, k) = off;
        }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("log_gauss: Jacobi eigensolve failed");
    QuadratureRule rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.points[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        rule.weights[i] = beta[0] * v0 * v0;
    }
    return rule;
}

}  // namespace heatcq
