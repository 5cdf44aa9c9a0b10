#pragma once

// Laplace-domain fundamental solution of the heat equation in 2D (the
// modified Helmholtz kernel) and the time-domain heat kernel used by
// manufactured solutions.

#include <cmath>
#include <complex>

#include "heatcq/bessel.hpp"
#include "heatcq/errors.hpp"
#include "heatcq/geometry.hpp"

namespace heatcq {

using Vec2c = Eigen::Vector2cd;

// A Laplace frequency s restricted to C* = C \ (-inf, 0], with the principal
// square root (Re sqrt(s) > 0) cached.
class LaplaceFrequency {
  public:
    explicit LaplaceFrequency(const Complex& s) : s_(s), root_(std::sqrt(s)) {
        if (s.imag() == 0.0 && s.real() <= 0.0)
            throw std::domain_error("LaplaceFrequency: s on the closed negative real axis");
    }

    [[nodiscard]] const Complex& value() const { return s_; }
    [[nodiscard]] const Complex& root() const { return root_; }

  private:
    Complex s_;
    Complex root_;  // principal branch; Re > 0 on C*
};

namespace detail {

inline double checked_distance(const Vec2& x, const Vec2& y) {
    const double r = (x - y).norm();
    const double scale = std::max({1.0, x.norm(), y.norm()});
    if (r < 1e-14 * scale)
        throw std::domain_error("fundamental_solution: evaluation at the singular point x = y");
    return r;
}

}  // namespace detail

// G(s; x, y) = (1/2pi) K0(sqrt(s) |x - y|), the kernel of Delta U - s U = 0.
inline Complex fundamental_solution(const LaplaceFrequency& s, const Vec2& x, const Vec2& y) {
    const double r = detail::checked_distance(x, y);
    return bessel_k01(s.root() * r).k0 / (2.0 * M_PI);
}

// grad_y G = (1/2pi) sqrt(s) K1(sqrt(s) r) (x - y)/r; dotted with nu(y) this
// is the double-layer kernel.
inline Vec2c grad_y_fundamental_solution(const LaplaceFrequency& s, const Vec2& x, const Vec2& y) {
    const double r = detail::checked_distance(x, y);
    const Complex factor = s.root() * bessel_k01(s.root() * r).k1 / (2.0 * M_PI * r);
    return Vec2c(factor * (x.x() - y.x()), factor * (x.y() - y.y()));
}

// 2D heat kernel G_m(x - x_src, t) = exp(-|x - x_src|^2/(4mt)) / (4 pi m t),
// extended causally by zero for t <= 0.
inline double heat_kernel_time(double m, const Vec2& x, const Vec2& x_src, double t) {
    if (!(m > 0.0)) throw std::domain_error("heat_kernel_time: need m > 0");
    if (t <= 0.0) return 0.0;
    const double r2 = (x - x_src).squaredNorm();
    return std::exp(-r2 / (4.0 * m * t)) / (4.0 * M_PI * m * t);
}

// Normal derivative of the heat kernel with respect to x.
inline double heat_kernel_normal_derivative(double m, const Vec2& x, const Vec2& x_src,
                                            const Vec2& nu, double t) {
    if (t <= 0.0) return 0.0;
    const Vec2 d = x - x_src;
    return heat_kernel_time(m, x, x_src, t) * (-d.dot(nu) / (2.0 * m * t));
}

}  // namespace heatcq
