#pragma once

// Modified Bessel functions K0, K1 for complex arguments in the right half
// plane, plus the analytic pieces of their logarithmic splits used by the
// weakly singular panel quadrature.
//
// Evaluation strategy: ascending power series (with log term) for |z| <= 2,
// Steed continued fraction (CF2) for |z| > 2.  Relative accuracy is at
// machine level across |z| in [1e-8, 700]; for Re z > 700 the value
// underflows and 0 is returned.

#include <cmath>
#include <complex>
#include <stdexcept>

namespace heatcq {

using Complex = std::complex<double>;

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

struct K01 {
    Complex k0, k1;
};

namespace detail {

inline K01 k01_series(const Complex& z) {
    const Complex q = 0.25 * z * z;
    const Complex lg = std::log(0.5 * z);
    Complex t0 = 1.0, s0 = 1.0;       // I0 terms
    Complex t1 = 1.0, s1 = 1.0;       // I1 terms (z/2 factored out)
    Complex tk = 1.0, sk = 0.0;       // K0 harmonic sum
    Complex tk1 = 1.0;                // K1 sum terms
    Complex sk1 = 1.0 - 2.0 * euler_gamma;
    double hk = 0.0, hk1 = 1.0;
    for (int k = 1; k < 64; ++k) {
        t0 *= q / static_cast<double>(k * k);
        s0 += t0;
        t1 *= q / static_cast<double>(k * (k + 1));
        s1 += t1;
        hk += 1.0 / k;
        tk *= q / static_cast<double>(k * k);
        sk += hk * tk;
        hk1 += 1.0 / (k + 1);
        tk1 *= q / static_cast<double>(k * (k + 1));
        sk1 += (hk + hk1 - 2.0 * euler_gamma) * tk1;
        if (std::abs(t0) < 1e-18 * std::abs(s0) && std::abs(tk1) < 1e-18) break;
    }
    const Complex i0 = s0;
    const Complex i1 = 0.5 * z * s1;
    K01 out;
    out.k0 = -(lg + euler_gamma) * i0 + sk;
    out.k1 = 1.0 / z + lg * i1 - 0.25 * z * sk1;
    return out;
}

// Steed/Thompson-Barnett CF2 for K0, K1 (order nu = 0 pair); valid away from
// the origin, here used for |z| > 2 where it converges in O(|z|) steps.
inline K01 k01_continued_fraction(const Complex& z) {
    Complex b = 2.0 * (1.0 + z);
    Complex d = 1.0 / b;
    Complex h = d, delh = d;
    Complex q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25;
    Complex qq = a1, c = a1;
    double a = -a1;
    Complex s = 1.0 + qq * delh;
    for (int i = 2; i <= 1000; ++i) {
        a -= 2.0 * (i - 1);
        c = -a * c / static_cast<double>(i);
        const Complex qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        qq += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const Complex ds = qq * delh;
        s += ds;
        if (std::abs(ds) < std::abs(s) * 1e-17) break;
    }
    h = a1 * h;
    K01 out;
    out.k0 = std::sqrt(M_PI / (2.0 * z)) * std::exp(-z) / s;
    out.k1 = out.k0 * (z + 0.5 - h) / z;
    return out;
}

}  // namespace detail

// K0(z) and K1(z) together (they share nearly all the work).
inline K01 bessel_k01(const Complex& z) {
    if (!(z.real() > 0.0)) throw std::domain_error("bessel_k01: need Re z > 0");
    if (z.real() > 700.0) return {0.0, 0.0};  // exp(-z) underflow region
    if (std::abs(z) <= 2.0) return detail::k01_series(z);
    return detail::k01_continued_fraction(z);
}

inline Complex bessel_k(int order, const Complex& z) {
    const K01 both = bessel_k01(z);
    if (order == 0) return both.k0;
    if (order == 1) return both.k1;
    throw std::invalid_argument("bessel_k: order must be 0 or 1");
}

// I0(sqrt(w)) as an entire function of w; used with w = s r^2 so that no
// square root of the panel distance is needed.
inline Complex bessel_i0_sq(const Complex& w) {
    Complex t = 1.0, sum = 1.0;
    for (int k = 1; k < 64; ++k) {
        t *= 0.25 * w / static_cast<double>(k * k);
        sum += t;
        if (std::abs(t) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

// 2 I1(sqrt(w)) / sqrt(w) as an entire function of w.
inline Complex bessel_i1tilde_sq(const Complex& w) {
    Complex t = 1.0, sum = 1.0;
    for (int k = 1; k < 64; ++k) {
        t *= 0.25 * w / static_cast<double>(k * (k + 1));
        sum += t;
        if (std::abs(t) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

// Log split of K0: K0(sqrt(s) r) = -log(r) I0(sqrt(s) r) + remainder, with
// the remainder analytic in r^2.  Arguments: s and r2 = r^2.
inline Complex k0_log_remainder(const Complex& s, const Complex& sqrt_s, double r2) {
    const Complex w = s * r2;
    Complex t0 = 1.0, i0 = 1.0;
    Complex tk = 1.0, sk = 0.0;
    double hk = 0.0;
    for (int k = 1; k < 64; ++k) {
        const Complex f = 0.25 * w / static_cast<double>(k * k);
        t0 *= f;
        i0 += t0;
        hk += 1.0 / k;
        tk *= f;
        sk += hk * tk;
        if (std::abs(t0) < 1e-18 * std::abs(i0)) break;
    }
    return -(std::log(0.5 * sqrt_s) + euler_gamma) * i0 + sk;
}

// Log split of the double-layer radial factor:
//   sqrt(s) K1(sqrt(s) r) / r = 1/r^2 + (s/2) Itilde(s r^2) log(r) + remainder,
// remainder analytic in r^2 (Itilde as in bessel_i1tilde_sq).
inline Complex k1_smooth_remainder(const Complex& s, const Complex& sqrt_s, double r2) {
    const Complex w = s * r2;
    Complex t = 1.0, itld = 1.0;
    double hk = 0.0, hk1 = 1.0;
    Complex sum = (hk + hk1 - 2.0 * euler_gamma) * t;
    for (int k = 1; k < 64; ++k) {
        t *= 0.25 * w / static_cast<double>(k * (k + 1));
        itld += t;
        hk += 1.0 / k;
        hk1 += 1.0 / (k + 1);
        sum += (hk + hk1 - 2.0 * euler_gamma) * t;
        if (std::abs(t) < 1e-18 * std::abs(itld)) break;
    }
    return 0.5 * s * std::log(0.5 * sqrt_s) * itld - 0.25 * s * sum;
}

}  // namespace heatcq
