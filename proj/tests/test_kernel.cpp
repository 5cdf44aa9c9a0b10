#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "heatcq/kernel.hpp"

using namespace heatcq;

TEST_CASE("fundamental solution satisfies (Delta - s) G = 0 away from the source",
          "[kernel]") {
    const Vec2 y(0.2, -0.1);
    for (const Complex sval : {Complex(1.0, 0.0), Complex(2.0, 3.0), Complex(0.3, -1.2)}) {
        const LaplaceFrequency s(sval);
        const Vec2 x(1.1, 0.7);
        const double h = 1e-4;
        const Complex center = fundamental_solution(s, x, y);
        const Complex lap =
            (fundamental_solution(s, x + Vec2(h, 0), y) + fundamental_solution(s, x - Vec2(h, 0), y) +
             fundamental_solution(s, x + Vec2(0, h), y) + fundamental_solution(s, x - Vec2(0, h), y) -
             4.0 * center) /
            (h * h);
        REQUIRE(std::abs(lap - sval * center) <= 1e-5 * std::abs(sval * center));
    }
}

TEST_CASE("gradient of the fundamental solution matches finite differences", "[kernel]") {
    const LaplaceFrequency s(Complex(2.0, 3.0));
    const Vec2 x(0.9, 0.4), y(0.1, -0.2);
    const double h = 1e-6;
    const Vec2c grad = grad_y_fundamental_solution(s, x, y);
    const Complex ddx =
        (fundamental_solution(s, x, y + Vec2(h, 0)) - fundamental_solution(s, x, y - Vec2(h, 0))) /
        (2.0 * h);
    const Complex ddy =
        (fundamental_solution(s, x, y + Vec2(0, h)) - fundamental_solution(s, x, y - Vec2(0, h))) /
        (2.0 * h);
    REQUIRE(std::abs(grad(0) - ddx) <= 1e-8 * std::abs(ddx));
    REQUIRE(std::abs(grad(1) - ddy) <= 1e-8 * std::abs(ddy));
}

TEST_CASE("LaplaceFrequency takes the principal square root and rejects the cut", "[kernel]") {
    std::mt19937 rng(424242);
    std::uniform_real_distribution<double> re(-50.0, 50.0), im(-50.0, 50.0);
    int admissible = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Complex s(re(rng), im(rng));
        if (s.imag() == 0.0 && s.real() <= 0.0) continue;
        const LaplaceFrequency f(s);
        REQUIRE(f.root().real() > 0.0);
        REQUIRE(std::abs(f.root() * f.root() - s) <= 1e-12 * std::abs(s));
        ++admissible;
    }
    REQUIRE(admissible == 1000);
    REQUIRE_THROWS_AS(LaplaceFrequency(Complex(-2.0, 0.0)), std::domain_error);
    REQUIRE_THROWS_AS(LaplaceFrequency(Complex(0.0, 0.0)), std::domain_error);
}

TEST_CASE("coincident evaluation points are rejected", "[kernel]") {
    const LaplaceFrequency s(Complex(1.0, 0.0));
    const Vec2 x(0.3, 0.3);
    REQUIRE_THROWS_AS(fundamental_solution(s, x, x), std::domain_error);
}

TEST_CASE("heat kernel: causality, normalization, and the heat equation", "[kernel]") {
    const double m = 0.8;
    const Vec2 src(0.0, 0.0);
    REQUIRE(heat_kernel_time(m, Vec2(1.0, 1.0), src, 0.0) == 0.0);
    REQUIRE(heat_kernel_time(m, Vec2(1.0, 1.0), src, -0.5) == 0.0);

    // Mass over a disk of radius R: 1 - exp(-R^2 / (4 m t)) in closed form;
    // verify by polar-grid quadrature.
    const double t = 0.3, radius = 3.0;
    const int nr = 4000, na = 64;
    double mass = 0.0;
    for (int ir = 0; ir < nr; ++ir) {
        const double r = (ir + 0.5) * radius / nr;
        for (int ia = 0; ia < na; ++ia) {
            const double a = 2.0 * M_PI * ia / na;
            mass += heat_kernel_time(m, Vec2(r * std::cos(a), r * std::sin(a)), src, t) * r *
                    (radius / nr) * (2.0 * M_PI / na);
        }
    }
    const double expected = 1.0 - std::exp(-radius * radius / (4.0 * m * t));
    REQUIRE_THAT(mass, Catch::Matchers::WithinAbs(expected, 1e-6));

    // d_t u = m Delta u by finite differences.
    const Vec2 x(0.4, -0.3);
    const double h = 1e-4, dt = 1e-6;
    const double ut =
        (heat_kernel_time(m, x, src, t + dt) - heat_kernel_time(m, x, src, t - dt)) / (2.0 * dt);
    const double lap = (heat_kernel_time(m, x + Vec2(h, 0), src, t) +
                        heat_kernel_time(m, x - Vec2(h, 0), src, t) +
                        heat_kernel_time(m, x + Vec2(0, h), src, t) +
                        heat_kernel_time(m, x - Vec2(0, h), src, t) -
                        4.0 * heat_kernel_time(m, x, src, t)) /
                       (h * h);
    REQUIRE_THAT(ut, Catch::Matchers::WithinRel(m * lap, 1e-6));
}

TEST_CASE("heat kernel normal derivative matches finite differences", "[kernel]") {
    const double m = 1.3, t = 0.2;
    const Vec2 src(-0.5, 0.2), x(0.7, 0.9);
    const Vec2 nu = Vec2(0.6, 0.8);
    const double h = 1e-6;
    const double fd =
        (heat_kernel_time(m, x + h * nu, src, t) - heat_kernel_time(m, x - h * nu, src, t)) /
        (2.0 * h);
    REQUIRE_THAT(heat_kernel_normal_derivative(m, x, src, nu, t),
                 Catch::Matchers::WithinRel(fd, 1e-8));
}
