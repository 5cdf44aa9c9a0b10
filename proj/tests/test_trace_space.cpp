#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <Eigen/Dense>

#include "heatcq/geometry.hpp"
#include "heatcq/trace_space.hpp"

using namespace heatcq;

namespace {

double smooth_scalar(const Vec2& x) { return std::sin(1.3 * x.x()) * std::cosh(0.7 * x.y()); }

}  // namespace

TEST_CASE("space dimensions are (p+1) panels for both X_h and Y_h", "[trace_space]") {
    const BoundaryMesh mesh = mesh_polygon(paper_quadrilateral(), 0.3);
    for (int p : {0, 1, 2, 4}) {
        const TraceSpacePair spaces(mesh, p);
        REQUIRE(spaces.dim_X() == (p + 1) * mesh.num_panels());
        REQUIRE(spaces.dim_Y() == (p + 1) * mesh.num_panels());
        REQUIRE(spaces.modes_per_panel() == p + 1);
        REQUIRE(spaces.nodes_per_panel() == p + 2);
    }
}

TEST_CASE("X_h Gram assembled by quadrature equals the closed form", "[trace_space]") {
    const BoundaryMesh mesh = mesh_polygon(paper_quadrilateral(), 0.4);
    const TraceSpacePair spaces(mesh, 3);
    const Eigen::MatrixXd g = spaces.gram_X();
    // Oracle: quadrature of the shifted-Legendre products on each panel.
    const QuadratureRule rule = gauss_legendre(8);
    std::vector<double> vals(4);
    for (int i = 0; i < mesh.num_panels(); ++i) {
        Eigen::MatrixXd local = Eigen::MatrixXd::Zero(4, 4);
        for (int q = 0; q < rule.size(); ++q) {
            spaces.eval_X(rule.points[q], vals.data());
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b)
                    local(a, b) += rule.weights[q] * mesh.panel(i).length * vals[a] * vals[b];
        }
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                const double expected = a == b ? mesh.panel(i).length / (2.0 * a + 1.0) : 0.0;
                REQUIRE_THAT(local(a, b), Catch::Matchers::WithinAbs(expected, 1e-13));
                REQUIRE_THAT(g(spaces.x_global(i, a), spaces.x_global(i, b)),
                             Catch::Matchers::WithinAbs(expected, 1e-13));
            }
    }
}

TEST_CASE("Y_h basis: partition of unity and continuity across panels", "[trace_space]") {
    const BoundaryMesh mesh = mesh_polygon(paper_quadrilateral(), 0.3);
    const TraceSpacePair spaces(mesh, 2);
    const int m = spaces.nodes_per_panel();
    std::vector<double> vals(m), derivs(m);
    for (double u : {0.0, 0.17, 0.333333333333, 0.5, 0.99, 1.0}) {
        spaces.eval_Y(u, vals.data(), derivs.data());
        double sum = 0.0, dsum = 0.0;
        for (int j = 0; j < m; ++j) {
            sum += vals[j];
            dsum += derivs[j];
        }
        REQUIRE_THAT(sum, Catch::Matchers::WithinAbs(1.0, 1e-12));
        REQUIRE_THAT(dsum, Catch::Matchers::WithinAbs(0.0, 1e-10));
    }
    // A discrete Y_h function is continuous at panel junctions.
    Eigen::VectorXd coeff(spaces.dim_Y());
    for (int i = 0; i < spaces.dim_Y(); ++i) coeff(i) = std::sin(0.7 * i) + 0.2 * i;
    for (int i = 0; i < mesh.num_panels(); ++i) {
        const int next = (i + 1) % mesh.num_panels();
        const double left = spaces.eval_Y_function<double>(coeff, i, 1.0);
        const double right = spaces.eval_Y_function<double>(coeff, next, 0.0);
        REQUIRE_THAT(left, Catch::Matchers::WithinAbs(right, 1e-12));
    }
}

TEST_CASE("projections are idempotent on discrete functions", "[trace_space]") {
    const BoundaryMesh mesh = mesh_polygon(paper_quadrilateral(), 0.4);
    const TraceSpacePair spaces(mesh, 2);
    Eigen::VectorXd cx(spaces.dim_X()), cy(spaces.dim_Y());
    for (int i = 0; i < cx.size(); ++i) cx(i) = std::cos(0.3 * i);
    for (int i = 0; i < cy.size(); ++i) cy(i) = std::sin(0.4 * i) - 0.1;
    const Eigen::VectorXd px = spaces.project_X<double>(
        [&](int panel, double u, const Vec2&) { return spaces.eval_X_function(cx, panel, u); });
    const Eigen::VectorXd py = spaces.project_Y<double>(
        [&](int panel, double u, const Vec2&) { return spaces.eval_Y_function(cy, panel, u); });
    REQUIRE((px - cx).lpNorm<Eigen::Infinity>() <= 1e-12 * cx.lpNorm<Eigen::Infinity>());
    REQUIRE((py - cy).lpNorm<Eigen::Infinity>() <= 1e-11 * cy.lpNorm<Eigen::Infinity>());
}

TEST_CASE("L2 projection errors decay at the optimal rates", "[trace_space]") {
    const int p = 1;
    BoundaryMesh mesh = mesh_polygon(paper_quadrilateral(), 0.5);
    const QuadratureRule rule = gauss_legendre(10);
    std::vector<double> err_x, err_y;
    for (int level = 0; level < 3; ++level) {
        const TraceSpacePair spaces(mesh, p);
        const auto f = [](int, double, const Vec2& x) { return smooth_scalar(x); };
        const Eigen::VectorXd cx = spaces.project_X<double>(f);
        const Eigen::VectorXd cy = spaces.project_Y<double>(f);
        double ex = 0.0, ey = 0.0;
        for (int i = 0; i < mesh.num_panels(); ++i)
            for (int q = 0; q < rule.size(); ++q) {
                const double u = rule.points[q];
                const double w = rule.weights[q] * mesh.panel(i).length;
                const double ref = smooth_scalar(mesh.point(i, u));
                const double dx = ref - spaces.eval_X_function(cx, i, u);
                const double dy = ref - spaces.eval_Y_function(cy, i, u);
                ex += w * dx * dx;
                ey += w * dy * dy;
            }
        err_x.push_back(std::sqrt(ex));
        err_y.push_back(std::sqrt(ey));
        mesh = refine_uniform(mesh);
    }
    // X_h: degree p -> h^{p+1}; Y_h: degree p+1 -> h^{p+2}.
    const double rate_x = std::log2(err_x[1] / err_x[2]);
    const double rate_y = std::log2(err_y[1] / err_y[2]);
    REQUIRE_THAT(rate_x, Catch::Matchers::WithinAbs(p + 1.0, 0.25));
    REQUIRE_THAT(rate_y, Catch::Matchers::WithinAbs(p + 2.0, 0.25));
}

TEST_CASE("Gram matrices are symmetric positive definite; duality has full rank",
          "[trace_space]") {
    const BoundaryMesh mesh = mesh_polygon(paper_quadrilateral(), 0.4);
    const TraceSpacePair spaces(mesh, 2);
    const Eigen::MatrixXd gy = spaces.gram_Y();
    REQUIRE((gy - gy.transpose()).lpNorm<Eigen::Infinity>() <= 1e-13);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gy);
    REQUIRE(eig.eigenvalues().minCoeff() > 0.0);
    const Eigen::MatrixXd duality = spaces.duality();
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(duality);
    REQUIRE(lu.rank() == std::min(duality.rows(), duality.cols()));
}

TEST_CASE("energy norm handles real and complex coefficient vectors", "[trace_space]") {
    const BoundaryMesh mesh = mesh_polygon(paper_quadrilateral(), 0.5);
    const TraceSpacePair spaces(mesh, 1);
    const Eigen::MatrixXd g = spaces.gram_X();
    Eigen::VectorXd vr = Eigen::VectorXd::LinSpaced(spaces.dim_X(), 0.1, 1.0);
    const double real_norm = energy_norm<double>(g, vr);
    REQUIRE(real_norm > 0.0);
    Eigen::VectorXcd vc = vr.cast<std::complex<double>>();
    REQUIRE_THAT(energy_norm<std::complex<double>>(g, vc),
                 Catch::Matchers::WithinRel(real_norm, 1e-14));
    vc *= std::complex<double>(0.0, 1.0);  // rotation leaves the norm invariant
    REQUIRE_THAT(energy_norm<std::complex<double>>(g, vc),
                 Catch::Matchers::WithinRel(real_norm, 1e-14));
}

TEST_CASE("complex projections agree with separate real/imaginary projections",
          "[trace_space]") {
    const BoundaryMesh mesh = mesh_polygon(paper_quadrilateral(), 0.5);
    const TraceSpacePair spaces(mesh, 1);
    const auto fre = [](int, double, const Vec2& x) { return std::sin(x.x() + 2.0 * x.y()); };
    const auto fim = [](int, double, const Vec2& x) { return std::cos(0.5 * x.x() - x.y()); };
    const auto fc = [&](int panel, double u, const Vec2& x) {
        return std::complex<double>(fre(panel, u, x), fim(panel, u, x));
    };
    const Eigen::VectorXcd pc = spaces.project_Y<std::complex<double>>(fc);
    const Eigen::VectorXd pre = spaces.project_Y<double>(fre);
    const Eigen::VectorXd pim = spaces.project_Y<double>(fim);
    REQUIRE((pc.real() - pre).lpNorm<Eigen::Infinity>() <= 1e-12);
    REQUIRE((pc.imag() - pim).lpNorm<Eigen::Infinity>() <= 1e-12);
}
