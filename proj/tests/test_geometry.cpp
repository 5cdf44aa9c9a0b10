#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "heatcq/errors.hpp"
#include "heatcq/geometry.hpp"

using namespace heatcq;

TEST_CASE("paper quadrilateral has the expected perimeter and orientation", "[geometry]") {
    const Polygon quad = paper_quadrilateral();
    REQUIRE(quad.size() == 4);
    // Oracle: explicit side-length sum of (0,0), (1,0), (0.8,0.8), (0.2,1).
    const double expected = 1.0 + std::sqrt(0.04 + 0.64) + std::sqrt(0.36 + 0.04) +
                            std::sqrt(0.04 + 1.0);
    REQUIRE_THAT(quad.perimeter(), Catch::Matchers::WithinAbs(expected, 1e-14));
    REQUIRE(quad.contains(Vec2(0.5, 0.5)));
    REQUIRE_FALSE(quad.contains(Vec2(1.5, 1.6)));
}

TEST_CASE("vertex order is normalized to counterclockwise", "[geometry]") {
    const std::vector<Vec2> ccw = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const std::vector<Vec2> cw = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
    const Polygon a = make_polygon(ccw);
    const Polygon b = make_polygon(cw);
    const auto signed_area2 = [](const Polygon& p) {
        double area2 = 0.0;
        const auto& v = p.vertices();
        const int n = p.size();
        for (int i = 0; i < n; ++i) {
            const Vec2& u = v[i];
            const Vec2& w = v[(i + 1) % n];
            area2 += u.x() * w.y() - u.y() * w.x();
        }
        return area2;
    };
    REQUIRE(signed_area2(a) > 0.0);
    REQUIRE(signed_area2(b) > 0.0);
    REQUIRE(a.contains(Vec2(0.5, 0.5)));
    REQUIRE(b.contains(Vec2(0.5, 0.5)));
}

TEST_CASE("panel normals point outward", "[geometry]") {
    const BoundaryMesh mesh = mesh_polygon(paper_quadrilateral(), 0.3);
    for (int i = 0; i < mesh.num_panels(); ++i) {
        const Panel& p = mesh.panel(i);
        REQUIRE_THAT(p.normal.norm(), Catch::Matchers::WithinAbs(1.0, 1e-14));
        const Vec2 mid = p.midpoint();
        REQUIRE_FALSE(mesh.polygon().contains(mid + 1e-6 * p.normal));
        REQUIRE(mesh.polygon().contains(mid - 1e-6 * p.normal));
    }
}

TEST_CASE("mesh_polygon splits every edge to the target width and closes the chain",
          "[geometry]") {
    const Polygon quad = paper_quadrilateral();
    const BoundaryMesh mesh = mesh_polygon(quad, 0.25);
    REQUIRE(mesh.max_panel_length() <= 0.25 + 1e-12);
    REQUIRE_THAT(mesh.perimeter(), Catch::Matchers::WithinAbs(quad.perimeter(), 1e-13));
    for (int i = 0; i < mesh.num_panels(); ++i) {
        const Panel& cur = mesh.panel(i);
        const Panel& next = mesh.panel((i + 1) % mesh.num_panels());
        REQUIRE((cur.b - next.a).norm() < 1e-14);
    }
}

TEST_CASE("refine_uniform bisects all panels and preserves the curve", "[geometry]") {
    const BoundaryMesh coarse = mesh_polygon(paper_quadrilateral(), 0.5);
    const BoundaryMesh fine = refine_uniform(coarse);
    REQUIRE(fine.num_panels() == 2 * coarse.num_panels());
    REQUIRE_THAT(fine.perimeter(), Catch::Matchers::WithinAbs(coarse.perimeter(), 1e-13));
    REQUIRE_THAT(fine.max_panel_length(),
                 Catch::Matchers::WithinAbs(0.5 * coarse.max_panel_length(), 1e-13));
}

TEST_CASE("panel relations distinguish coincident, adjacent, separated", "[geometry]") {
    const BoundaryMesh mesh = mesh_polygon(paper_quadrilateral(), 0.2);
    const int n = mesh.num_panels();
    for (int i = 0; i < n; ++i) {
        REQUIRE(mesh.relation(i, i) == PanelRelation::Coincident);
        REQUIRE(mesh.relation(i, (i + 1) % n) == PanelRelation::SharedVertex);
        REQUIRE(mesh.relation((i + 1) % n, i) == PanelRelation::SharedVertex);
        if (n > 4) REQUIRE(mesh.relation(i, (i + 2) % n) == PanelRelation::Separated);
    }
}

TEST_CASE("degenerate polygons are rejected", "[geometry]") {
    REQUIRE_THROWS_AS(make_polygon({{0, 0}, {1, 0}}), std::invalid_argument);
    REQUIRE_THROWS_AS(make_polygon({{0, 0}, {0, 0}, {1, 1}}), std::invalid_argument);
    // Collinear points: zero enclosed area.
    REQUIRE_THROWS_AS(make_polygon({{0, 0}, {1, 0}, {2, 0}}), std::invalid_argument);
    // Bowtie self-intersection.
    REQUIRE_THROWS_AS(make_polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), std::invalid_argument);
}

TEST_CASE("distance to boundary and diameter", "[geometry]") {
    const Polygon square = make_polygon({{0, 0}, {2, 0}, {2, 2}, {0, 2}});
    REQUIRE_THAT(square.distance_to_boundary(Vec2(1.0, 1.0)),
                 Catch::Matchers::WithinAbs(1.0, 1e-14));
    REQUIRE_THAT(square.distance_to_boundary(Vec2(3.0, 1.0)),
                 Catch::Matchers::WithinAbs(1.0, 1e-14));
    REQUIRE_THAT(square.diameter(), Catch::Matchers::WithinAbs(2.0 * std::sqrt(2.0), 1e-14));
}

TEST_CASE("segment distance helpers", "[geometry]") {
    REQUIRE_THAT(detail::point_segment_distance(Vec2(0, 1), Vec2(-1, 0), Vec2(1, 0)),
                 Catch::Matchers::WithinAbs(1.0, 1e-15));
    REQUIRE_THAT(detail::point_segment_distance(Vec2(2, 0), Vec2(-1, 0), Vec2(1, 0)),
                 Catch::Matchers::WithinAbs(1.0, 1e-15));
    REQUIRE_THAT(
        detail::segment_segment_distance(Vec2(0, 0), Vec2(1, 0), Vec2(0, 1), Vec2(1, 1)),
        Catch::Matchers::WithinAbs(1.0, 1e-15));
    // Crossing segments have distance zero.
    REQUIRE_THAT(
        detail::segment_segment_distance(Vec2(0, 0), Vec2(1, 1), Vec2(0, 1), Vec2(1, 0)),
        Catch::Matchers::WithinAbs(0.0, 1e-15));
}

TEST_CASE("horseshoe preset polygon is a valid simple polygon", "[geometry]") {
    const Polygon horseshoe = horseshoe_polygon();
    REQUIRE(horseshoe.size() == 8);
    REQUIRE_THAT(horseshoe.perimeter(), Catch::Matchers::WithinAbs(16.0, 1e-13));
    REQUIRE(horseshoe.contains(Vec2(0.5, 0.5)));      // inside the base
    REQUIRE(horseshoe.contains(Vec2(2.5, 2.0)));      // inside the right arm
    REQUIRE_FALSE(horseshoe.contains(Vec2(1.5, 2.0)));  // inside the notch
}
