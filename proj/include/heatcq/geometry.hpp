#pragma once

// Closed polygonal boundaries in the plane and their panel meshes.
// Orientation is canonically counterclockwise so that the panel normal
// rotate(tangent, -90 deg) points from the inclusion Omega- into the
// exterior Omega+.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace heatcq {

using Vec2 = Eigen::Vector2d;

namespace detail {

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Proper or improper intersection test for segments pq and rs, excluding
// matches at shared endpoints (adjacent polygon edges touch by design).
inline bool segments_intersect(const Vec2& p, const Vec2& q, const Vec2& r, const Vec2& s) {
    const auto orient = [](const Vec2& a, const Vec2& b, const Vec2& c) {
        const double v = cross2(b - a, c - a);
        const double scale = (b - a).norm() * (c - a).norm();
        if (std::abs(v) <= 1e-14 * scale) return 0;
        return v > 0 ? 1 : -1;
    };
    const int o1 = orient(p, q, r), o2 = orient(p, q, s);
    const int o3 = orient(r, s, p), o4 = orient(r, s, q);
    if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return true;
    const auto on_segment = [](const Vec2& a, const Vec2& b, const Vec2& c) {
        // c collinear with ab assumed; is it strictly inside?
        const double t = (c - a).dot(b - a) / (b - a).squaredNorm();
        return t > 1e-12 && t < 1.0 - 1e-12;
    };
    if (o1 == 0 && on_segment(p, q, r)) return true;
    if (o2 == 0 && on_segment(p, q, s)) return true;
    if (o3 == 0 && on_segment(r, s, p)) return true;
    if (o4 == 0 && on_segment(r, s, q)) return true;
    return false;
}

inline double point_segment_distance(const Vec2& x, const Vec2& a, const Vec2& b) {
    const Vec2 d = b - a;
    const double t = std::clamp((x - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
    return (x - (a + t * d)).norm();
}

inline double segment_segment_distance(const Vec2& a1, const Vec2& b1, const Vec2& a2,
                                        const Vec2& b2) {
    if (segments_intersect(a1, b1, a2, b2)) return 0.0;
    return std::min(std::min(point_segment_distance(a2, a1, b1), point_segment_distance(b2, a1, b1)),
                    std::min(point_segment_distance(a1, a2, b2), point_segment_distance(b1, a2, b2)));
}

}  // namespace detail

class Polygon {
  public:
    // Validates and stores a simple closed polygon; clockwise input is
    // reversed so the stored orientation is always counterclockwise.
    explicit Polygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
        if (vertices_.size() < 3) throw std::invalid_argument("Polygon: need at least 3 vertices");
        const int n = static_cast<int>(vertices_.size());
        const double scale = diameter_of(vertices_);
        for (int i = 0; i < n; ++i) {
            if ((vertices_[i] - vertices_[(i + 1) % n]).norm() <= 1e-14 * scale)
                throw std::invalid_argument("Polygon: consecutive vertices coincide");
        }
        double area2 = 0.0;
        for (int i = 0; i < n; ++i) area2 += detail::cross2(vertices_[i], vertices_[(i + 1) % n]);
        if (std::abs(area2) <= 1e-14 * scale * scale)
            throw std::invalid_argument("Polygon: degenerate (zero enclosed area)");
        if (area2 < 0.0) std::reverse(vertices_.begin(), vertices_.end());
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
                if (adjacent) continue;
                if (detail::segments_intersect(vertices_[i], vertices_[(i + 1) % n], vertices_[j],
                                               vertices_[(j + 1) % n]))
                    throw std::invalid_argument("Polygon: boundary is self-intersecting");
            }
        }
    }

    [[nodiscard]] const std::vector<Vec2>& vertices() const { return vertices_; }
    [[nodiscard]] int size() const { return static_cast<int>(vertices_.size()); }

    [[nodiscard]] double perimeter() const {
        double sum = 0.0;
        for (int i = 0; i < size(); ++i) sum += (vertices_[(i + 1) % size()] - vertices_[i]).norm();
        return sum;
    }

    [[nodiscard]] double diameter() const { return diameter_of(vertices_); }

    // Even-odd crossing test; boundary points are classified arbitrarily and
    // must be filtered by distance before use.
    [[nodiscard]] bool contains(const Vec2& x) const {
        bool inside = false;
        for (int i = 0; i < size(); ++i) {
            const Vec2& a = vertices_[i];
            const Vec2& b = vertices_[(i + 1) % size()];
            if ((a.y() > x.y()) != (b.y() > x.y())) {
                const double t = (x.y() - a.y()) / (b.y() - a.y());
                if (x.x() < a.x() + t * (b.x() - a.x())) inside = !inside;
            }
        }
        return inside;
    }

    [[nodiscard]] double distance_to_boundary(const Vec2& x) const {
        double d = std::numeric_limits<double>::infinity();
        for (int i = 0; i < size(); ++i)
            d = std::min(d, detail::point_segment_distance(x, vertices_[i], vertices_[(i + 1) % size()]));
        return d;
    }

  private:
    static double diameter_of(const std::vector<Vec2>& pts) {
        double d = 0.0;
        for (size_t i = 0; i < pts.size(); ++i)
            for (size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, (pts[i] - pts[j]).norm());
        return d;
    }

    std::vector<Vec2> vertices_;
};

inline Polygon make_polygon(std::vector<Vec2> vertices) { return Polygon(std::move(vertices)); }

struct Panel {
    Vec2 a, b;        // endpoints in counterclockwise boundary order
    double length;
    Vec2 tangent;     // (b - a) / length
    Vec2 normal;      // rotate(tangent, -90 deg): outward for CCW orientation

    Panel(const Vec2& a_, const Vec2& b_) : a(a_), b(b_) {
        length = (b - a).norm();
        tangent = (b - a) / length;
        normal = Vec2(tangent.y(), -tangent.x());
    }

    [[nodiscard]] Vec2 point(double u) const { return a + u * (b - a); }
    [[nodiscard]] Vec2 midpoint() const { return 0.5 * (a + b); }
};

// How two panels of the same mesh touch; drives the singular-quadrature choice.
enum class PanelRelation { Coincident, SharedVertex, Separated };

class BoundaryMesh {
  public:
    // Panels must form a single closed counterclockwise chain.
    explicit BoundaryMesh(std::vector<Panel> panels, Polygon polygon)
        : panels_(std::move(panels)), polygon_(std::move(polygon)) {
        const int n = num_panels();
        if (n < 3) throw std::invalid_argument("BoundaryMesh: need at least 3 panels");
        for (int i = 0; i < n; ++i) {
            if ((panels_[i].b - panels_[(i + 1) % n].a).norm() > 1e-13 * polygon_.diameter())
                throw std::invalid_argument("BoundaryMesh: panel chain is not closed");
        }
    }

    [[nodiscard]] int num_panels() const { return static_cast<int>(panels_.size()); }
    [[nodiscard]] const Panel& panel(int i) const { return panels_[i]; }
    [[nodiscard]] const Polygon& polygon() const { return polygon_; }

    [[nodiscard]] Vec2 point(int i, double u) const { return panels_[i].point(u); }

    [[nodiscard]] double perimeter() const {
        double sum = 0.0;
        for (const auto& p : panels_) sum += p.length;
        return sum;
    }

    [[nodiscard]] double max_panel_length() const {
        double h = 0.0;
        for (const auto& p : panels_) h = std::max(h, p.length);
        return h;
    }

    [[nodiscard]] PanelRelation relation(int i, int j) const {
        if (i == j) return PanelRelation::Coincident;
        const int n = num_panels();
        if (j == (i + 1) % n || i == (j + 1) % n) return PanelRelation::SharedVertex;
        return PanelRelation::Separated;
    }

    [[nodiscard]] double panel_distance(int i, int j) const {
        return detail::segment_segment_distance(panels_[i].a, panels_[i].b, panels_[j].a,
                                                panels_[j].b);
    }

  private:
    std::vector<Panel> panels_;
    Polygon polygon_;
};

// Subdivide every polygon edge uniformly into panels of length <= target_h.
inline BoundaryMesh mesh_polygon(const Polygon& poly, double target_h) {
    if (!(target_h > 0.0)) throw std::invalid_argument("mesh_polygon: target_h must be positive");
    std::vector<Panel> panels;
    const int n = poly.size();
    for (int i = 0; i < n; ++i) {
        const Vec2& a = poly.vertices()[i];
        const Vec2& b = poly.vertices()[(i + 1) % n];
        const double len = (b - a).norm();
        const int segments = std::max(1, static_cast<int>(std::ceil(len / target_h - 1e-12)));
        for (int k = 0; k < segments; ++k) {
            panels.emplace_back(a + (b - a) * (static_cast<double>(k) / segments),
                                a + (b - a) * (static_cast<double>(k + 1) / segments));
        }
    }
    return BoundaryMesh(std::move(panels), poly);
}

// Bisect every panel; vertex set grows, geometry is unchanged.
inline BoundaryMesh refine_uniform(const BoundaryMesh& mesh) {
    std::vector<Panel> panels;
    panels.reserve(2 * mesh.num_panels());
    for (int i = 0; i < mesh.num_panels(); ++i) {
        const Panel& p = mesh.panel(i);
        panels.emplace_back(p.a, p.midpoint());
        panels.emplace_back(p.midpoint(), p.b);
    }
    return BoundaryMesh(std::move(panels), mesh.polygon());
}

// The quadrilateral inclusion used throughout the convergence studies.
inline Polygon paper_quadrilateral() {
    return Polygon({Vec2(0.0, 0.0), Vec2(1.0, 0.0), Vec2(0.8, 0.8), Vec2(0.2, 1.0)});
}

// Horseshoe-shaped inclusion for the demo simulation: a 3x3 block with a
// 1-wide slot cut from the top edge down to y = 1.  Only the shape class
// matters for the demo; the coordinates themselves are free choices.
inline Polygon horseshoe_polygon() {
    return Polygon({Vec2(0.0, 0.0), Vec2(3.0, 0.0), Vec2(3.0, 3.0), Vec2(2.0, 3.0), Vec2(2.0, 1.0),
                    Vec2(1.0, 1.0), Vec2(1.0, 3.0), Vec2(0.0, 3.0)});
}

}  // namespace heatcq
