#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace setrisk {

inline constexpr double kGeomTol = 1e-9;

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    Point2 operator+(Point2 o) const { return {x + o.x, y + o.y}; }
    Point2 operator-(Point2 o) const { return {x - o.x, y - o.y}; }
    Point2 operator-() const { return {-x, -y}; }
    Point2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Point2&) const = default;
};

inline Point2 operator*(double s, Point2 p) { return p * s; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline Point2 normalized(Point2 a) { return a * (1.0 / norm(a)); }
inline Point2 rot_cw(Point2 a) { return {a.y, -a.x}; }
inline Point2 rot_ccw(Point2 a) { return {-a.y, a.x}; }

// Closed convex cone in the plane. A sector is swept counter-clockwise
// from `lo` to `hi` (angle in [0, pi)); a half-plane has hi == -lo and is
// the side to the left of lo; the plane has no rays.
class ConvexCone2D {
public:
    enum class Kind { Sector, HalfPlane, Plane };

    // Picks Sector or HalfPlane from the rays; rays need not be unit.
    static ConvexCone2D from_rays(Point2 lo, Point2 hi);
    static ConvexCone2D half_plane(Point2 inward_normal);
    static ConvexCone2D plane();
    static ConvexCone2D positive_orthant();
    static ConvexCone2D negative_orthant();

    Kind kind() const { return kind_; }
    Point2 lo() const { return lo_; }
    Point2 hi() const { return hi_; }
    // Counter-clockwise angle from lo to hi; 2*pi for the plane.
    double span() const;

    bool contains(Point2 v, double tol = kGeomTol) const;
    bool contains_cone(const ConvexCone2D& other, double tol = kGeomTol) const;
    bool contains_positive_orthant(double tol = kGeomTol) const;

    ConvexCone2D negated() const;
    // {u : <u,x> >= 0 for all x in the cone}
    ConvexCone2D positive_dual() const;
    // {u : <u,x> <= 0 for all x in the cone}
    ConvexCone2D polar() const { return positive_dual().negated(); }
    // Closed convex hull of the union; the cones must share a direction.
    ConvexCone2D hull_with(const ConvexCone2D& other) const;

    bool approx_equal(const ConvexCone2D& o, double tol = kGeomTol) const;
    bool operator==(const ConvexCone2D&) const = default;

private:
    Kind kind_ = Kind::Plane;
    Point2 lo_{};
    Point2 hi_{};
};

struct HalfSpace2 {
    Point2 normal;  // unit
    double offset;  // region side: <x, normal> >= offset
};

class HalfSpaceSet;

struct Box {
    double x0, y0, x1, y1;
    bool valid() const { return x0 < x1 && y0 < y1; }
};

// conv(vertices) + recession, kept in canonical form: vertices run along the
// lower-left boundary by strictly decreasing x, none redundant.
class RiskRegion2D {
public:
    static RiskRegion2D from_points_plus_cone(std::span<const Point2> points, const ConvexCone2D& rec);
    static RiskRegion2D from_halfspaces(const HalfSpaceSet& h);
    static RiskRegion2D whole_plane();

    const std::vector<Point2>& vertices() const { return vertices_; }
    const ConvexCone2D& recession() const { return rec_; }
    bool is_whole_plane() const { return rec_.kind() == ConvexCone2D::Kind::Plane; }

    bool contains(Point2 x, double tol = kGeomTol) const;
    // inf <u,x> over the region, or -infinity.
    double scalarize(Point2 u) const;
    // One half-plane per boundary piece: the lo ray, each edge, the hi ray.
    std::vector<HalfSpace2> supporting_halfspaces() const;
    HalfSpaceSet to_halfspace_set() const;

    RiskRegion2D plus_cone(const ConvexCone2D& c) const;
    RiskRegion2D translated(Point2 a) const;
    RiskRegion2D scaled(double c) const;

    // Convex polygon (counter-clockwise) of region ∩ box; may be empty.
    std::vector<Point2> clip(const Box& box) const;

    bool operator==(const RiskRegion2D&) const = default;

private:
    std::vector<Point2> vertices_;
    ConvexCone2D rec_;
};

RiskRegion2D region_from_halfspaces(const HalfSpaceSet& h);
RiskRegion2D region_from_points_plus_cone(std::span<const Point2> points, const ConvexCone2D& rec);
inline bool region_contains(const RiskRegion2D& r, Point2 x) { return r.contains(x); }
inline double scalarize(const RiskRegion2D& r, Point2 u) { return r.scalarize(u); }
RiskRegion2D minkowski_cone(const RiskRegion2D& r, const ConvexCone2D& c);

double hausdorff_polygons(std::span<const Point2> a, std::span<const Point2> b);
double hausdorff_on_window(const RiskRegion2D& r1, const RiskRegion2D& r2, const Box& window);

}  // namespace setrisk
