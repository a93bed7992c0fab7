#include "setrisk/geom2d.hpp"

#include "setrisk/errors.hpp"
#include "setrisk/halfspace.hpp"

#include <algorithm>
#include <numbers>

namespace setrisk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

// Signed angle of v measured from r, in (-pi, pi].
double angle_from(Point2 r, Point2 v) { return std::atan2(cross(r, v), dot(r, v)); }

Point2 bisector(const ConvexCone2D& c)
{
    if (c.kind() == ConvexCone2D::Kind::HalfPlane) return rot_ccw(c.lo());
    Point2 s = c.lo() + c.hi();
    return norm(s) > 1e-12 ? normalized(s) : c.lo();
}

Point2 line_intersection(Point2 u1, double c1, Point2 u2, double c2)
{
    double det = cross(u1, u2);
    return {(c1 * u2.y - c2 * u1.y) / det, (u1.x * c2 - u2.x * c1) / det};
}

double point_segment_distance(Point2 p, Point2 a, Point2 b)
{
    Point2 ab = b - a;
    double len2 = dot(ab, ab);
    if (len2 == 0.0) return norm(p - a);
    double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return norm(p - (a + ab * t));
}

double point_polygon_distance(Point2 p, std::span<const Point2> poly)
{
    const std::size_t m = poly.size();
    if (m == 1) return norm(p - poly[0]);
    if (m >= 3) {
        bool inside = true;
        for (std::size_t i = 0; i < m && inside; ++i) {
            Point2 a = poly[i], b = poly[(i + 1) % m];
            if (cross(b - a, p - a) < -1e-12 * std::max(1.0, norm(b - a))) inside = false;
        }
        if (inside) return 0.0;
    }
    double best = kInf;
    for (std::size_t i = 0; i < m; ++i) {
        if (m == 2 && i == 1) break;
        best = std::min(best, point_segment_distance(p, poly[i], poly[(i + 1) % m]));
    }
    return best;
}

}  // namespace

// ---- ConvexCone2D -----------------------------------------------------------

ConvexCone2D ConvexCone2D::from_rays(Point2 lo, Point2 hi)
{
    if (!finite(lo) || !finite(hi) || norm(lo) == 0.0 || norm(hi) == 0.0)
        throw ValidationError("cone rays must be finite and nonzero");
    lo = normalized(lo);
    hi = normalized(hi);
    double c = cross(lo, hi), d = dot(lo, hi);
    ConvexCone2D k;
    if (std::abs(c) <= kGeomTol && d < 0.0) {
        k.kind_ = Kind::HalfPlane;
        k.lo_ = lo;
        k.hi_ = -lo;
        return k;
    }
    if (c < -kGeomTol) throw ValidationError("cone rays span more than a half-plane (not convex)");
    k.kind_ = Kind::Sector;
    k.lo_ = lo;
    k.hi_ = hi;
    return k;
}

ConvexCone2D ConvexCone2D::half_plane(Point2 inward_normal)
{
    if (!finite(inward_normal) || norm(inward_normal) == 0.0)
        throw ValidationError("half-plane normal must be finite and nonzero");
    ConvexCone2D k;
    k.kind_ = Kind::HalfPlane;
    k.lo_ = rot_cw(normalized(inward_normal));
    k.hi_ = -k.lo_;
    return k;
}

ConvexCone2D ConvexCone2D::plane() { return ConvexCone2D{}; }
ConvexCone2D ConvexCone2D::positive_orthant() { return from_rays({1, 0}, {0, 1}); }
ConvexCone2D ConvexCone2D::negative_orthant() { return from_rays({-1, 0}, {0, -1}); }

double ConvexCone2D::span() const
{
    switch (kind_) {
    case Kind::Plane: return 2 * std::numbers::pi;
    case Kind::HalfPlane: return std::numbers::pi;
    case Kind::Sector: return std::max(0.0, std::atan2(cross(lo_, hi_), dot(lo_, hi_)));
    }
    return 0.0;
}

bool ConvexCone2D::contains(Point2 v, double tol) const
{
    if (kind_ == Kind::Plane) return true;
    double n = norm(v);
    if (n == 0.0) return true;
    v = v * (1.0 / n);
    if (kind_ == Kind::HalfPlane) return cross(lo_, v) >= -tol;
    return cross(lo_, v) >= -tol && cross(v, hi_) >= -tol && dot(v, lo_ + hi_) >= -tol;
}

bool ConvexCone2D::contains_cone(const ConvexCone2D& o, double tol) const
{
    if (kind_ == Kind::Plane) return true;
    if (o.kind_ == Kind::Plane) return false;
    if (o.kind_ == Kind::HalfPlane) return kind_ == Kind::HalfPlane && norm(lo_ - o.lo_) <= tol;
    return contains(o.lo_, tol) && contains(o.hi_, tol);
}

bool ConvexCone2D::contains_positive_orthant(double tol) const
{
    return contains_cone(positive_orthant(), tol);
}

ConvexCone2D ConvexCone2D::negated() const
{
    ConvexCone2D k = *this;
    k.lo_ = -lo_;
    k.hi_ = -hi_;
    return k;
}

ConvexCone2D ConvexCone2D::positive_dual() const
{
    switch (kind_) {
    case Kind::Plane: throw ValidationError("the dual of the whole plane is the origin");
    case Kind::HalfPlane: {
        Point2 n = rot_ccw(lo_);
        return from_rays(n, n);
    }
    case Kind::Sector: return from_rays(rot_cw(hi_), rot_ccw(lo_));
    }
    return {};
}

ConvexCone2D ConvexCone2D::hull_with(const ConvexCone2D& o) const
{
    if (kind_ == Kind::Plane || o.kind_ == Kind::Plane) return plane();
    const Point2 candidates[] = {bisector(*this), bisector(o), normalized(Point2{1, 1})};
    const Point2* ref = nullptr;
    for (const auto& c : candidates)
        if (contains(c) && o.contains(c)) {
            ref = &c;
            break;
        }
    if (!ref) throw ValidationError("cones share no common direction");
    const double pi = std::numbers::pi;
    auto lo_angle = [&](const ConvexCone2D& k) {
        return k.kind_ == Kind::HalfPlane ? angle_from(*ref, rot_ccw(k.lo_)) - pi / 2 : angle_from(*ref, k.lo_);
    };
    auto hi_angle = [&](const ConvexCone2D& k) {
        return k.kind_ == Kind::HalfPlane ? angle_from(*ref, rot_ccw(k.lo_)) + pi / 2 : angle_from(*ref, k.hi_);
    };
    double la = lo_angle(*this), lb = lo_angle(o);
    double ha = hi_angle(*this), hb = hi_angle(o);
    Point2 lo = la <= lb ? lo_ : o.lo_;
    Point2 hi = ha >= hb ? hi_ : o.hi_;
    double sp = std::max(ha, hb) - std::min(la, lb);
    if (sp > pi + kGeomTol) return plane();
    if (sp >= pi - kGeomTol) return from_rays(lo, -lo);
    return from_rays(lo, hi);
}

bool ConvexCone2D::approx_equal(const ConvexCone2D& o, double tol) const
{
    if (kind_ != o.kind_) return false;
    if (kind_ == Kind::Plane) return true;
    if (norm(lo_ - o.lo_) > tol) return false;
    return kind_ == Kind::HalfPlane || norm(hi_ - o.hi_) <= tol;
}

// ---- RiskRegion2D -----------------------------------------------------------

RiskRegion2D RiskRegion2D::whole_plane() { return RiskRegion2D{}; }

RiskRegion2D RiskRegion2D::from_points_plus_cone(std::span<const Point2> points, const ConvexCone2D& rec)
{
    if (points.empty()) throw ValidationError("region needs at least one point");
    for (auto p : points)
        if (!finite(p)) throw ValidationError("region point is not finite");
    if (!rec.contains_positive_orthant()) throw ValidationError("recession cone must contain the positive orthant");

    RiskRegion2D r;
    r.rec_ = rec;
    if (rec.kind() == ConvexCone2D::Kind::Plane) return r;
    if (rec.kind() == ConvexCone2D::Kind::HalfPlane) {
        Point2 n = rot_ccw(rec.lo());
        double c = kInf;
        for (auto p : points) c = std::min(c, dot(n, p));
        r.vertices_ = {n * c};
        return r;
    }

    // In coordinates s = <n_hi, x>, t = <n_lo, x> the cone becomes the
    // orthant, so the boundary is the lower convex staircase.
    const Point2 n_hi = rot_cw(rec.hi()), n_lo = rot_ccw(rec.lo());
    struct Item {
        double s, t;
        Point2 p;
    };
    std::vector<Item> items;
    items.reserve(points.size());
    for (auto p : points) items.push_back({dot(n_hi, p), dot(n_lo, p), p});
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        if (a.s != b.s) return a.s < b.s;
        if (a.t != b.t) return a.t < b.t;
        if (a.p.x != b.p.x) return a.p.x < b.p.x;
        return a.p.y < b.p.y;
    });

    std::vector<Item> front;
    double tmin = kInf;
    for (const auto& it : items) {
        if (it.t < tmin - kGeomTol) {
            front.push_back(it);
            tmin = it.t;
        }
    }
    // a leading point almost straight above the next one sits on its hi ray
    while (front.size() >= 2 && front[1].s - front[0].s <= kGeomTol) front.erase(front.begin());

    std::vector<Item> chain;
    for (const auto& it : front) {
        while (chain.size() >= 2) {
            const Item& o = chain[chain.size() - 2];
            const Item& a = chain.back();
            double c = (a.s - o.s) * (it.t - o.t) - (a.t - o.t) * (it.s - o.s);
            double len = std::hypot(it.s - o.s, it.t - o.t);
            if (c <= kGeomTol * len) chain.pop_back();
            else break;
        }
        chain.push_back(it);
    }
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) r.vertices_.push_back(it->p);
    return r;
}

RiskRegion2D RiskRegion2D::from_halfspaces(const HalfSpaceSet& h)
{
    if (h.dim() != 2) throw ValidationError("polygon extraction needs dimension 2");
    if (h.empty()) throw ValidationError("empty constraint list");
    struct Line {
        double theta;
        Point2 u;
        double c;
    };
    std::vector<Line> lines;
    for (const auto& hs : h.constraints()) {
        Point2 u{hs.normal[0], hs.normal[1]};
        lines.push_back({std::atan2(u.y, u.x), u, hs.offset});
    }
    std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
        if (a.theta != b.theta) return a.theta > b.theta;
        return a.c > b.c;
    });
    std::vector<Line> uniq;
    for (const auto& l : lines) {
        if (!uniq.empty() && uniq.back().theta - l.theta <= 1e-12) {
            if (l.c > uniq.back().c) uniq.back() = l;
            continue;
        }
        uniq.push_back(l);
    }
    if (uniq.size() == 1) {
        Point2 p = uniq[0].u * uniq[0].c;
        return from_points_plus_cone(std::span<const Point2>(&p, 1), ConvexCone2D::half_plane(uniq[0].u));
    }

    std::vector<Line> stack;
    for (const auto& l : uniq) {
        while (stack.size() >= 2) {
            Point2 v = line_intersection(stack[stack.size() - 2].u, stack[stack.size() - 2].c, stack.back().u,
                                         stack.back().c);
            if (dot(v, l.u) <= l.c + kGeomTol) stack.pop_back();
            else break;
        }
        stack.push_back(l);
    }
    std::vector<Point2> verts;
    for (std::size_t i = 0; i + 1 < stack.size(); ++i)
        verts.push_back(line_intersection(stack[i].u, stack[i].c, stack[i + 1].u, stack[i + 1].c));
    auto rec = ConvexCone2D::from_rays(rot_cw(stack.front().u), rot_ccw(stack.back().u));
    return from_points_plus_cone(verts, rec);
}

RiskRegion2D region_from_halfspaces(const HalfSpaceSet& h) { return RiskRegion2D::from_halfspaces(h); }

RiskRegion2D region_from_points_plus_cone(std::span<const Point2> points, const ConvexCone2D& rec)
{
    return RiskRegion2D::from_points_plus_cone(points, rec);
}

std::vector<HalfSpace2> RiskRegion2D::supporting_halfspaces() const
{
    std::vector<HalfSpace2> out;
    if (is_whole_plane()) return out;
    if (rec_.kind() == ConvexCone2D::Kind::HalfPlane) {
        Point2 n = rot_ccw(rec_.lo());
        out.push_back({n, dot(n, vertices_[0])});
        return out;
    }
    Point2 n = rot_ccw(rec_.lo());
    out.push_back({n, dot(n, vertices_.front())});
    for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
        Point2 e = normalized(rot_cw(vertices_[i + 1] - vertices_[i]));
        out.push_back({e, dot(e, vertices_[i])});
    }
    n = rot_cw(rec_.hi());
    out.push_back({n, dot(n, vertices_.back())});
    return out;
}

HalfSpaceSet RiskRegion2D::to_halfspace_set() const
{
    HalfSpaceSet h(2);
    for (const auto& hs : supporting_halfspaces()) h.add(hs.normal, hs.offset);
    return h;
}

bool RiskRegion2D::contains(Point2 x, double tol) const
{
    for (const auto& hs : supporting_halfspaces())
        if (dot(hs.normal, x) < hs.offset - tol) return false;
    return true;
}

double RiskRegion2D::scalarize(Point2 u) const
{
    if (norm(u) == 0.0) throw ValidationError("scalarization direction must be nonzero");
    if (is_whole_plane()) return -kInf;
    Point2 uh = normalized(u);
    if (rec_.kind() == ConvexCone2D::Kind::HalfPlane) {
        Point2 n = rot_ccw(rec_.lo());
        if (std::abs(cross(uh, n)) > kGeomTol || dot(uh, n) <= 0.0) return -kInf;
    } else if (dot(uh, rec_.lo()) < -kGeomTol || dot(uh, rec_.hi()) < -kGeomTol) {
        return -kInf;
    }
    double best = kInf;
    for (auto v : vertices_) best = std::min(best, dot(u, v));
    return best;
}

RiskRegion2D RiskRegion2D::plus_cone(const ConvexCone2D& c) const
{
    if (is_whole_plane()) return *this;
    auto rec = rec_.hull_with(c);
    if (rec.kind() == ConvexCone2D::Kind::Plane) return whole_plane();
    return from_points_plus_cone(vertices_, rec);
}

RiskRegion2D minkowski_cone(const RiskRegion2D& r, const ConvexCone2D& c) { return r.plus_cone(c); }

RiskRegion2D RiskRegion2D::translated(Point2 a) const
{
    RiskRegion2D r = *this;
    for (auto& v : r.vertices_) v = v + a;
    return r;
}

RiskRegion2D RiskRegion2D::scaled(double c) const
{
    if (!(c > 0.0)) throw ValidationError("scale must be positive");
    RiskRegion2D r = *this;
    for (auto& v : r.vertices_) v = v * c;
    return r;
}

std::vector<Point2> RiskRegion2D::clip(const Box& box) const
{
    if (!box.valid()) throw ValidationError("window must have x0 < x1 and y0 < y1");
    std::vector<Point2> poly{{box.x0, box.y0}, {box.x1, box.y0}, {box.x1, box.y1}, {box.x0, box.y1}};
    for (const auto& hs : supporting_halfspaces()) {
        std::vector<Point2> next;
        const std::size_t m = poly.size();
        for (std::size_t i = 0; i < m; ++i) {
            Point2 a = poly[i], b = poly[(i + 1) % m];
            double da = dot(hs.normal, a) - hs.offset, db = dot(hs.normal, b) - hs.offset;
            if (da >= 0.0) next.push_back(a);
            if ((da >= 0.0) != (db >= 0.0)) {
                double t = da / (da - db);
                next.push_back(a + (b - a) * t);
            }
        }
        poly.clear();
        for (auto p : next)
            if (poly.empty() || norm(p - poly.back()) > 1e-12) poly.push_back(p);
        while (poly.size() > 1 && norm(poly.front() - poly.back()) <= 1e-12) poly.pop_back();
        if (poly.empty()) break;
    }
    return poly;
}

double hausdorff_polygons(std::span<const Point2> a, std::span<const Point2> b)
{
    if (a.empty() || b.empty()) throw ValidationError("empty polygon in Hausdorff distance");
    double d = 0.0;
    for (auto p : a) d = std::max(d, point_polygon_distance(p, b));
    for (auto p : b) d = std::max(d, point_polygon_distance(p, a));
    return d;
}

double hausdorff_on_window(const RiskRegion2D& r1, const RiskRegion2D& r2, const Box& window)
{
    auto a = r1.clip(window), b = r2.clip(window);
    if (a.empty() || b.empty()) throw ValidationError("region does not meet the window");
    return hausdorff_polygons(a, b);
}

}  // namespace setrisk
