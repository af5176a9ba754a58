#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "trajsim/errors.hpp"

namespace trajsim {

// Absolute epsilon used by geometric predicates.
inline constexpr double kGeomEps = 1e-9;

struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;
    std::optional<double> t;  // seconds; non-decreasing within a trajectory

    GeoPoint() = default;
    GeoPoint(double lat_, double lon_) : lat(lat_), lon(lon_) {}
    GeoPoint(double lat_, double lon_, double t_) : lat(lat_), lon(lon_), t(t_) {}

    bool same_position(const GeoPoint& o) const {
        return std::abs(lat - o.lat) <= kGeomEps && std::abs(lon - o.lon) <= kGeomEps;
    }
};

struct Segment {
    GeoPoint start;
    GeoPoint end;

    double length() const {
        return std::hypot(end.lat - start.lat, end.lon - start.lon);
    }
};

struct MBR {
    double min_lat = 0.0, min_lon = 0.0, max_lat = 0.0, max_lon = 0.0;

    GeoPoint center() const { return {(min_lat + max_lat) / 2.0, (min_lon + max_lon) / 2.0}; }
};

struct GridSpec {
    double origin_lat = 0.0;
    double origin_lon = 0.0;
    double cell_size_lat = 1.0;
    double cell_size_lon = 1.0;
};

struct GridCell {
    std::int64_t ix = 0;
    std::int64_t iy = 0;

    bool operator==(const GridCell&) const = default;
};

// Planar Euclidean distance on the (lat, lon) plane.
inline double point_distance(const GeoPoint& p, const GeoPoint& q) {
    return std::hypot(p.lat - q.lat, p.lon - q.lon);
}

// Closest point of the closed segment to p.
inline GeoPoint project_onto_segment(const GeoPoint& p, const Segment& s) {
    const double vx = s.end.lat - s.start.lat;
    const double vy = s.end.lon - s.start.lon;
    const double len2 = vx * vx + vy * vy;
    if (len2 <= kGeomEps * kGeomEps) return s.start;
    double t = ((p.lat - s.start.lat) * vx + (p.lon - s.start.lon) * vy) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return {s.start.lat + t * vx, s.start.lon + t * vy};
}

inline double point_segment_distance(const GeoPoint& p, const Segment& s) {
    return point_distance(p, project_onto_segment(p, s));
}

// Minimum distance between two closed segments (0 when they cross).
inline double segment_segment_distance(const Segment& a, const Segment& b);

// Intersection point of two segments. Parallel disjoint pairs give nullopt;
// collinear overlapping pairs give the midpoint of the overlap.
inline std::optional<GeoPoint> segment_intersection(const Segment& a, const Segment& b) {
    const double d1x = a.end.lat - a.start.lat;
    const double d1y = a.end.lon - a.start.lon;
    const double d2x = b.end.lat - b.start.lat;
    const double d2y = b.end.lon - b.start.lon;
    const double den = d1x * d2y - d1y * d2x;
    const double ex = b.start.lat - a.start.lat;
    const double ey = b.start.lon - a.start.lon;
    if (std::abs(den) <= kGeomEps) {
        // Parallel. Check collinearity via the cross product of the offset.
        if (std::abs(ex * d1y - ey * d1x) > kGeomEps) return std::nullopt;
        // Collinear: overlap interval along a's direction.
        const double len2 = d1x * d1x + d1y * d1y;
        if (len2 <= kGeomEps * kGeomEps) {
            // a is a point; does it lie on b?
            if (point_segment_distance(a.start, b) <= kGeomEps) return a.start;
            return std::nullopt;
        }
        double t0 = (ex * d1x + ey * d1y) / len2;
        double t1 = t0 + (d2x * d1x + d2y * d1y) / len2;
        if (t0 > t1) std::swap(t0, t1);
        const double lo = std::max(0.0, t0);
        const double hi = std::min(1.0, t1);
        if (lo > hi + kGeomEps) return std::nullopt;
        const double tm = (lo + hi) / 2.0;
        return GeoPoint{a.start.lat + tm * d1x, a.start.lon + tm * d1y};
    }
    const double t = (ex * d2y - ey * d2x) / den;
    const double u = (ex * d1y - ey * d1x) / den;
    if (t < -kGeomEps || t > 1.0 + kGeomEps || u < -kGeomEps || u > 1.0 + kGeomEps)
        return std::nullopt;
    return GeoPoint{a.start.lat + t * d1x, a.start.lon + t * d1y};
}

inline double segment_segment_distance(const Segment& a, const Segment& b) {
    if (segment_intersection(a, b)) return 0.0;
    double best = point_segment_distance(a.start, b);
    best = std::min(best, point_segment_distance(a.end, b));
    best = std::min(best, point_segment_distance(b.start, a));
    best = std::min(best, point_segment_distance(b.end, a));
    return best;
}

// Signed shoelace sum (twice the signed area).
inline double signed_shoelace2(std::span<const GeoPoint> v) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const GeoPoint& p = v[i];
        const GeoPoint& q = v[(i + 1) % v.size()];
        s += p.lat * q.lon - q.lat * p.lon;
    }
    return s;
}

// Absolute polygon area; orientation invariant.
inline double polygon_area(std::span<const GeoPoint> vertices) {
    if (vertices.size() < 3)
        throw ParamError("polygon_area: degenerate polygon, need at least 3 vertices");
    return std::abs(signed_shoelace2(vertices)) / 2.0;
}

}  // namespace trajsim
