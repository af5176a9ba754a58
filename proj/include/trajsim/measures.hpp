#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "trajsim/errors.hpp"
#include "trajsim/geometry.hpp"
#include "trajsim/trajectory.hpp"

// Free-space similarity measures. All functions are pure; DP scratch tables
// are allocated per call, so concurrent use is unrestricted.
namespace trajsim::measures {

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline void require_nonempty(std::span<const GeoPoint> t, const char* who) {
    if (t.empty()) throw ParamError(std::string(who) + ": empty trajectory");
}

inline void require_segments(std::span<const GeoPoint> t, const char* who) {
    if (t.size() < 2)
        throw ParamError(std::string(who) + ": need at least 2 points (1 segment)");
}

inline double point_polyline_distance(const GeoPoint& p, std::span<const GeoPoint> t) {
    if (t.size() == 1) return point_distance(p, t[0]);
    double best = kInf;
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
        best = std::min(best, point_segment_distance(p, Segment{t[i], t[i + 1]}));
    return best;
}

inline double polyline_length(std::span<const GeoPoint> t) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) s += point_distance(t[i], t[i + 1]);
    return s;
}

}  // namespace detail

// Mean of index-aligned point distances; requires equal lengths.
inline double ed(std::span<const GeoPoint> t1, std::span<const GeoPoint> t2) {
    if (t1.size() != t2.size())
        throw ParamError("ed: trajectories must have the same length");
    detail::require_nonempty(t1, "ed");
    double s = 0.0;
    for (std::size_t i = 0; i < t1.size(); ++i) s += point_distance(t1[i], t2[i]);
    return s / static_cast<double>(t1.size());
}

inline double dtw(std::span<const GeoPoint> t1, std::span<const GeoPoint> t2) {
    detail::require_nonempty(t1, "dtw");
    detail::require_nonempty(t2, "dtw");
    const std::size_t m = t1.size(), n = t2.size();
    std::vector<double> prev(n + 1, detail::kInf), cur(n + 1, detail::kInf);
    prev[0] = 0.0;
    for (std::size_t i = 1; i <= m; ++i) {
        cur[0] = detail::kInf;
        for (std::size_t j = 1; j <= n; ++j) {
            const double d = point_distance(t1[i - 1], t2[j - 1]);
            cur[j] = d + std::min({prev[j], cur[j - 1], prev[j - 1]});
        }
        std::swap(prev, cur);
    }
    return prev[n];
}

inline int lcss(std::span<const GeoPoint> t1, std::span<const GeoPoint> t2, double epsilon) {
    if (epsilon < 0.0) throw ParamError("lcss: epsilon must be >= 0");
    const std::size_t m = t1.size(), n = t2.size();
    std::vector<int> prev(n + 1, 0), cur(n + 1, 0);
    for (std::size_t i = 1; i <= m; ++i) {
        for (std::size_t j = 1; j <= n; ++j) {
            if (point_distance(t1[i - 1], t2[j - 1]) <= epsilon)
                cur[j] = 1 + prev[j - 1];
            else
                cur[j] = std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[n];
}

inline int edr(std::span<const GeoPoint> t1, std::span<const GeoPoint> t2, double epsilon) {
    if (epsilon < 0.0) throw ParamError("edr: epsilon must be >= 0");
    const std::size_t m = t1.size(), n = t2.size();
    std::vector<int> prev(n + 1), cur(n + 1);
    for (std::size_t j = 0; j <= n; ++j) prev[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= m; ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= n; ++j) {
            const int cost = point_distance(t1[i - 1], t2[j - 1]) <= epsilon ? 0 : 1;
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost});
        }
        std::swap(prev, cur);
    }
    return prev[n];
}

inline double erp(std::span<const GeoPoint> t1, std::span<const GeoPoint> t2,
                  const GeoPoint& ref_point) {
    const std::size_t m = t1.size(), n = t2.size();
    std::vector<double> prev(n + 1, 0.0), cur(n + 1, 0.0);
    for (std::size_t j = 1; j <= n; ++j)
        prev[j] = prev[j - 1] + point_distance(t2[j - 1], ref_point);
    for (std::size_t i = 1; i <= m; ++i) {
        cur[0] = prev[0] + point_distance(t1[i - 1], ref_point);
        for (std::size_t j = 1; j <= n; ++j) {
            cur[j] = std::min({prev[j - 1] + point_distance(t1[i - 1], t2[j - 1]),
                               cur[j - 1] + point_distance(t2[j - 1], ref_point),
                               prev[j] + point_distance(t1[i - 1], ref_point)});
        }
        std::swap(prev, cur);
    }
    return prev[n];
}

inline double hausdorff(std::span<const GeoPoint> t1, std::span<const GeoPoint> t2) {
    detail::require_nonempty(t1, "hausdorff");
    detail::require_nonempty(t2, "hausdorff");
    auto directed = [](std::span<const GeoPoint> a, std::span<const GeoPoint> b) {
        double worst = 0.0;
        for (const GeoPoint& p : a) {
            double best = detail::kInf;
            for (const GeoPoint& q : b) best = std::min(best, point_distance(p, q));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(t1, t2), directed(t2, t1));
}

// Discrete Frechet distance.
inline double frechet(std::span<const GeoPoint> t1, std::span<const GeoPoint> t2) {
    detail::require_nonempty(t1, "frechet");
    detail::require_nonempty(t2, "frechet");
    const std::size_t m = t1.size(), n = t2.size();
    std::vector<double> prev(n), cur(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double d = point_distance(t1[0], t2[j]);
        prev[j] = j == 0 ? d : std::max(prev[j - 1], d);
    }
    for (std::size_t i = 1; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double d = point_distance(t1[i], t2[j]);
            double reach;
            if (j == 0)
                reach = prev[0];
            else
                reach = std::min({prev[j], cur[j - 1], prev[j - 1]});
            cur[j] = std::max(reach, d);
        }
        std::swap(prev, cur);
    }
    return prev[n - 1];
}

// Edit distance with projections. Whole segments are aligned DTW-style
// (a segment may pair with several consecutive segments of the other
// trajectory); each pair costs rep * Coverage with
//   rep(l1,l2)      = dis(l1.s,l2.s) + dis(l1.e,l2.e)
//   Coverage(l1,l2) = |l1| + |l2|
// and the result is the optimal alignment's total cost divided by its
// accumulated Coverage, so identical trajectories score 0.
inline double edwp(std::span<const GeoPoint> t1, std::span<const GeoPoint> t2) {
    detail::require_segments(t1, "edwp");
    detail::require_segments(t2, "edwp");
    const std::size_t m = t1.size() - 1, n = t2.size() - 1;
    struct Cell {
        double cost;
        double coverage;
    };
    std::vector<Cell> prev(n), cur(n);
    auto rep = [&](std::size_t i, std::size_t j) {
        return point_distance(t1[i], t2[j]) + point_distance(t1[i + 1], t2[j + 1]);
    };
    auto cov = [&](std::size_t i, std::size_t j) {
        return point_distance(t1[i], t1[i + 1]) + point_distance(t2[j], t2[j + 1]);
    };
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double c = rep(i, j) * cov(i, j);
            const double cv = cov(i, j);
            Cell best{0.0, 0.0};
            if (i > 0 || j > 0) {
                // Ties prefer diagonal, then the j-1 predecessor.
                best = {detail::kInf, 0.0};
                if (i > 0 && j > 0 && prev[j - 1].cost < best.cost) best = prev[j - 1];
                if (j > 0 && cur[j - 1].cost < best.cost) best = cur[j - 1];
                if (i > 0 && prev[j].cost < best.cost) best = prev[j];
            }
            cur[j] = {best.cost + c, best.coverage + cv};
        }
        std::swap(prev, cur);
    }
    const Cell& out = prev[n - 1];
    return out.coverage > 0.0 ? out.cost / out.coverage : 0.0;
}

namespace detail {

// One polygon of the LIP decomposition: the region between two consecutive
// intersection points (trajectory starts and ends act as pseudo-intersections,
// closed by the straight connector between the two curves).
struct LipRegion {
    std::vector<GeoPoint> polygon;
    double arc1 = 0.0;  // arc length covered on t1
    double arc2 = 0.0;  // on t2
};

// Area of a possibly self-intersecting polygon: splits at crossings and keeps
// the sub-loops oriented like the net winding (dominant-lobe area).
inline double winding_area(std::vector<GeoPoint> poly, int depth = 32) {
    // Drop consecutive duplicates.
    std::vector<GeoPoint> v;
    for (const GeoPoint& p : poly)
        if (v.empty() || !v.back().same_position(p)) v.push_back(p);
    while (v.size() > 1 && v.front().same_position(v.back())) v.pop_back();
    if (v.size() < 3) return 0.0;
    if (depth <= 0) return std::abs(signed_shoelace2(v)) / 2.0;

    // Find one proper crossing between non-adjacent edges.
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;  // shared vertex
            Segment a{v[i], v[(i + 1) % n]};
            Segment b{v[j], v[(j + 1) % n]};
            auto x = segment_intersection(a, b);
            if (!x) continue;
            // Skip touches at shared endpoints.
            if (x->same_position(a.start) || x->same_position(a.end) ||
                x->same_position(b.start) || x->same_position(b.end))
                continue;
            // Split the loop at the crossing into two sub-loops.
            std::vector<GeoPoint> loop1, loop2;
            loop1.push_back(*x);
            for (std::size_t k = i + 1; k <= j; ++k) loop1.push_back(v[k]);
            loop2.push_back(*x);
            for (std::size_t k = (j + 1) % n; k != i + 1; k = (k + 1) % n)
                loop2.push_back(v[k]);
            const double net = signed_shoelace2(v);
            if (std::abs(net) <= kGeomEps) return 0.0;
            const double s1 = signed_shoelace2(loop1);
            const double s2 = signed_shoelace2(loop2);
            double area = 0.0;
            if (s1 * net > 0.0) area += winding_area(std::move(loop1), depth - 1);
            if (s2 * net > 0.0) area += winding_area(std::move(loop2), depth - 1);
            return area;
        }
    }
    return std::abs(signed_shoelace2(v)) / 2.0;
}

}  // namespace detail

inline double lip(std::span<const GeoPoint> t1, std::span<const GeoPoint> t2) {
    detail::require_segments(t1, "lip");
    detail::require_segments(t2, "lip");

    struct Cross {
        double arc1, arc2;
        GeoPoint p;
    };
    std::vector<Cross> crosses;
    std::vector<double> cum1(t1.size(), 0.0), cum2(t2.size(), 0.0);
    for (std::size_t i = 1; i < t1.size(); ++i)
        cum1[i] = cum1[i - 1] + point_distance(t1[i - 1], t1[i]);
    for (std::size_t j = 1; j < t2.size(); ++j)
        cum2[j] = cum2[j - 1] + point_distance(t2[j - 1], t2[j]);
    const double len1 = cum1.back(), len2 = cum2.back();

    for (std::size_t i = 0; i + 1 < t1.size(); ++i) {
        for (std::size_t j = 0; j + 1 < t2.size(); ++j) {
            auto x = segment_intersection(Segment{t1[i], t1[i + 1]}, Segment{t2[j], t2[j + 1]});
            if (!x) continue;
            crosses.push_back({cum1[i] + point_distance(t1[i], *x),
                               cum2[j] + point_distance(t2[j], *x), *x});
        }
    }
    std::sort(crosses.begin(), crosses.end(),
              [](const Cross& a, const Cross& b) { return a.arc1 < b.arc1; });

    // Pseudo-intersections at the start pair and end pair close the figure.
    std::vector<Cross> marks;
    marks.push_back({0.0, 0.0, t1.front()});
    for (const Cross& c : crosses) marks.push_back(c);
    marks.push_back({len1, len2, t1.back()});

    auto sub1 = [&](double from, double to, const GeoPoint& pf, const GeoPoint& pt) {
        std::vector<GeoPoint> pts{pf};
        for (std::size_t i = 1; i < t1.size(); ++i)
            if (cum1[i] > from + kGeomEps && cum1[i] < to - kGeomEps) pts.push_back(t1[i]);
        pts.push_back(pt);
        return pts;
    };
    auto sub2 = [&](double from, double to, const GeoPoint& pf, const GeoPoint& pt) {
        std::vector<GeoPoint> pts{pf};
        for (std::size_t j = 1; j < t2.size(); ++j)
            if (cum2[j] > from + kGeomEps && cum2[j] < to - kGeomEps) pts.push_back(t2[j]);
        pts.push_back(pt);
        return pts;
    };

    double total = 0.0;
    const double denom = len1 + len2;
    for (std::size_t k = 0; k + 1 < marks.size(); ++k) {
        const Cross& a = marks[k];
        const Cross& b = marks[k + 1];
        // t1 arc forward from a to b; the start mark carries t1's start point,
        // the end mark t1's end point; for the t2 side substitute t2's own
        // endpoints at the pseudo-marks.
        const GeoPoint p1f = k == 0 ? t1.front() : a.p;
        const GeoPoint p1t = k + 2 == marks.size() ? t1.back() : b.p;
        const GeoPoint p2f = k == 0 ? t2.front() : a.p;
        const GeoPoint p2t = k + 2 == marks.size() ? t2.back() : b.p;

        std::vector<GeoPoint> poly = sub1(a.arc1, b.arc1, p1f, p1t);
        const double lo2 = std::min(a.arc2, b.arc2), hi2 = std::max(a.arc2, b.arc2);
        std::vector<GeoPoint> part2 =
            a.arc2 <= b.arc2 ? sub2(lo2, hi2, p2f, p2t) : sub2(lo2, hi2, p2t, p2f);
        if (a.arc2 <= b.arc2) std::reverse(part2.begin(), part2.end());
        poly.insert(poly.end(), part2.begin(), part2.end());

        const double area = detail::winding_area(std::move(poly));
        const double w = denom > 0.0 ? (std::abs(b.arc1 - a.arc1) + std::abs(b.arc2 - a.arc2)) / denom
                                     : 0.0;
        total += area * w;
    }
    return total;
}

// Directed one-way distance, approximated by sampling each segment of t1 from
// its start point at quadrature_step arc spacing (plus the final endpoint) and
// averaging the point-to-polyline distance to t2. A step not smaller than the
// longest segment therefore degenerates to sampling exactly the trajectory's
// own points.
inline double owd_directed(std::span<const GeoPoint> t1, std::span<const GeoPoint> t2,
                           double quadrature_step) {
    if (quadrature_step <= 0.0) throw ParamError("owd: quadrature_step must be > 0");
    detail::require_nonempty(t1, "owd");
    detail::require_nonempty(t2, "owd");
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i + 1 < t1.size(); ++i) {
        const double seg_len = point_distance(t1[i], t1[i + 1]);
        for (double s = 0.0; s < seg_len || (i == 0 && s == 0.0); s += quadrature_step) {
            const double tt = seg_len > 0.0 ? s / seg_len : 0.0;
            if (tt >= 1.0) break;
            GeoPoint p{t1[i].lat + tt * (t1[i + 1].lat - t1[i].lat),
                       t1[i].lon + tt * (t1[i + 1].lon - t1[i].lon)};
            sum += detail::point_polyline_distance(p, t2);
            ++count;
            if (seg_len == 0.0) break;
        }
    }
    sum += detail::point_polyline_distance(t1.back(), t2);
    ++count;
    return sum / static_cast<double>(count);
}

inline double owd_linear(std::span<const GeoPoint> t1, std::span<const GeoPoint> t2,
                         double quadrature_step) {
    return 0.5 * (owd_directed(t1, t2, quadrature_step) + owd_directed(t2, t1, quadrature_step));
}

// Default quadrature step: 1% of the shorter trajectory's path length.
inline double default_quadrature_step(std::span<const GeoPoint> t1,
                                      std::span<const GeoPoint> t2) {
    const double shorter = std::min(detail::polyline_length(t1), detail::polyline_length(t2));
    return shorter > 0.0 ? shorter / 100.0 : 1.0;
}

// Grid variant: cell distance is the Euclidean distance between cell centers
// measured in cell units.
inline double owd_grid(const Trajectory& t1, const Trajectory& t2, const GridSpec& g) {
    const std::vector<GridCell> c1 = to_grid(t1, g);
    const std::vector<GridCell> c2 = to_grid(t2, g);
    auto directed = [](const std::vector<GridCell>& a, const std::vector<GridCell>& b) {
        double sum = 0.0;
        for (const GridCell& x : a) {
            double best = detail::kInf;
            for (const GridCell& y : b)
                best = std::min(best, std::hypot(static_cast<double>(x.ix - y.ix),
                                                 static_cast<double>(x.iy - y.iy)));
            sum += best;
        }
        return sum / static_cast<double>(a.size());
    };
    return 0.5 * (directed(c1, c2) + directed(c2, c1));
}

// Hausdorff / discrete Frechet with segments as the aligned unit and the
// minimum segment-to-segment distance as the ground distance.
inline double seg_hausdorff(std::span<const GeoPoint> t1, std::span<const GeoPoint> t2) {
    detail::require_segments(t1, "seg_hausdorff");
    detail::require_segments(t2, "seg_hausdorff");
    const std::size_t m = t1.size() - 1, n = t2.size() - 1;
    auto seg = [](std::span<const GeoPoint> t, std::size_t i) {
        return Segment{t[i], t[i + 1]};
    };
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double best = detail::kInf;
        for (std::size_t j = 0; j < n; ++j)
            best = std::min(best, segment_segment_distance(seg(t1, i), seg(t2, j)));
        worst = std::max(worst, best);
    }
    for (std::size_t j = 0; j < n; ++j) {
        double best = detail::kInf;
        for (std::size_t i = 0; i < m; ++i)
            best = std::min(best, segment_segment_distance(seg(t1, i), seg(t2, j)));
        worst = std::max(worst, best);
    }
    return worst;
}

inline double seg_frechet(std::span<const GeoPoint> t1, std::span<const GeoPoint> t2) {
    detail::require_segments(t1, "seg_frechet");
    detail::require_segments(t2, "seg_frechet");
    const std::size_t m = t1.size() - 1, n = t2.size() - 1;
    auto dist = [&](std::size_t i, std::size_t j) {
        return segment_segment_distance(Segment{t1[i], t1[i + 1]}, Segment{t2[j], t2[j + 1]});
    };
    std::vector<double> prev(n), cur(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double d = dist(0, j);
        prev[j] = j == 0 ? d : std::max(prev[j - 1], d);
    }
    for (std::size_t i = 1; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double d = dist(i, j);
            const double reach =
                j == 0 ? prev[0] : std::min({prev[j], cur[j - 1], prev[j - 1]});
            cur[j] = std::max(reach, d);
        }
        std::swap(prev, cur);
    }
    return prev[n - 1];
}

}  // namespace trajsim::measures
