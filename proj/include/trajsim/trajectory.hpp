#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "trajsim/errors.hpp"
#include "trajsim/geometry.hpp"

namespace trajsim {

using TrajId = std::int64_t;

struct Trajectory {
    TrajId id = 0;
    std::vector<GeoPoint> points;

    std::size_t size() const { return points.size(); }

    std::span<const GeoPoint> span() const { return points; }

    double path_length() const {
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < points.size(); ++i)
            s += point_distance(points[i], points[i + 1]);
        return s;
    }

    bool has_timestamps() const {
        return !points.empty() && points.front().t.has_value();
    }

    // Enforces the construction invariants: non-empty, finite coordinates,
    // timestamps all-or-none and non-decreasing.
    void validate() const {
        if (points.empty())
            throw DataError("trajectory " + std::to_string(id) + ": empty");
        const bool timed = points.front().t.has_value();
        double prev_t = -std::numeric_limits<double>::infinity();
        for (const GeoPoint& p : points) {
            if (!std::isfinite(p.lat) || !std::isfinite(p.lon))
                throw DataError("trajectory " + std::to_string(id) + ": non-finite coordinate");
            if (p.t.has_value() != timed)
                throw DataError("trajectory " + std::to_string(id) +
                                ": timestamps must be present on all points or none");
            if (timed) {
                if (*p.t < prev_t)
                    throw DataError("trajectory " + std::to_string(id) +
                                    ": non-monotone timestamps");
                prev_t = *p.t;
            }
        }
    }
};

inline MBR mbr_of(const Trajectory& t) {
    if (t.points.empty()) throw DataError("mbr_of: empty trajectory");
    MBR box{t.points[0].lat, t.points[0].lon, t.points[0].lat, t.points[0].lon};
    for (const GeoPoint& p : t.points) {
        box.min_lat = std::min(box.min_lat, p.lat);
        box.max_lat = std::max(box.max_lat, p.lat);
        box.min_lon = std::min(box.min_lon, p.lon);
        box.max_lon = std::max(box.max_lon, p.lon);
    }
    return box;
}

// Grid trace of the trajectory polyline: cells are floor-indexed half-open
// boxes [k*size, (k+1)*size); the result lists, in traversal order, every
// cell the polyline spends positive length in, plus the cells of the two
// endpoints, with consecutive duplicates collapsed.
inline std::vector<GridCell> to_grid(const Trajectory& t, const GridSpec& g) {
    if (g.cell_size_lat <= 0.0 || g.cell_size_lon <= 0.0)
        throw ParamError("to_grid: cell sizes must be positive");
    if (t.points.empty()) throw DataError("to_grid: empty trajectory");

    auto cell_of = [&](double lat, double lon) {
        return GridCell{
            static_cast<std::int64_t>(std::floor((lat - g.origin_lat) / g.cell_size_lat)),
            static_cast<std::int64_t>(std::floor((lon - g.origin_lon) / g.cell_size_lon))};
    };

    std::vector<GridCell> cells;
    auto push = [&](GridCell c) {
        if (cells.empty() || !(cells.back() == c)) cells.push_back(c);
    };

    push(cell_of(t.points.front().lat, t.points.front().lon));
    for (std::size_t i = 0; i + 1 < t.points.size(); ++i) {
        const GeoPoint& s = t.points[i];
        const GeoPoint& e = t.points[i + 1];
        // Parameters where the segment crosses a cell boundary on either axis.
        std::vector<double> ts = {0.0, 1.0};
        auto add_axis = [&](double sv, double ev, double origin, double size) {
            if (sv == ev) return;
            const double lo = std::min(sv, ev), hi = std::max(sv, ev);
            const auto k0 = static_cast<std::int64_t>(std::floor((lo - origin) / size));
            const auto k1 = static_cast<std::int64_t>(std::floor((hi - origin) / size));
            for (std::int64_t k = k0; k <= k1 + 1; ++k) {
                const double boundary = origin + static_cast<double>(k) * size;
                const double tt = (boundary - sv) / (ev - sv);
                if (tt > 0.0 && tt < 1.0) ts.push_back(tt);
            }
        };
        add_axis(s.lat, e.lat, g.origin_lat, g.cell_size_lat);
        add_axis(s.lon, e.lon, g.origin_lon, g.cell_size_lon);
        std::sort(ts.begin(), ts.end());
        for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
            if (ts[k + 1] - ts[k] < 1e-12) continue;
            const double mid = (ts[k] + ts[k + 1]) / 2.0;
            push(cell_of(s.lat + mid * (e.lat - s.lat), s.lon + mid * (e.lon - s.lon)));
        }
    }
    push(cell_of(t.points.back().lat, t.points.back().lon));
    return cells;
}

// Id-indexed trajectory collection; iteration order is ascending id.
template <typename T>
class BasicDataset {
public:
    BasicDataset() = default;

    void add(T traj) {
        if (index_.count(traj.id))
            throw DataError("dataset: duplicate trajectory id " + std::to_string(traj.id));
        index_[traj.id] = items_.size();
        items_.push_back(std::move(traj));
    }

    // Restores ascending-id iteration order after a batch of add() calls.
    void finalize() {
        std::sort(items_.begin(), items_.end(),
                  [](const T& a, const T& b) { return a.id < b.id; });
        index_.clear();
        for (std::size_t i = 0; i < items_.size(); ++i) index_[items_[i].id] = i;
    }

    bool contains(TrajId id) const { return index_.count(id) != 0; }

    const T& at(TrajId id) const {
        auto it = index_.find(id);
        if (it == index_.end())
            throw DataError("dataset: unknown trajectory id " + std::to_string(id));
        return items_[it->second];
    }

    const T& nth(std::size_t i) const { return items_[i]; }

    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }

    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }

private:
    std::vector<T> items_;
    std::unordered_map<TrajId, std::size_t> index_;
};

using Dataset = BasicDataset<Trajectory>;

}  // namespace trajsim
