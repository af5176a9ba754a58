#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <list>
#include <mutex>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "trajsim/errors.hpp"
#include "trajsim/geometry.hpp"
#include "trajsim/trajectory.hpp"

namespace trajsim {

using VertexId = std::int64_t;
using EdgeId = std::int64_t;

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

inline bool is_unreachable(double d) { return !(d < kUnreachable); }

struct RoadVertex {
    VertexId id = 0;
    double lat = 0.0;
    double lon = 0.0;
};

struct RoadEdge {
    EdgeId id = 0;
    VertexId from = 0;
    VertexId to = 0;
    double length = 0.0;
};

struct EdgeRecord {
    EdgeId id;
    VertexId from, to;
    double length;
    double from_lat, from_lon, to_lat, to_lon;
};

// Lazy per-source shortest-path cache with LRU eviction. Concurrent readers
// are synchronized internally; duplicate fills for the same source are
// possible under contention but never inconsistent.
class DistanceCache {
public:
    explicit DistanceCache(std::size_t capacity = 4096) : capacity_(capacity) {}

    template <typename Compute>
    std::shared_ptr<const std::vector<double>> rows(std::size_t source, Compute&& compute) const {
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = map_.find(source);
            if (it != map_.end()) {
                lru_.splice(lru_.begin(), lru_, it->second.second);
                return it->second.first;
            }
        }
        auto row = std::make_shared<const std::vector<double>>(compute(source));
        std::lock_guard<std::mutex> lock(mu_);
        auto it = map_.find(source);
        if (it != map_.end()) return it->second.first;  // raced; keep the existing row
        lru_.push_front(source);
        map_[source] = {row, lru_.begin()};
        if (map_.size() > capacity_) {
            map_.erase(lru_.back());
            lru_.pop_back();
        }
        return row;
    }

    void clear() {
        std::lock_guard<std::mutex> lock(mu_);
        map_.clear();
        lru_.clear();
    }

private:
    std::size_t capacity_;
    mutable std::mutex mu_;
    mutable std::list<std::size_t> lru_;
    mutable std::unordered_map<std::size_t,
                               std::pair<std::shared_ptr<const std::vector<double>>,
                                         std::list<std::size_t>::iterator>>
        map_;
};

class RoadNetwork {
public:
    RoadNetwork() = default;

    void add_vertex(VertexId id, double lat, double lon) {
        auto it = vindex_.find(id);
        if (it != vindex_.end()) return;  // already known
        vindex_[id] = vertices_.size();
        vertices_.push_back({id, lat, lon});
        adjacency_.emplace_back();
    }

    void add_edge(const RoadEdge& e) {
        if (eindex_.count(e.id))
            throw DataError("network: duplicate edge id " + std::to_string(e.id));
        if (!(e.length > 0.0))
            throw DataError("network: non-positive length on edge " + std::to_string(e.id));
        auto fi = vindex_.find(e.from);
        auto ti = vindex_.find(e.to);
        if (fi == vindex_.end() || ti == vindex_.end())
            throw DataError("network: dangling endpoint on edge " + std::to_string(e.id));
        eindex_[e.id] = edges_.size();
        edge_by_pair_[pair_key(e.from, e.to)] = edges_.size();
        edges_.push_back(e);
        adjacency_[fi->second].push_back({ti->second, e.length});
    }

    bool has_vertex(VertexId id) const { return vindex_.count(id) != 0; }

    const RoadVertex& vertex(VertexId id) const {
        auto it = vindex_.find(id);
        if (it == vindex_.end())
            throw DataError("network: unknown vertex id " + std::to_string(id));
        return vertices_[it->second];
    }

    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    const RoadEdge& edge(EdgeId id) const {
        auto it = eindex_.find(id);
        if (it == eindex_.end())
            throw DataError("network: unknown edge id " + std::to_string(id));
        return edges_[it->second];
    }

    // Direct edge from u to v if one exists.
    std::optional<EdgeId> edge_between(VertexId u, VertexId v) const {
        auto it = edge_by_pair_.find(pair_key(u, v));
        if (it == edge_by_pair_.end()) return std::nullopt;
        return edges_[it->second].id;
    }

    // Shortest directed path length; 0 for u == v, +infinity when v is not
    // reachable from u. Cached per source.
    double shortest_path_distance(VertexId u, VertexId v) const {
        const std::size_t si = index_of(u);
        const std::size_t ti = index_of(v);
        if (si == ti) return 0.0;
        auto row = cache_.rows(si, [this](std::size_t s) { return dijkstra(s); });
        return (*row)[ti];
    }

    // min(d(u->v), d(v->u)); used when measures ask for symmetrized distances.
    double symmetric_distance(VertexId u, VertexId v) const {
        return std::min(shortest_path_distance(u, v), shortest_path_distance(v, u));
    }

    // Uncached single-source run; exposed for cache-transparency checks.
    std::vector<double> dijkstra_from(VertexId u) const { return dijkstra(index_of(u)); }

    double distance_by_index(std::size_t row_value_index, const std::vector<double>& row) const {
        return row[row_value_index];
    }

    std::size_t index_of(VertexId id) const {
        auto it = vindex_.find(id);
        if (it == vindex_.end())
            throw DataError("network: unknown vertex id " + std::to_string(id));
        return it->second;
    }

    void clear_cache() const { cache_.clear(); }

private:
    static std::uint64_t pair_key(VertexId a, VertexId b) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) ^
               static_cast<std::uint32_t>(b);
    }

    std::vector<double> dijkstra(std::size_t source) const {
        std::vector<double> dist(vertices_.size(), kUnreachable);
        using Item = std::pair<double, std::size_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        dist[source] = 0.0;
        heap.push({0.0, source});
        while (!heap.empty()) {
            auto [d, u] = heap.top();
            heap.pop();
            if (d > dist[u]) continue;
            for (const auto& [v, w] : adjacency_[u]) {
                const double nd = d + w;
                if (nd < dist[v]) {
                    dist[v] = nd;
                    heap.push({nd, v});
                }
            }
        }
        return dist;
    }

    std::vector<RoadVertex> vertices_;
    std::vector<RoadEdge> edges_;
    std::vector<std::vector<std::pair<std::size_t, double>>> adjacency_;
    std::unordered_map<VertexId, std::size_t> vindex_;
    std::unordered_map<EdgeId, std::size_t> eindex_;
    std::unordered_map<std::uint64_t, std::size_t> edge_by_pair_;
    mutable DistanceCache cache_;
};

inline RoadNetwork load_network(std::span<const EdgeRecord> records) {
    RoadNetwork net;
    for (const EdgeRecord& r : records) {
        net.add_vertex(r.from, r.from_lat, r.from_lon);
        net.add_vertex(r.to, r.to_lat, r.to_lon);
    }
    for (const EdgeRecord& r : records)
        net.add_edge(RoadEdge{r.id, r.from, r.to, r.length});
    return net;
}

struct MatchedTrajectory {
    TrajId id = 0;
    std::vector<VertexId> vertices;
    std::vector<double> timestamps;  // empty, or one per vertex

    std::size_t size() const { return vertices.size(); }
    bool has_timestamps() const { return !timestamps.empty(); }

    void validate(const RoadNetwork& net) const {
        if (vertices.empty())
            throw DataError("matched trajectory " + std::to_string(id) + ": empty");
        if (!timestamps.empty() && timestamps.size() != vertices.size())
            throw DataError("matched trajectory " + std::to_string(id) +
                            ": timestamp count mismatch");
        for (std::size_t i = 1; i < timestamps.size(); ++i)
            if (timestamps[i] < timestamps[i - 1])
                throw DataError("matched trajectory " + std::to_string(id) +
                                ": non-monotone timestamps");
        for (VertexId v : vertices)
            if (!net.has_vertex(v))
                throw DataError("matched trajectory " + std::to_string(id) +
                                ": unknown vertex " + std::to_string(v));
    }

    // Edge ids for consecutive vertex pairs where a direct edge exists.
    std::vector<EdgeId> derived_edges(const RoadNetwork& net) const {
        std::vector<EdgeId> out;
        for (std::size_t i = 0; i + 1 < vertices.size(); ++i)
            if (auto e = net.edge_between(vertices[i], vertices[i + 1])) out.push_back(*e);
        return out;
    }

    // Geometric length: per consecutive pair, the direct edge length when one
    // exists, else the shortest-path distance. Unreachable hops are an error.
    double network_length(const RoadNetwork& net) const {
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
            if (auto e = net.edge_between(vertices[i], vertices[i + 1])) {
                total += net.edge(*e).length;
            } else {
                const double d = net.shortest_path_distance(vertices[i], vertices[i + 1]);
                if (is_unreachable(d))
                    throw ComputeError("matched trajectory " + std::to_string(id) +
                                       ": unreachable consecutive vertices");
                total += d;
            }
        }
        return total;
    }
};

using MatchedDataset = BasicDataset<MatchedTrajectory>;

}  // namespace trajsim
