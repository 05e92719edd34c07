#ifndef CITYNET_STREET_GRAPH_HPP
#define CITYNET_STREET_GRAPH_HPP

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "citynet/geo.hpp"

namespace citynet {

using NodeId = std::uint64_t;

/// One directed street segment. Weight is the great-circle length in meters.
struct Edge {
    NodeId origin;
    NodeId destination;
    double weight_m;
};

enum class DegreeKind { kTotal, kIn, kOut };

/// Directed, distance-weighted street graph. Immutable once built.
///
/// Invariants enforced at build time:
///   - no self-loops (origin != destination)
///   - every edge endpoint is a known node
///   - every weight is finite and > 0
///   - at most one edge per ordered (origin, destination) pair; duplicates
///     are merged keeping the minimum weight
class StreetGraph {
public:
    class Builder;

    /// Index-based arc used by the adjacency lists.
    struct Arc {
        std::uint32_t target;  // node index
        double weight;
    };

    std::size_t node_count() const { return ids_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    bool empty() const { return ids_.empty(); }

    /// Node ids in ascending order.
    std::span<const NodeId> node_ids() const { return ids_; }

    /// Edges sorted by (origin, destination).
    std::span<const Edge> edges() const { return edges_; }

    bool has_node(NodeId id) const;
    const GeoPoint& point(NodeId id) const;

    /// Dense index of a node id; throws std::out_of_range with "node not
    /// found" if the id is unknown.
    std::size_t index_of(NodeId id) const;
    NodeId id_at(std::size_t index) const { return ids_[index]; }
    const GeoPoint& point_at(std::size_t index) const { return points_[index]; }

    std::span<const Arc> out_arcs(std::size_t index) const;
    std::size_t out_degree(std::size_t index) const { return out_arcs(index).size(); }
    std::size_t in_degree(std::size_t index) const { return in_degree_[index]; }
    std::size_t total_degree(std::size_t index) const {
        return out_degree(index) + in_degree(index);
    }

    bool has_edge(NodeId origin, NodeId destination) const;

    /// Total one-direction street length: each unordered two-way pair counts
    /// once, each one-way edge counts once.
    double total_street_length_m() const;

    std::map<std::size_t, std::size_t> degree_histogram(DegreeKind kind) const;

private:
    StreetGraph() = default;

    std::vector<NodeId> ids_;        // sorted ascending
    std::vector<GeoPoint> points_;   // aligned with ids_
    std::vector<Edge> edges_;        // sorted by (origin, destination)
    std::vector<Arc> arcs_;          // grouped by origin index
    std::vector<std::size_t> arc_offsets_;  // size node_count()+1
    std::vector<std::size_t> in_degree_;
};

class StreetGraph::Builder {
public:
    /// Registers a node. Re-adding an existing id with the same position is a
    /// no-op; a different position throws.
    Builder& add_node(NodeId id, const GeoPoint& position);

    /// Queues a directed edge. Endpoint existence is checked at build().
    Builder& add_edge(NodeId origin, NodeId destination, double weight_m);

    std::size_t node_count() const { return nodes_.size(); }

    StreetGraph build() &&;

private:
    std::map<NodeId, GeoPoint> nodes_;
    std::vector<Edge> pending_;
};

}  // namespace citynet

#endif
