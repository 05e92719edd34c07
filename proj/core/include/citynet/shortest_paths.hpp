#ifndef CITYNET_SHORTEST_PATHS_HPP
#define CITYNET_SHORTEST_PATHS_HPP

#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "citynet/street_graph.hpp"

namespace citynet {

/// Distance along shortest paths: edge weights in meters, or hop counts.
enum class PathWeighting { kMeters, kHops };

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

/// Single-source shortest distances. Unreachable targets carry kUnreachable
/// in the dense view and are absent from the map view.
class PathMatrixRow {
public:
    PathMatrixRow(NodeId source, std::vector<double> dist_by_index);

    NodeId source() const { return source_; }

    /// Distance by node index; kUnreachable when no path exists.
    double at_index(std::size_t index) const { return dist_[index]; }
    const std::vector<double>& dense() const { return dist_; }

    /// Reachable nodes only (including the source at distance 0).
    std::optional<double> distance_to(const StreetGraph& g, NodeId target) const;
    std::map<NodeId, double> to_map(const StreetGraph& g) const;

    std::size_t reachable_count() const { return reachable_; }

private:
    NodeId source_;
    std::vector<double> dist_;
    std::size_t reachable_ = 0;
};

/// Exact single-source weighted shortest distances (binary-heap Dijkstra).
/// Throws std::out_of_range("node not found: ...") for an unknown source.
PathMatrixRow dijkstra(const StreetGraph& g, NodeId source,
                       PathWeighting weighting = PathWeighting::kMeters);

/// Index-based variant used by the all-pairs loops.
std::vector<double> dijkstra_from_index(const StreetGraph& g, std::size_t source_index,
                                        PathWeighting weighting = PathWeighting::kMeters);

}  // namespace citynet

#endif
