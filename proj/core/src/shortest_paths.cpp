#include "citynet/shortest_paths.hpp"

#include <cmath>
#include <queue>

namespace citynet {

PathMatrixRow::PathMatrixRow(NodeId source, std::vector<double> dist_by_index)
    : source_(source), dist_(std::move(dist_by_index)) {
    for (double d : dist_) {
        if (d != kUnreachable) ++reachable_;
    }
}

std::optional<double> PathMatrixRow::distance_to(const StreetGraph& g, NodeId target) const {
    const double d = dist_[g.index_of(target)];
    if (d == kUnreachable) return std::nullopt;
    return d;
}

std::map<NodeId, double> PathMatrixRow::to_map(const StreetGraph& g) const {
    std::map<NodeId, double> out;
    for (std::size_t i = 0; i < dist_.size(); ++i) {
        if (dist_[i] != kUnreachable) out.emplace(g.id_at(i), dist_[i]);
    }
    return out;
}

std::vector<double> dijkstra_from_index(const StreetGraph& g, std::size_t source_index,
                                        PathWeighting weighting) {
    const std::size_t n = g.node_count();
    std::vector<double> dist(n, kUnreachable);
    dist[source_index] = 0.0;

    using Item = std::pair<double, std::uint32_t>;  // (distance, node index)
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    heap.push({0.0, static_cast<std::uint32_t>(source_index)});

    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;  // stale entry
        for (const auto& arc : g.out_arcs(u)) {
            const double w = weighting == PathWeighting::kMeters ? arc.weight : 1.0;
            const double nd = d + w;
            if (nd < dist[arc.target]) {
                dist[arc.target] = nd;
                heap.push({nd, arc.target});
            }
        }
    }
    return dist;
}

PathMatrixRow dijkstra(const StreetGraph& g, NodeId source, PathWeighting weighting) {
    const std::size_t si = g.index_of(source);
    return PathMatrixRow(source, dijkstra_from_index(g, si, weighting));
}

}  // namespace citynet
