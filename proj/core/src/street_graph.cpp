#include "citynet/street_graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace citynet {

bool StreetGraph::has_node(NodeId id) const {
    return std::binary_search(ids_.begin(), ids_.end(), id);
}

std::size_t StreetGraph::index_of(NodeId id) const {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id) {
        throw std::out_of_range("node not found: " + std::to_string(id));
    }
    return static_cast<std::size_t>(it - ids_.begin());
}

const GeoPoint& StreetGraph::point(NodeId id) const { return points_[index_of(id)]; }

std::span<const StreetGraph::Arc> StreetGraph::out_arcs(std::size_t index) const {
    return {arcs_.data() + arc_offsets_[index], arc_offsets_[index + 1] - arc_offsets_[index]};
}

bool StreetGraph::has_edge(NodeId origin, NodeId destination) const {
    auto it = std::lower_bound(edges_.begin(), edges_.end(), std::pair{origin, destination},
                               [](const Edge& e, const std::pair<NodeId, NodeId>& key) {
                                   return std::pair{e.origin, e.destination} < key;
                               });
    return it != edges_.end() && it->origin == origin && it->destination == destination;
}

double StreetGraph::total_street_length_m() const {
    double total = 0.0;
    for (const Edge& e : edges_) {
        if (has_edge(e.destination, e.origin)) {
            // Two-way pair: count the lower-id direction only.
            if (e.origin < e.destination) total += e.weight_m;
        } else {
            total += e.weight_m;
        }
    }
    return total;
}

std::map<std::size_t, std::size_t> StreetGraph::degree_histogram(DegreeKind kind) const {
    std::map<std::size_t, std::size_t> hist;
    for (std::size_t i = 0; i < node_count(); ++i) {
        std::size_t d = 0;
        switch (kind) {
            case DegreeKind::kTotal: d = total_degree(i); break;
            case DegreeKind::kIn: d = in_degree(i); break;
            case DegreeKind::kOut: d = out_degree(i); break;
        }
        ++hist[d];
    }
    return hist;
}

StreetGraph::Builder& StreetGraph::Builder::add_node(NodeId id, const GeoPoint& position) {
    auto [it, inserted] = nodes_.emplace(id, position);
    if (!inserted && !(it->second == position)) {
        throw std::invalid_argument("node " + std::to_string(id) +
                                    " re-added with a different position");
    }
    return *this;
}

StreetGraph::Builder& StreetGraph::Builder::add_edge(NodeId origin, NodeId destination,
                                                     double weight_m) {
    if (origin == destination) {
        throw std::invalid_argument("self-loop rejected at node " + std::to_string(origin));
    }
    if (!std::isfinite(weight_m) || weight_m <= 0.0) {
        throw std::invalid_argument("edge weight must be finite and > 0, got " +
                                    std::to_string(weight_m));
    }
    pending_.push_back({origin, destination, weight_m});
    return *this;
}

StreetGraph StreetGraph::Builder::build() && {
    StreetGraph g;
    g.ids_.reserve(nodes_.size());
    g.points_.reserve(nodes_.size());
    for (const auto& [id, pt] : nodes_) {
        g.ids_.push_back(id);
        g.points_.push_back(pt);
    }

    for (const Edge& e : pending_) {
        if (!nodes_.contains(e.origin) || !nodes_.contains(e.destination)) {
            throw std::invalid_argument("edge endpoint not found: " + std::to_string(e.origin) +
                                        " -> " + std::to_string(e.destination));
        }
    }

    std::sort(pending_.begin(), pending_.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.origin, a.destination, a.weight_m) <
               std::tie(b.origin, b.destination, b.weight_m);
    });

    // Merge parallel same-direction edges, keeping the minimum weight.
    g.edges_.reserve(pending_.size());
    for (const Edge& e : pending_) {
        if (!g.edges_.empty() && g.edges_.back().origin == e.origin &&
            g.edges_.back().destination == e.destination) {
            continue;  // sorted by weight within the pair, first one is minimal
        }
        g.edges_.push_back(e);
    }

    const std::size_t n = g.ids_.size();
    g.in_degree_.assign(n, 0);
    g.arc_offsets_.assign(n + 1, 0);

    std::vector<std::pair<std::size_t, Arc>> arcs;  // (origin index, arc)
    arcs.reserve(g.edges_.size());
    for (const Edge& e : g.edges_) {
        const std::size_t oi = g.index_of(e.origin);
        const std::size_t di = g.index_of(e.destination);
        arcs.push_back({oi, {static_cast<std::uint32_t>(di), e.weight_m}});
        ++g.in_degree_[di];
    }
    for (const auto& [oi, arc] : arcs) ++g.arc_offsets_[oi + 1];
    for (std::size_t i = 0; i < n; ++i) g.arc_offsets_[i + 1] += g.arc_offsets_[i];

    g.arcs_.resize(arcs.size(), Arc{0, 0.0});
    std::vector<std::size_t> cursor(g.arc_offsets_.begin(), g.arc_offsets_.end() - 1);
    for (const auto& [oi, arc] : arcs) g.arcs_[cursor[oi]++] = arc;

    return g;
}

}  // namespace citynet
