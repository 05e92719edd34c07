#ifndef CITYNET_BETWEENNESS_HPP
#define CITYNET_BETWEENNESS_HPP

#include <map>
#include <vector>

#include "citynet/shortest_paths.hpp"
#include "citynet/street_graph.hpp"

namespace citynet {

/// Normalized betweenness per node: Brandes dependency accumulation over
/// weighted shortest paths, endpoints excluded, raw score divided by
/// (|V|-1)(|V|-2). Ties split credit across all shortest paths.
/// Throws std::invalid_argument when |V| < 3.
std::map<NodeId, double> betweenness(const StreetGraph& g,
                                     PathWeighting weighting = PathWeighting::kMeters);

/// Index-aligned variant; same contract.
std::vector<double> betweenness_by_index(const StreetGraph& g,
                                         PathWeighting weighting = PathWeighting::kMeters);

}  // namespace citynet

#endif
