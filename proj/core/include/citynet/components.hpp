#ifndef CITYNET_COMPONENTS_HPP
#define CITYNET_COMPONENTS_HPP

#include <set>
#include <vector>

#include "citynet/street_graph.hpp"

namespace citynet {

enum class ComponentMode { kWeak, kStrong };

/// Partition of the node set into connected components. Weak mode ignores
/// edge direction; strong mode uses Tarjan semantics. Components are ordered
/// by their smallest node id; an empty graph yields an empty list.
std::vector<std::set<NodeId>> connected_components(const StreetGraph& g, ComponentMode mode);

}  // namespace citynet

#endif
