#include <stdexcept>

#include "citynet/osm.hpp"

namespace citynet::osm {

std::set<std::string> default_highway_filter() {
    std::set<std::string> filter;
    for (const char* base : {"motorway", "trunk", "primary", "secondary", "tertiary",
                             "residential", "unclassified", "living_street"}) {
        filter.insert(base);
        filter.insert(std::string(base) + "_link");
    }
    return filter;
}

std::set<std::string> parse_highway_filter(std::string_view csv_list) {
    std::set<std::string> filter;
    std::size_t start = 0;
    while (start <= csv_list.size()) {
        std::size_t comma = csv_list.find(',', start);
        if (comma == std::string_view::npos) comma = csv_list.size();
        std::string_view item = csv_list.substr(start, comma - start);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        if (!item.empty()) filter.emplace(item);
        start = comma + 1;
    }
    return filter;
}

namespace {

enum class Direction { kBoth, kForward, kReverse };

Direction way_direction(const OsmWay& way) {
    const auto it = way.tags.find("oneway");
    if (it == way.tags.end()) return Direction::kBoth;
    if (it->second == "yes") return Direction::kForward;
    if (it->second == "-1") return Direction::kReverse;
    return Direction::kBoth;
}

}  // namespace

StreetGraph build_street_graph(const OsmDocument& doc, const GraphBuildOptions& options) {
    if (options.highway_filter.empty()) {
        throw std::invalid_argument("highway filter must not be empty");
    }

    std::vector<const OsmWay*> retained;
    for (const OsmWay& way : doc.ways) {
        const auto tag = way.tags.find("highway");
        if (tag == way.tags.end()) continue;
        if (!options.highway_filter.contains(tag->second)) continue;
        if (way.node_refs.size() < 2) continue;
        retained.push_back(&way);
    }

    // A node is an intersection when it is used more than once across the
    // retained ways (shared between ways, or revisited by one) or is a way
    // endpoint. Everything else is pass-through geometry.
    std::map<NodeId, std::size_t> usage;
    std::set<NodeId> endpoints;
    for (const OsmWay* way : retained) {
        for (NodeId ref : way->node_refs) ++usage[ref];
        endpoints.insert(way->node_refs.front());
        endpoints.insert(way->node_refs.back());
    }
    auto is_intersection = [&](NodeId id) {
        return options.keep_geometry_nodes || endpoints.contains(id) || usage[id] >= 2;
    };

    StreetGraph::Builder builder;
    auto add_segment = [&](NodeId from, NodeId to, double length, Direction dir) {
        if (from == to) return;       // self-loop segment, discarded
        if (length <= 0.0) return;    // coincident geometry, nothing to keep
        builder.add_node(from, doc.nodes.at(from));
        builder.add_node(to, doc.nodes.at(to));
        if (dir != Direction::kReverse) builder.add_edge(from, to, length);
        if (dir != Direction::kForward) builder.add_edge(to, from, length);
    };

    for (const OsmWay* way : retained) {
        const Direction dir = way_direction(*way);
        const auto& refs = way->node_refs;

        NodeId segment_start = refs.front();
        double length = 0.0;
        for (std::size_t i = 1; i < refs.size(); ++i) {
            length += great_circle_distance(doc.nodes.at(refs[i - 1]), doc.nodes.at(refs[i]));
            if (is_intersection(refs[i])) {
                add_segment(segment_start, refs[i], length, dir);
                segment_start = refs[i];
                length = 0.0;
            }
        }
    }

    if (builder.node_count() == 0) {
        throw std::runtime_error("no street data after filtering");
    }
    return std::move(builder).build();
}

}  // namespace citynet::osm
