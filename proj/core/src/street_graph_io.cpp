#include "citynet/street_graph_io.hpp"

#include <stdexcept>

#include "citynet/csv.hpp"

namespace citynet {

void write_graph_csv(const StreetGraph& g, const std::string& nodes_path,
                     const std::string& edges_path) {
    csv::Table nodes;
    nodes.header = {"node_id", "lat", "lon"};
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const GeoPoint& p = g.point_at(i);
        nodes.rows.push_back({std::to_string(g.id_at(i)), csv::format_double(p.lat()),
                              csv::format_double(p.lon())});
    }
    csv::write_file(nodes_path, nodes);

    csv::Table edges;
    edges.header = {"origin", "destination", "weight_m"};
    for (const Edge& e : g.edges()) {
        edges.rows.push_back({std::to_string(e.origin), std::to_string(e.destination),
                              csv::format_double(e.weight_m)});
    }
    csv::write_file(edges_path, edges);
}

StreetGraph read_graph_csv(const std::string& nodes_path, const std::string& edges_path) {
    const csv::Table nodes = csv::read_file(nodes_path);
    const std::size_t id_col = nodes.column("node_id");
    const std::size_t lat_col = nodes.column("lat");
    const std::size_t lon_col = nodes.column("lon");

    StreetGraph::Builder builder;
    for (const auto& row : nodes.rows) {
        if (row.size() != nodes.header.size()) {
            throw std::runtime_error(nodes_path + ": ragged row");
        }
        builder.add_node(csv::parse_u64(row[id_col], nodes_path),
                         GeoPoint(csv::parse_double(row[lat_col], nodes_path),
                                  csv::parse_double(row[lon_col], nodes_path)));
    }

    const csv::Table edges = csv::read_file(edges_path);
    const std::size_t o_col = edges.column("origin");
    const std::size_t d_col = edges.column("destination");
    const std::size_t w_col = edges.column("weight_m");
    for (const auto& row : edges.rows) {
        if (row.size() != edges.header.size()) {
            throw std::runtime_error(edges_path + ": ragged row");
        }
        builder.add_edge(csv::parse_u64(row[o_col], edges_path),
                         csv::parse_u64(row[d_col], edges_path),
                         csv::parse_double(row[w_col], edges_path));
    }
    return std::move(builder).build();
}

}  // namespace citynet
