#ifndef CITYNET_STREET_GRAPH_IO_HPP
#define CITYNET_STREET_GRAPH_IO_HPP

#include <string>

#include "citynet/street_graph.hpp"

namespace citynet {

/// Writes the CSV pair: nodes as `node_id,lat,lon`, edges as
/// `origin,destination,weight_m`. UTF-8, header row, '.' decimal separator.
void write_graph_csv(const StreetGraph& g, const std::string& nodes_path,
                     const std::string& edges_path);

/// Reads a graph back from the CSV pair written by write_graph_csv.
StreetGraph read_graph_csv(const std::string& nodes_path, const std::string& edges_path);

}  // namespace citynet

#endif
