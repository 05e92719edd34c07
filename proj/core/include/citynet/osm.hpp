#ifndef CITYNET_OSM_HPP
#define CITYNET_OSM_HPP

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "citynet/street_graph.hpp"

namespace citynet::osm {

struct OsmWay {
    NodeId id = 0;
    std::vector<NodeId> node_refs;
    std::map<std::string, std::string> tags;
};

/// Parsed OSM extract: nodes with positions, ways with node-ref lists and
/// tags. Ways referencing nodes absent from the document are dropped at
/// parse time and counted in dropped_ways.
struct OsmDocument {
    std::map<NodeId, GeoPoint> nodes;
    std::vector<OsmWay> ways;
    std::size_t dropped_ways = 0;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, int line)
        : std::runtime_error(message + " at line " + std::to_string(line)), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// Parses OSM XML. `<node>` elements with id/lat/lon and `<way>` elements
/// with `<nd ref>` / `<tag k v>` children are captured; everything else is
/// ignored. Malformed XML raises ParseError carrying the line number.
OsmDocument parse_osm_xml(std::string_view bytes);
OsmDocument parse_osm_file(const std::string& path);

/// Closed polygon in geographic coordinates, optionally with holes.
/// Construction rejects open or self-intersecting rings and rings with
/// fewer than four points.
class BoundaryPolygon {
public:
    explicit BoundaryPolygon(std::vector<GeoPoint> exterior,
                             std::vector<std::vector<GeoPoint>> holes = {});

    /// Even-odd containment; points exactly on a ring count as inside.
    bool contains(const GeoPoint& p) const;

    const std::vector<GeoPoint>& exterior() const { return exterior_; }
    const std::vector<std::vector<GeoPoint>>& holes() const { return holes_; }

private:
    std::vector<GeoPoint> exterior_;
    std::vector<std::vector<GeoPoint>> holes_;
};

/// Loads a GeoJSON-style polygon: either a bare Polygon geometry or a
/// Feature wrapping one. Coordinates are [lon, lat].
BoundaryPolygon read_boundary_geojson(const std::string& path);
void write_boundary_geojson(const BoundaryPolygon& boundary, const std::string& path);

/// Drops nodes strictly outside the boundary and re-splits ways into
/// maximal runs of surviving consecutive nodes; runs shorter than two are
/// discarded. Idempotent.
OsmDocument clip(const OsmDocument& doc, const BoundaryPolygon& boundary);

struct GraphBuildOptions {
    /// Ways contribute only when their `highway` tag value is in the filter.
    std::set<std::string> highway_filter;
    /// Keep degree-2 geometry nodes as graph vertices instead of contracting
    /// them into segment weights.
    bool keep_geometry_nodes = false;
};

/// The default tag filter: main road classes plus their _link variants.
std::set<std::string> default_highway_filter();

/// Parses the `--highway-filter` comma-separated override.
std::set<std::string> parse_highway_filter(std::string_view csv_list);

/// Builds the street graph: ways are split at intersection nodes (nodes
/// used more than once across retained ways, plus way endpoints); each
/// segment becomes one edge per direction with weight equal to the summed
/// great-circle length of its hops. `oneway=yes` keeps the way direction,
/// `oneway=-1` reverses it. Self-loop and zero-length segments are
/// discarded. Throws when nothing remains.
StreetGraph build_street_graph(const OsmDocument& doc, const GraphBuildOptions& options);

}  // namespace citynet::osm

#endif
