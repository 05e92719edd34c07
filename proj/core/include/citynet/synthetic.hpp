#ifndef CITYNET_SYNTHETIC_HPP
#define CITYNET_SYNTHETIC_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "citynet/osm.hpp"
#include "citynet/street_graph.hpp"

namespace citynet::pipeline {

enum class CityKind { kGrid, kRadial, kSparse };

/// Generator parameters. Everything the output depends on is in here, so a
/// fixed spec always produces byte-identical graphs.
struct SyntheticSpec {
    CityKind kind = CityKind::kGrid;
    std::size_t size = 4;       // grid/sparse: side length; radial: ring count
    std::uint64_t seed = 0;
    double noise = 0.0;         // coordinate jitter as a fraction of the spacing
    double one_way_fraction = 0.0;
    double spacing_deg = 0.001;      // ~111 m between neighbors
    std::size_t spokes = 4;          // radial only
    std::size_t sparse_block = 3;    // sparse: cross streets every this many columns
    double origin_lat = 0.0;
    double origin_lon = 0.0;
};

/// Deterministic geolocated lattice/radial test city.
StreetGraph generate_synthetic_city(const SyntheticSpec& spec);

/// Serializes a street graph as OSM XML (one way per logical street,
/// tagged highway=residential, oneway=yes for single-direction edges).
/// Re-ingesting reproduces the graph bit-exactly.
void write_osm_xml(const StreetGraph& g, const std::string& path);

/// Axis-aligned bounding polygon with a margin, for clip boundaries.
osm::BoundaryPolygon bounding_boundary(const StreetGraph& g, double margin_deg = 0.001);

struct SyntheticCity {
    std::string id;
    SyntheticSpec spec;
    double population;  // planted: monotone in node count
};

struct SyntheticCorpus {
    std::vector<SyntheticCity> cities;
};

/// Two planted city types: `dense_count` small dense grids and
/// `sparse_count` large sparse grids, with populations monotone in node
/// count. Spreads per-city seeds from `seed`.
SyntheticCorpus plan_two_type_corpus(std::size_t dense_count, std::size_t sparse_count,
                                     std::uint64_t seed);

/// Writes maps/<id>.osm, boundaries/<id>.json, indicators.csv and
/// manifest.ini under `out_dir`.
void write_synthetic_corpus(const SyntheticCorpus& corpus, const std::string& out_dir,
                            std::uint64_t manifest_seed);

}  // namespace citynet::pipeline

#endif
