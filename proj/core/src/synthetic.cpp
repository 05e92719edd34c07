#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "citynet/csv.hpp"
#include "citynet/synthetic.hpp"

namespace citynet::pipeline {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

class UnitRng {
public:
    explicit UnitRng(std::uint64_t seed) : engine_(seed) {}
    double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

struct Street {
    NodeId a;
    NodeId b;
};

// Jitter capped below half the spacing so neighbors never swap or collide.
GeoPoint jittered(double lat, double lon, double spacing, double noise, UnitRng& rng) {
    const double amp = 0.4 * noise * spacing;
    return GeoPoint(lat + amp * (rng.next() - 0.5), lon + amp * (rng.next() - 0.5));
}

void emit_streets(StreetGraph::Builder& builder,
                  const std::map<NodeId, GeoPoint>& positions,
                  const std::vector<Street>& streets, double one_way_fraction, UnitRng& rng) {
    for (const Street& s : streets) {
        const double length = great_circle_distance(positions.at(s.a), positions.at(s.b));
        const bool one_way = one_way_fraction > 0.0 && rng.next() < one_way_fraction;
        if (one_way) {
            const bool forward = rng.next() < 0.5;
            builder.add_edge(forward ? s.a : s.b, forward ? s.b : s.a, length);
        } else {
            builder.add_edge(s.a, s.b, length);
            builder.add_edge(s.b, s.a, length);
        }
    }
}

}  // namespace

StreetGraph generate_synthetic_city(const SyntheticSpec& spec) {
    if (spec.size < 1) throw std::invalid_argument("synthetic city size must be >= 1");
    UnitRng rng(spec.seed);

    std::map<NodeId, GeoPoint> positions;
    std::vector<Street> streets;

    if (spec.kind == CityKind::kGrid || spec.kind == CityKind::kSparse) {
        const std::size_t side = std::max<std::size_t>(spec.size, 2);
        auto id_of = [&](std::size_t i, std::size_t j) {
            return static_cast<NodeId>(1 + i * side + j);
        };
        for (std::size_t i = 0; i < side; ++i) {
            for (std::size_t j = 0; j < side; ++j) {
                positions.emplace(
                    id_of(i, j),
                    jittered(spec.origin_lat + static_cast<double>(i) * spec.spacing_deg,
                             spec.origin_lon + static_cast<double>(j) * spec.spacing_deg,
                             spec.spacing_deg, spec.noise, rng));
            }
        }
        // Sparse lattices keep every row but run cross streets only every
        // sparse_block-th column: long blocks, lower street density.
        const std::size_t block = std::max<std::size_t>(spec.sparse_block, 2);
        for (std::size_t i = 0; i < side; ++i) {
            for (std::size_t j = 0; j < side; ++j) {
                if (j + 1 < side) streets.push_back({id_of(i, j), id_of(i, j + 1)});
                if (i + 1 < side &&
                    (spec.kind == CityKind::kGrid || j % block == 0 || j + 1 == side)) {
                    streets.push_back({id_of(i, j), id_of(i + 1, j)});
                }
            }
        }
    } else {  // radial
        const std::size_t rings = spec.size;
        const std::size_t spokes = std::max<std::size_t>(spec.spokes, 3);
        const NodeId hub = 1;
        positions.emplace(hub, jittered(spec.origin_lat, spec.origin_lon, spec.spacing_deg,
                                        spec.noise, rng));
        auto id_of = [&](std::size_t ring, std::size_t spoke) {
            return static_cast<NodeId>(2 + ring * spokes + spoke);
        };
        for (std::size_t r = 0; r < rings; ++r) {
            const double radius = static_cast<double>(r + 1) * spec.spacing_deg;
            for (std::size_t s = 0; s < spokes; ++s) {
                const double angle = 2.0 * kPi * static_cast<double>(s) /
                                     static_cast<double>(spokes);
                positions.emplace(id_of(r, s),
                                  jittered(spec.origin_lat + radius * std::sin(angle),
                                           spec.origin_lon + radius * std::cos(angle),
                                           spec.spacing_deg, spec.noise, rng));
            }
        }
        for (std::size_t s = 0; s < spokes; ++s) {
            streets.push_back({hub, id_of(0, s)});
            for (std::size_t r = 0; r + 1 < rings; ++r) {
                streets.push_back({id_of(r, s), id_of(r + 1, s)});
            }
        }
        for (std::size_t r = 0; r < rings; ++r) {
            for (std::size_t s = 0; s < spokes; ++s) {
                streets.push_back({id_of(r, s), id_of(r, (s + 1) % spokes)});
            }
        }
    }

    StreetGraph::Builder builder;
    for (const auto& [id, pt] : positions) builder.add_node(id, pt);
    emit_streets(builder, positions, streets, spec.one_way_fraction, rng);
    return std::move(builder).build();
}

void write_osm_xml(const StreetGraph& g, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<osm version=\"0.6\" generator=\"citynet\">\n";
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const GeoPoint& p = g.point_at(i);
        out << "  <node id=\"" << g.id_at(i) << "\" lat=\"" << csv::format_double(p.lat())
            << "\" lon=\"" << csv::format_double(p.lon()) << "\"/>\n";
    }

    std::uint64_t way_id = 1;
    for (const Edge& e : g.edges()) {
        const bool two_way = g.has_edge(e.destination, e.origin);
        if (two_way && e.origin > e.destination) continue;  // emit the pair once
        out << "  <way id=\"" << way_id++ << "\">\n";
        out << "    <nd ref=\"" << e.origin << "\"/>\n";
        out << "    <nd ref=\"" << e.destination << "\"/>\n";
        out << "    <tag k=\"highway\" v=\"residential\"/>\n";
        if (!two_way) out << "    <tag k=\"oneway\" v=\"yes\"/>\n";
        out << "  </way>\n";
    }
    out << "</osm>\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

osm::BoundaryPolygon bounding_boundary(const StreetGraph& g, double margin_deg) {
    if (g.empty()) throw std::invalid_argument("bounding_boundary of an empty graph");
    double min_lat = 90.0, max_lat = -90.0, min_lon = 180.0, max_lon = -180.0;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const GeoPoint& p = g.point_at(i);
        min_lat = std::min(min_lat, p.lat());
        max_lat = std::max(max_lat, p.lat());
        min_lon = std::min(min_lon, p.lon());
        max_lon = std::max(max_lon, p.lon());
    }
    min_lat -= margin_deg;
    max_lat += margin_deg;
    min_lon -= margin_deg;
    max_lon += margin_deg;
    return osm::BoundaryPolygon({GeoPoint(min_lat, min_lon), GeoPoint(min_lat, max_lon),
                                 GeoPoint(max_lat, max_lon), GeoPoint(max_lat, min_lon),
                                 GeoPoint(min_lat, min_lon)});
}

SyntheticCorpus plan_two_type_corpus(std::size_t dense_count, std::size_t sparse_count,
                                     std::uint64_t seed) {
    SyntheticCorpus corpus;
    std::uint64_t next_seed = seed;

    // Two planted types: small dense lattices and large long-block
    // lattices. Sizes are fixed per type so topology-driven metrics take
    // exactly one value per type and geometry-driven metrics stay tightly
    // bimodal; whichever representative survives the correlation pruning,
    // the type gap survives with it.
    for (std::size_t i = 0; i < dense_count; ++i) {
        SyntheticSpec spec;
        spec.kind = CityKind::kSparse;
        spec.size = 7;
        spec.sparse_block = 2;
        spec.seed = ++next_seed;
        spec.noise = 0.2;
        spec.spacing_deg = 0.0008;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "dense_%02zu", i);
        corpus.cities.push_back({buf, spec, 0.0});
    }
    for (std::size_t i = 0; i < sparse_count; ++i) {
        SyntheticSpec spec;
        spec.kind = CityKind::kSparse;
        spec.size = 15;
        spec.seed = ++next_seed;
        spec.noise = 0.2;
        spec.spacing_deg = 0.0025;
        spec.sparse_block = 7;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "sparse_%02zu", i);
        corpus.cities.push_back({buf, spec, 0.0});
    }

    // Plant populations strictly monotone in node count.
    for (SyntheticCity& city : corpus.cities) {
        const StreetGraph g = generate_synthetic_city(city.spec);
        const double n = static_cast<double>(g.node_count());
        city.population = std::round(150.0 * n + n * n / 10.0);
    }
    return corpus;
}

void write_synthetic_corpus(const SyntheticCorpus& corpus, const std::string& out_dir,
                            std::uint64_t manifest_seed) {
    const fs::path root(out_dir);
    fs::create_directories(root / "maps");
    fs::create_directories(root / "boundaries");

    csv::Table indicators;
    indicators.header = {"city_id", "population", "area_km2"};

    std::vector<const SyntheticCity*> ordered;
    for (const auto& c : corpus.cities) ordered.push_back(&c);
    std::sort(ordered.begin(), ordered.end(),
              [](const auto* a, const auto* b) { return a->id < b->id; });

    for (const SyntheticCity* city : ordered) {
        const StreetGraph g = generate_synthetic_city(city->spec);
        write_osm_xml(g, (root / "maps" / (city->id + ".osm")).string());
        const osm::BoundaryPolygon boundary = bounding_boundary(g);
        osm::write_boundary_geojson(boundary,
                                    (root / "boundaries" / (city->id + ".json")).string());

        // Bounding-box area in km^2.
        double min_lat = 90.0, max_lat = -90.0, min_lon = 180.0, max_lon = -180.0;
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            const GeoPoint& p = g.point_at(i);
            min_lat = std::min(min_lat, p.lat());
            max_lat = std::max(max_lat, p.lat());
            min_lon = std::min(min_lon, p.lon());
            max_lon = std::max(max_lon, p.lon());
        }
        const double mid_lat = (min_lat + max_lat) / 2.0;
        const double km_per_deg = kPi * kEarthRadiusM / 180.0 / 1000.0;
        const double area = (max_lat - min_lat) * km_per_deg * (max_lon - min_lon) *
                            km_per_deg * std::cos(mid_lat * kPi / 180.0);

        indicators.rows.push_back({city->id, csv::format_double(city->population),
                                   csv::format_double(std::max(area, 1e-6))});
    }
    csv::write_file((root / "indicators.csv").string(), indicators);

    std::ofstream manifest(root / "manifest.ini", std::ios::trunc);
    if (!manifest) throw std::runtime_error("cannot write manifest.ini");
    manifest << "[corpus]\n";
    manifest << "output = out\n";
    manifest << "seed = " << manifest_seed << "\n";
    manifest << "indicators = indicators.csv\n\n";
    // The planted types sit far apart in feature space; a small isomap
    // neighborhood would split along them, so size k to bridge the larger
    // type group.
    manifest << "[params]\n";
    manifest << "isomap_k = "
             << std::max<std::size_t>(5, (corpus.cities.size() + 1) / 2) << "\n\n";
    manifest << "[cities]\n";
    for (const SyntheticCity* city : ordered) {
        manifest << city->id << " = maps/" << city->id << ".osm, boundaries/" << city->id
                 << ".json\n";
    }
    if (!manifest) throw std::runtime_error("write failed: manifest.ini");
}

}  // namespace citynet::pipeline
