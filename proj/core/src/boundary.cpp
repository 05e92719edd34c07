#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "citynet/osm.hpp"

namespace citynet::osm {

namespace {

// Orientation of the triple (a, b, c): >0 counterclockwise, <0 clockwise,
// 0 collinear. Works in the (lon, lat) plane.
double cross(const GeoPoint& a, const GeoPoint& b, const GeoPoint& c) {
    return (b.lon() - a.lon()) * (c.lat() - a.lat()) - (b.lat() - a.lat()) * (c.lon() - a.lon());
}

bool within_bbox(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b) {
    return std::min(a.lon(), b.lon()) <= p.lon() && p.lon() <= std::max(a.lon(), b.lon()) &&
           std::min(a.lat(), b.lat()) <= p.lat() && p.lat() <= std::max(a.lat(), b.lat());
}

bool on_segment(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b) {
    return cross(a, b, p) == 0.0 && within_bbox(p, a, b);
}

bool segments_intersect(const GeoPoint& a, const GeoPoint& b, const GeoPoint& c,
                        const GeoPoint& d) {
    const double d1 = cross(c, d, a);
    const double d2 = cross(c, d, b);
    const double d3 = cross(a, b, c);
    const double d4 = cross(a, b, d);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
        return true;
    }
    if (d1 == 0.0 && within_bbox(a, c, d)) return true;
    if (d2 == 0.0 && within_bbox(b, c, d)) return true;
    if (d3 == 0.0 && within_bbox(c, a, b)) return true;
    if (d4 == 0.0 && within_bbox(d, a, b)) return true;
    return false;
}

void validate_ring(const std::vector<GeoPoint>& ring, const char* what) {
    if (ring.size() < 4) {
        throw std::invalid_argument(std::string(what) + ": ring needs >= 4 points");
    }
    if (!(ring.front() == ring.back())) {
        throw std::invalid_argument(std::string(what) + ": ring is not closed");
    }
    const std::size_t m = ring.size() - 1;  // segment count
    for (std::size_t i = 0; i < m; ++i) {
        if (ring[i] == ring[i + 1]) {
            throw std::invalid_argument(std::string(what) + ": zero-length ring segment");
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 2; j < m; ++j) {
            if (i == 0 && j == m - 1) continue;  // closure segments share a point
            if (segments_intersect(ring[i], ring[i + 1], ring[j], ring[j + 1])) {
                throw std::invalid_argument(std::string(what) + ": self-intersecting ring");
            }
        }
    }
}

bool ring_crossings_odd(const GeoPoint& p, const std::vector<GeoPoint>& ring) {
    bool odd = false;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        const GeoPoint& a = ring[i];
        const GeoPoint& b = ring[i + 1];
        if ((a.lat() > p.lat()) != (b.lat() > p.lat())) {
            const double x_at =
                a.lon() + (b.lon() - a.lon()) * (p.lat() - a.lat()) / (b.lat() - a.lat());
            if (p.lon() < x_at) odd = !odd;
        }
    }
    return odd;
}

std::vector<GeoPoint> ring_from_json(const nlohmann::json& coords, const char* what) {
    std::vector<GeoPoint> ring;
    for (const auto& pair : coords) {
        if (!pair.is_array() || pair.size() < 2) {
            throw std::invalid_argument(std::string(what) + ": coordinate must be [lon, lat]");
        }
        ring.emplace_back(pair[1].get<double>(), pair[0].get<double>());
    }
    return ring;
}

}  // namespace

BoundaryPolygon::BoundaryPolygon(std::vector<GeoPoint> exterior,
                                 std::vector<std::vector<GeoPoint>> holes)
    : exterior_(std::move(exterior)), holes_(std::move(holes)) {
    validate_ring(exterior_, "boundary exterior");
    for (const auto& hole : holes_) validate_ring(hole, "boundary hole");
}

bool BoundaryPolygon::contains(const GeoPoint& p) const {
    for (std::size_t i = 0; i + 1 < exterior_.size(); ++i) {
        if (on_segment(p, exterior_[i], exterior_[i + 1])) return true;
    }
    for (const auto& hole : holes_) {
        for (std::size_t i = 0; i + 1 < hole.size(); ++i) {
            if (on_segment(p, hole[i], hole[i + 1])) return true;
        }
    }

    bool odd = ring_crossings_odd(p, exterior_);
    for (const auto& hole : holes_) {
        if (ring_crossings_odd(p, hole)) odd = !odd;
    }
    return odd;
}

BoundaryPolygon read_boundary_geojson(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);

    nlohmann::json root;
    try {
        in >> root;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }

    const nlohmann::json* geometry = &root;
    if (root.value("type", "") == "Feature") geometry = &root.at("geometry");
    if (geometry->value("type", "") != "Polygon") {
        throw std::invalid_argument(path + ": expected a Polygon geometry");
    }
    const auto& rings = geometry->at("coordinates");
    if (!rings.is_array() || rings.empty()) {
        throw std::invalid_argument(path + ": polygon has no rings");
    }

    std::vector<GeoPoint> exterior = ring_from_json(rings[0], path.c_str());
    std::vector<std::vector<GeoPoint>> holes;
    for (std::size_t i = 1; i < rings.size(); ++i) {
        holes.push_back(ring_from_json(rings[i], path.c_str()));
    }
    return BoundaryPolygon(std::move(exterior), std::move(holes));
}

void write_boundary_geojson(const BoundaryPolygon& boundary, const std::string& path) {
    nlohmann::json rings = nlohmann::json::array();
    auto emit_ring = [&](const std::vector<GeoPoint>& ring) {
        nlohmann::json out = nlohmann::json::array();
        for (const GeoPoint& p : ring) out.push_back({p.lon(), p.lat()});
        rings.push_back(std::move(out));
    };
    emit_ring(boundary.exterior());
    for (const auto& hole : boundary.holes()) emit_ring(hole);

    nlohmann::json root{{"type", "Polygon"}, {"coordinates", std::move(rings)}};
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << root.dump(2) << '\n';
}

OsmDocument clip(const OsmDocument& doc, const BoundaryPolygon& boundary) {
    OsmDocument out;
    out.dropped_ways = doc.dropped_ways;

    for (const auto& [id, pt] : doc.nodes) {
        if (boundary.contains(pt)) out.nodes.emplace(id, pt);
    }

    for (const OsmWay& way : doc.ways) {
        std::vector<NodeId> run;
        auto flush = [&] {
            if (run.size() >= 2) {
                out.ways.push_back({way.id, run, way.tags});
            }
            run.clear();
        };
        for (NodeId ref : way.node_refs) {
            if (out.nodes.contains(ref)) {
                run.push_back(ref);
            } else {
                flush();
            }
        }
        flush();
    }
    return out;
}

}  // namespace citynet::osm
