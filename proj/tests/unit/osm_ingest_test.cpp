#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "citynet/metrics.hpp"
#include "citynet/osm.hpp"
#include "oracles.hpp"

using namespace citynet;
using namespace citynet::osm;

namespace {

const char* kTwoNodeOneWay = R"(<?xml version="1.0" encoding="UTF-8"?>
<osm version="0.6">
  <node id="1" lat="0.0" lon="0.0"/>
  <node id="2" lat="0.0" lon="0.001"/>
  <way id="10">
    <nd ref="1"/>
    <nd ref="2"/>
    <tag k="highway" v="residential"/>
  </way>
</osm>
)";

GraphBuildOptions residential_only() {
    GraphBuildOptions options;
    options.highway_filter = {"residential"};
    return options;
}

BoundaryPolygon square(double lo, double hi) {
    return BoundaryPolygon({GeoPoint(lo, lo), GeoPoint(lo, hi), GeoPoint(hi, hi),
                            GeoPoint(hi, lo), GeoPoint(lo, lo)});
}

}  // namespace

TEST_CASE("parse_osm_xml captures nodes, ways and tags") {
    const OsmDocument doc = parse_osm_xml(kTwoNodeOneWay);
    REQUIRE(doc.nodes.size() == 2);
    REQUIRE(doc.ways.size() == 1);
    CHECK(doc.dropped_ways == 0);
    CHECK(doc.nodes.at(1).lat() == 0.0);
    CHECK(doc.nodes.at(2).lon() == 0.001);
    CHECK(doc.ways[0].id == 10);
    CHECK(doc.ways[0].node_refs == std::vector<NodeId>{1, 2});
    CHECK(doc.ways[0].tags.at("highway") == "residential");
}

TEST_CASE("parse_osm_xml drops ways referencing missing nodes, with a warning count") {
    const OsmDocument doc = parse_osm_xml(R"(<osm>
      <node id="1" lat="0" lon="0"/>
      <way id="5"><nd ref="1"/><nd ref="77"/></way>
    </osm>)");
    CHECK(doc.nodes.size() == 1);
    CHECK(doc.ways.empty());
    CHECK(doc.dropped_ways == 1);
}

TEST_CASE("parse_osm_xml accepts an empty root and ignores unknown elements") {
    CHECK(parse_osm_xml("<osm/>").nodes.empty());
    const OsmDocument doc = parse_osm_xml(R"(<osm>
      <bounds minlat="0" minlon="0" maxlat="1" maxlon="1"/>
      <relation id="1"><member type="way" ref="2"/></relation>
    </osm>)");
    CHECK(doc.nodes.empty());
    CHECK(doc.ways.empty());
}

TEST_CASE("parse_osm_xml reports malformed XML with a line number") {
    try {
        parse_osm_xml("<osm>\n<node id=\"1\" lat=\"0\" lon=\"0\"/>\n<way></osm>\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("parse_osm_xml rejects a non-osm root") {
    CHECK_THROWS_AS(parse_osm_xml("<planet><node id=\"1\"/></planet>"), ParseError);
}

TEST_CASE("boundary polygon validation") {
    CHECK_THROWS_AS(BoundaryPolygon({GeoPoint(0, 0), GeoPoint(0, 1), GeoPoint(0, 0)}),
                    std::invalid_argument);  // too few points
    CHECK_THROWS_AS(BoundaryPolygon({GeoPoint(0, 0), GeoPoint(0, 1), GeoPoint(1, 1),
                                     GeoPoint(1, 0)}),
                    std::invalid_argument);  // not closed
    // Bow-tie: segments cross.
    CHECK_THROWS_AS(BoundaryPolygon({GeoPoint(0, 0), GeoPoint(1, 1), GeoPoint(0, 1),
                                     GeoPoint(1, 0), GeoPoint(0, 0)}),
                    std::invalid_argument);
}

TEST_CASE("point containment: interior, exterior, boundary, hole") {
    const BoundaryPolygon box = square(0.0, 1.0);
    CHECK(box.contains(GeoPoint(0.5, 0.5)));
    CHECK(!box.contains(GeoPoint(1.5, 0.5)));
    CHECK(box.contains(GeoPoint(0.0, 0.5)));  // exactly on an edge
    CHECK(box.contains(GeoPoint(1.0, 1.0)));  // exactly on a vertex

    const BoundaryPolygon with_hole(
        {GeoPoint(0, 0), GeoPoint(0, 1), GeoPoint(1, 1), GeoPoint(1, 0), GeoPoint(0, 0)},
        {{GeoPoint(0.25, 0.25), GeoPoint(0.25, 0.75), GeoPoint(0.75, 0.75),
          GeoPoint(0.75, 0.25), GeoPoint(0.25, 0.25)}});
    CHECK(!with_hole.contains(GeoPoint(0.5, 0.5)));  // inside the hole
    CHECK(with_hole.contains(GeoPoint(0.1, 0.1)));   // between rings
    CHECK(with_hole.contains(GeoPoint(0.25, 0.5)));  // on the hole ring
}

TEST_CASE("clip keeps inside documents unchanged and empties outside ones") {
    const OsmDocument doc = parse_osm_xml(kTwoNodeOneWay);
    SUBCASE("all inside") {
        const OsmDocument kept = clip(doc, square(-0.5, 0.5));
        CHECK(kept.nodes.size() == 2);
        REQUIRE(kept.ways.size() == 1);
        CHECK(kept.ways[0].node_refs == doc.ways[0].node_refs);
    }
    SUBCASE("all outside") {
        const OsmDocument kept = clip(doc, square(5.0, 6.0));
        CHECK(kept.nodes.empty());
        CHECK(kept.ways.empty());
    }
}

TEST_CASE("clip splits a way at an outside node into surviving runs") {
    const OsmDocument doc = parse_osm_xml(R"(<osm>
      <node id="1" lat="0.1" lon="0.1"/>
      <node id="2" lat="0.1" lon="0.2"/>
      <node id="3" lat="5.0" lon="5.0"/>
      <node id="4" lat="0.1" lon="0.3"/>
      <node id="5" lat="0.1" lon="0.4"/>
      <way id="9"><nd ref="1"/><nd ref="2"/><nd ref="3"/><nd ref="4"/><nd ref="5"/></way>
    </osm>)");
    const OsmDocument kept = clip(doc, square(0.0, 1.0));
    CHECK(kept.nodes.size() == 4);
    REQUIRE(kept.ways.size() == 2);
    CHECK(kept.ways[0].node_refs == std::vector<NodeId>{1, 2});
    CHECK(kept.ways[1].node_refs == std::vector<NodeId>{4, 5});
    CHECK(kept.ways[0].id == 9);
}

TEST_CASE("clip drops runs shorter than two nodes") {
    const OsmDocument doc = parse_osm_xml(R"(<osm>
      <node id="1" lat="0.1" lon="0.1"/>
      <node id="2" lat="5.0" lon="5.0"/>
      <node id="3" lat="0.2" lon="0.2"/>
      <way id="9"><nd ref="1"/><nd ref="2"/><nd ref="3"/></way>
    </osm>)");
    const OsmDocument kept = clip(doc, square(0.0, 1.0));
    CHECK(kept.nodes.size() == 2);
    CHECK(kept.ways.empty());
}

TEST_CASE("clip is idempotent") {
    oracles::TestRng rng(31);
    std::string xml = "<osm>";
    for (int i = 0; i < 40; ++i) {
        xml += "<node id=\"" + std::to_string(i + 1) + "\" lat=\"" +
               std::to_string(2.0 * rng.unit() - 0.5) + "\" lon=\"" +
               std::to_string(2.0 * rng.unit() - 0.5) + "\"/>";
    }
    for (int w = 0; w < 10; ++w) {
        xml += "<way id=\"" + std::to_string(100 + w) + "\">";
        for (int t = 0; t < 4; ++t) {
            xml += "<nd ref=\"" + std::to_string(rng.index(40) + 1) + "\"/>";
        }
        xml += "</way>";
    }
    xml += "</osm>";

    const OsmDocument doc = parse_osm_xml(xml);
    const BoundaryPolygon box = square(0.0, 1.0);
    const OsmDocument once = clip(doc, box);
    const OsmDocument twice = clip(once, box);

    CHECK(once.nodes == twice.nodes);
    REQUIRE(once.ways.size() == twice.ways.size());
    for (std::size_t i = 0; i < once.ways.size(); ++i) {
        CHECK(once.ways[i].id == twice.ways[i].id);
        CHECK(once.ways[i].node_refs == twice.ways[i].node_refs);
    }
}

TEST_CASE("build_street_graph: two-node way becomes a two-way street") {
    const StreetGraph g = build_street_graph(parse_osm_xml(kTwoNodeOneWay), residential_only());
    CHECK(g.node_count() == 2);
    REQUIRE(g.edge_count() == 2);
    CHECK(g.edges()[0].weight_m == g.edges()[1].weight_m);
    CHECK(g.has_edge(1, 2));
    CHECK(g.has_edge(2, 1));
}

TEST_CASE("build_street_graph contracts pass-through geometry nodes") {
    const OsmDocument doc = parse_osm_xml(R"(<osm>
      <node id="1" lat="0.0" lon="0.0"/>
      <node id="2" lat="0.0" lon="0.001"/>
      <node id="3" lat="0.0" lon="0.002"/>
      <way id="9"><nd ref="1"/><nd ref="2"/><nd ref="3"/><tag k="highway" v="residential"/></way>
    </osm>)");
    const StreetGraph g = build_street_graph(doc, residential_only());
    CHECK(g.node_count() == 2);  // node 2 contracted away
    CHECK(!g.has_node(2));
    REQUIRE(g.edge_count() == 2);

    const double hops = great_circle_distance(doc.nodes.at(1), doc.nodes.at(2)) +
                        great_circle_distance(doc.nodes.at(2), doc.nodes.at(3));
    CHECK(g.edges()[0].weight_m == doctest::Approx(hops).epsilon(1e-12));

    SUBCASE("keep_geometry_nodes retains the interior vertex") {
        GraphBuildOptions options = residential_only();
        options.keep_geometry_nodes = true;
        const StreetGraph full = build_street_graph(doc, options);
        CHECK(full.node_count() == 3);
        CHECK(full.edge_count() == 4);
    }
}

TEST_CASE("build_street_graph: crossing one-way streets") {
    // Two ways crossing at the shared node 3, both oneway=yes.
    const OsmDocument doc = parse_osm_xml(R"(<osm>
      <node id="1" lat="0.0" lon="-0.001"/>
      <node id="2" lat="0.0" lon="0.001"/>
      <node id="3" lat="0.0" lon="0.0"/>
      <node id="4" lat="-0.001" lon="0.0"/>
      <node id="5" lat="0.001" lon="0.0"/>
      <way id="20"><nd ref="1"/><nd ref="3"/><nd ref="2"/>
        <tag k="highway" v="residential"/><tag k="oneway" v="yes"/></way>
      <way id="21"><nd ref="4"/><nd ref="3"/><nd ref="5"/>
        <tag k="highway" v="residential"/><tag k="oneway" v="yes"/></way>
    </osm>)");
    const StreetGraph g = build_street_graph(doc, residential_only());
    CHECK(g.node_count() == 5);
    CHECK(g.edge_count() == 4);
    CHECK(g.has_edge(1, 3));
    CHECK(g.has_edge(3, 2));
    CHECK(g.has_edge(4, 3));
    CHECK(g.has_edge(3, 5));
    CHECK(!g.has_edge(3, 1));

    // Reversed one-way flips the emitted direction.
    OsmDocument reversed = doc;
    reversed.ways[0].tags["oneway"] = "-1";
    const StreetGraph r = build_street_graph(reversed, residential_only());
    CHECK(r.has_edge(3, 1));
    CHECK(r.has_edge(2, 3));
    CHECK(!r.has_edge(1, 3));
}

TEST_CASE("build_street_graph honors the highway filter and errors when empty") {
    const OsmDocument doc = parse_osm_xml(R"(<osm>
      <node id="1" lat="0.0" lon="0.0"/>
      <node id="2" lat="0.0" lon="0.001"/>
      <way id="9"><nd ref="1"/><nd ref="2"/><tag k="highway" v="footway"/></way>
    </osm>)");
    CHECK_THROWS_WITH_AS(build_street_graph(doc, residential_only()),
                         "no street data after filtering", std::runtime_error);

    GraphBuildOptions empty;
    empty.highway_filter.clear();
    CHECK_THROWS_AS(build_street_graph(doc, empty), std::invalid_argument);
}

TEST_CASE("default highway filter covers the main classes plus _link variants") {
    const auto filter = default_highway_filter();
    CHECK(filter.contains("residential"));
    CHECK(filter.contains("motorway"));
    CHECK(filter.contains("motorway_link"));
    CHECK(filter.contains("living_street"));
    CHECK(!filter.contains("footway"));
    CHECK(parse_highway_filter("a, b,,c") == std::set<std::string>{"a", "b", "c"});
}

TEST_CASE("build_street_graph discards self-loop segments") {
    // A loop way returning to its start with no other intersections.
    const OsmDocument doc = parse_osm_xml(R"(<osm>
      <node id="1" lat="0.0" lon="0.0"/>
      <node id="2" lat="0.0" lon="0.001"/>
      <node id="3" lat="0.001" lon="0.001"/>
      <node id="4" lat="0.002" lon="0.0"/>
      <way id="9"><nd ref="1"/><nd ref="2"/><nd ref="3"/><nd ref="1"/>
        <tag k="highway" v="residential"/></way>
      <way id="10"><nd ref="1"/><nd ref="4"/><tag k="highway" v="residential"/></way>
    </osm>)");
    const StreetGraph g = build_street_graph(doc, residential_only());
    // The 1->2->3->1 run collapses to a self-loop at node 1 and is dropped;
    // only the 1<->4 street remains.
    CHECK(g.node_count() == 2);
    CHECK(g.edge_count() == 2);
}

TEST_CASE("total street length is conserved through contraction") {
    // Jittered grid: full rows are ways, but only every third column is a
    // way, so most interior row nodes are pass-through geometry and get
    // contracted into segment weights.
    oracles::TestRng rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        const int rows = 5, cols = 7;
        std::vector<std::vector<GeoPoint>> pt(rows);
        std::string xml = "<osm>";
        for (int i = 0; i < rows; ++i) {
            for (int j = 0; j < cols; ++j) {
                const double lat = 0.001 * i + 0.0002 * rng.unit();
                const double lon = 0.001 * j + 0.0002 * rng.unit();
                pt[i].emplace_back(lat, lon);
                char buf[160];
                std::snprintf(buf, sizeof(buf), "<node id=\"%d\" lat=\"%.17g\" lon=\"%.17g\"/>",
                              1 + i * cols + j, lat, lon);
                xml += buf;
            }
        }
        double expected_length = 0.0;
        int way_id = 100;
        auto open_way = [&] { xml += "<way id=\"" + std::to_string(way_id++) + "\">"; };
        auto close_way = [&] { xml += "<tag k=\"highway\" v=\"residential\"/></way>"; };
        for (int i = 0; i < rows; ++i) {
            open_way();
            for (int j = 0; j < cols; ++j) {
                xml += "<nd ref=\"" + std::to_string(1 + i * cols + j) + "\"/>";
                if (j > 0) expected_length += great_circle_distance(pt[i][j - 1], pt[i][j]);
            }
            close_way();
        }
        for (int j = 0; j < cols; j += 3) {
            open_way();
            for (int i = 0; i < rows; ++i) {
                xml += "<nd ref=\"" + std::to_string(1 + i * cols + j) + "\"/>";
                if (i > 0) expected_length += great_circle_distance(pt[i - 1][j], pt[i][j]);
            }
            close_way();
        }
        xml += "</osm>";

        const StreetGraph g = build_street_graph(parse_osm_xml(xml), residential_only());
        CHECK(g.total_street_length_m() == doctest::Approx(expected_length).epsilon(1e-6));
        CHECK(g.node_count() == rows * 3);  // only the crossing columns remain
        for (const Edge& e : g.edges()) {
            CHECK(e.weight_m > 0.0);
            CHECK(std::isfinite(e.weight_m));
            CHECK(e.origin != e.destination);
        }
    }
}

TEST_CASE("two-way street count equals retained non-oneway segments") {
    const OsmDocument doc = parse_osm_xml(R"(<osm>
      <node id="1" lat="0.0" lon="0.0"/>
      <node id="2" lat="0.0" lon="0.001"/>
      <node id="3" lat="0.0" lon="0.002"/>
      <node id="4" lat="0.001" lon="0.001"/>
      <way id="20"><nd ref="1"/><nd ref="2"/><tag k="highway" v="residential"/></way>
      <way id="21"><nd ref="2"/><nd ref="3"/><tag k="highway" v="residential"/></way>
      <way id="22"><nd ref="2"/><nd ref="4"/>
        <tag k="highway" v="residential"/><tag k="oneway" v="yes"/></way>
    </osm>)");
    const StreetGraph g = build_street_graph(doc, residential_only());
    CHECK(metrics::two_way_streets(g) == 2);  // ways 20 and 21
    CHECK(g.edge_count() == 5);
}

TEST_CASE("boundary GeoJSON round trip") {
    const std::string dir = "osm_test_tmp";
    std::filesystem::create_directories(dir);
    const BoundaryPolygon boundary(
        {GeoPoint(0, 0), GeoPoint(0, 1), GeoPoint(1, 1), GeoPoint(1, 0), GeoPoint(0, 0)},
        {{GeoPoint(0.2, 0.2), GeoPoint(0.2, 0.4), GeoPoint(0.4, 0.4), GeoPoint(0.4, 0.2),
          GeoPoint(0.2, 0.2)}});
    write_boundary_geojson(boundary, dir + "/b.json");
    const BoundaryPolygon back = read_boundary_geojson(dir + "/b.json");
    CHECK(back.exterior().size() == 5);
    REQUIRE(back.holes().size() == 1);
    CHECK(back.contains(GeoPoint(0.1, 0.1)));
    CHECK(!back.contains(GeoPoint(0.3, 0.3)));

    {
        std::ofstream out(dir + "/feature.json");
        out << R"({"type":"Feature","properties":{},"geometry":{"type":"Polygon",
              "coordinates":[[[0,0],[1,0],[1,1],[0,1],[0,0]]]}})";
    }
    const BoundaryPolygon feature = read_boundary_geojson(dir + "/feature.json");
    CHECK(feature.contains(GeoPoint(0.5, 0.5)));
    std::filesystem::remove_all(dir);
}
