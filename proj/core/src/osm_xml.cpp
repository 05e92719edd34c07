#include <expat.h>

#include <charconv>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>

#include "citynet/osm.hpp"

namespace citynet::osm {

namespace {

struct ParseState {
    OsmDocument doc;
    bool saw_root = false;
    bool root_is_osm = false;
    std::optional<OsmWay> current_way;
    std::string error;  // first structural error, reported after parse
    XML_Parser parser = nullptr;

    void fail(const std::string& message) {
        if (error.empty()) {
            error = message + " at line " +
                    std::to_string(XML_GetCurrentLineNumber(parser));
        }
        XML_StopParser(parser, XML_FALSE);
    }
};

const char* find_attr(const char** attrs, const char* name) {
    for (const char** a = attrs; *a; a += 2) {
        if (std::strcmp(a[0], name) == 0) return a[1];
    }
    return nullptr;
}

std::optional<double> attr_double(const char** attrs, const char* name) {
    const char* raw = find_attr(attrs, name);
    if (!raw) return std::nullopt;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(raw, raw + std::strlen(raw), value);
    if (ec != std::errc{} || *ptr != '\0') return std::nullopt;
    return value;
}

std::optional<NodeId> attr_id(const char** attrs, const char* name) {
    const char* raw = find_attr(attrs, name);
    if (!raw) return std::nullopt;
    NodeId value = 0;
    auto [ptr, ec] = std::from_chars(raw, raw + std::strlen(raw), value);
    if (ec != std::errc{} || *ptr != '\0') return std::nullopt;
    return value;
}

void XMLCALL on_start(void* user, const char* name, const char** attrs) {
    auto& st = *static_cast<ParseState*>(user);
    if (!st.saw_root) {
        st.saw_root = true;
        st.root_is_osm = std::strcmp(name, "osm") == 0;
        if (!st.root_is_osm) st.fail("expected <osm> root, found <" + std::string(name) + ">");
        return;
    }

    if (std::strcmp(name, "node") == 0) {
        const auto id = attr_id(attrs, "id");
        const auto lat = attr_double(attrs, "lat");
        const auto lon = attr_double(attrs, "lon");
        if (!id || !lat || !lon) return;  // placeholder/deleted nodes are ignored
        try {
            st.doc.nodes.insert_or_assign(*id, GeoPoint(*lat, *lon));
        } catch (const std::invalid_argument& e) {
            st.fail(std::string("invalid node coordinates: ") + e.what());
        }
    } else if (std::strcmp(name, "way") == 0) {
        const auto id = attr_id(attrs, "id");
        if (!id) return;
        st.current_way = OsmWay{*id, {}, {}};
    } else if (st.current_way && std::strcmp(name, "nd") == 0) {
        if (const auto ref = attr_id(attrs, "ref")) st.current_way->node_refs.push_back(*ref);
    } else if (st.current_way && std::strcmp(name, "tag") == 0) {
        const char* k = find_attr(attrs, "k");
        const char* v = find_attr(attrs, "v");
        if (k && v) st.current_way->tags.emplace(k, v);
    }
}

void XMLCALL on_end(void* user, const char* name) {
    auto& st = *static_cast<ParseState*>(user);
    if (st.current_way && std::strcmp(name, "way") == 0) {
        st.doc.ways.push_back(std::move(*st.current_way));
        st.current_way.reset();
    }
}

}  // namespace

OsmDocument parse_osm_xml(std::string_view bytes) {
    XML_Parser parser = XML_ParserCreate(nullptr);
    if (!parser) throw std::runtime_error("XML parser allocation failed");

    ParseState st;
    st.parser = parser;
    XML_SetUserData(parser, &st);
    XML_SetElementHandler(parser, on_start, on_end);

    const XML_Status status =
        XML_Parse(parser, bytes.data(), static_cast<int>(bytes.size()), XML_TRUE);
    const int line = static_cast<int>(XML_GetCurrentLineNumber(parser));
    const XML_Error code = XML_GetErrorCode(parser);
    XML_ParserFree(parser);

    if (!st.error.empty()) throw ParseError(st.error, line);
    if (status != XML_STATUS_OK) {
        throw ParseError(std::string("XML parse error: ") + XML_ErrorString(code), line);
    }
    if (!st.saw_root) throw ParseError("empty document, expected <osm> root", line);

    // Keep only ways whose refs all resolved; count the rest as warnings.
    std::vector<OsmWay> retained;
    retained.reserve(st.doc.ways.size());
    for (auto& way : st.doc.ways) {
        bool ok = true;
        for (NodeId ref : way.node_refs) {
            if (!st.doc.nodes.contains(ref)) {
                ok = false;
                break;
            }
        }
        if (ok) {
            retained.push_back(std::move(way));
        } else {
            ++st.doc.dropped_ways;
        }
    }
    st.doc.ways = std::move(retained);
    return st.doc;
}

OsmDocument parse_osm_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_osm_xml(buf.str());
}

}  // namespace citynet::osm
