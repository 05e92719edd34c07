#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>

#include "citynet/pipeline.hpp"

namespace citynet::pipeline {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::vector<std::string> split_list(std::string_view value) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        std::size_t comma = value.find(',', start);
        if (comma == std::string_view::npos) comma = value.size();
        std::string item = trim(value.substr(start, comma - start));
        if (!item.empty()) out.push_back(std::move(item));
        start = comma + 1;
    }
    return out;
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "yes" || value == "1") return true;
    if (value == "false" || value == "no" || value == "0") return false;
    throw ManifestError("manifest: " + key + " must be a boolean, got '" + value + "'");
}

std::uint64_t parse_u64_field(const std::string& value, const std::string& key) {
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || p != value.data() + value.size()) {
        throw ManifestError("manifest: " + key + " must be an unsigned integer, got '" + value +
                            "'");
    }
    return out;
}

double parse_double_field(const std::string& value, const std::string& key) {
    double out = 0.0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || p != value.data() + value.size()) {
        throw ManifestError("manifest: " + key + " must be a number, got '" + value + "'");
    }
    return out;
}

void apply_param(PipelineParams& params, const std::string& key, const std::string& value) {
    if (key == "highway_filter") {
        params.highway_filter = osm::parse_highway_filter(value);
        if (params.highway_filter.empty()) {
            throw ManifestError("manifest: highway_filter must not be empty");
        }
    } else if (key == "keep_geometry_nodes") {
        params.keep_geometry_nodes = parse_bool(value, key);
    } else if (key == "entropy_log_base") {
        params.entropy_log_base = parse_double_field(value, key);
        if (params.entropy_log_base <= 1.0) {
            throw ManifestError("manifest: entropy_log_base must exceed 1");
        }
    } else if (key == "path_weighting") {
        if (value == "meters") {
            params.path_weighting = PathWeighting::kMeters;
        } else if (value == "hops") {
            params.path_weighting = PathWeighting::kHops;
        } else {
            throw ManifestError("manifest: path_weighting must be meters or hops");
        }
    } else if (key == "selection_threshold") {
        params.selection_threshold = parse_double_field(value, key);
    } else if (key == "selection_policy") {
        if (value == "deterministic") {
            params.selection_policy = select::DropPolicy::kDeterministic;
        } else if (value == "seeded") {
            params.selection_policy = select::DropPolicy::kSeeded;
        } else {
            throw ManifestError("manifest: selection_policy must be deterministic or seeded");
        }
    } else if (key == "isomap_k") {
        params.isomap_k = parse_u64_field(value, key);
    } else if (key == "cluster_source") {
        if (value != "features" && value != "pca2d" && value != "isomap2d") {
            throw ManifestError("manifest: cluster_source must be features, pca2d or isomap2d");
        }
        params.cluster_source = value;
    } else if (key == "k_min") {
        params.k_min = parse_u64_field(value, key);
    } else if (key == "k_max") {
        params.k_max = value == "auto" ? 0 : parse_u64_field(value, key);
    } else if (key == "seeds_per_k") {
        params.seeds_per_k = parse_u64_field(value, key);
    } else if (key == "indicator_column") {
        params.indicator_column = value;
    } else {
        throw ManifestError("manifest: unknown [params] key '" + key + "'");
    }
}

void apply_stage(StageToggles& stages, const std::string& key, const std::string& value) {
    const bool enabled = parse_bool(value, key);
    if (key == "ingest") {
        stages.ingest = enabled;
    } else if (key == "features") {
        stages.features = enabled;
    } else if (key == "select") {
        stages.select = enabled;
    } else if (key == "project") {
        stages.project = enabled;
    } else if (key == "cluster") {
        stages.cluster = enabled;
    } else if (key == "report") {
        stages.report = enabled;
    } else {
        throw ManifestError("manifest: unknown [stages] key '" + key + "'");
    }
}

}  // namespace

CorpusManifest CorpusManifest::read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ManifestError("cannot open manifest " + path);

    const fs::path manifest_abs = fs::absolute(path);
    const fs::path base = manifest_abs.parent_path();
    auto resolve = [&](const std::string& p) { return (base / p).lexically_normal().string(); };

    CorpusManifest m;
    m.manifest_path = manifest_abs.string();
    m.output_dir = resolve("out");

    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = trim(line);
        if (text.empty() || text.front() == '#' || text.front() == ';') continue;

        if (text.front() == '[') {
            if (text.back() != ']') {
                throw ManifestError("manifest line " + std::to_string(line_no) +
                                    ": unterminated section");
            }
            section = trim(std::string_view(text).substr(1, text.size() - 2));
            if (section != "corpus" && section != "params" && section != "stages" &&
                section != "cities") {
                throw ManifestError("manifest: unknown section [" + section + "]");
            }
            continue;
        }

        const std::size_t eq = text.find('=');
        if (eq == std::string::npos) {
            throw ManifestError("manifest line " + std::to_string(line_no) +
                                ": expected key = value");
        }
        const std::string key = trim(std::string_view(text).substr(0, eq));
        const std::string value = trim(std::string_view(text).substr(eq + 1));
        if (key.empty()) {
            throw ManifestError("manifest line " + std::to_string(line_no) + ": empty key");
        }

        if (section == "corpus") {
            if (key == "output") {
                m.output_dir = resolve(value);
            } else if (key == "seed") {
                m.seed = parse_u64_field(value, key);
            } else if (key == "indicators") {
                m.indicators_path = resolve(value);
            } else if (key == "exclude") {
                m.exclude = split_list(value);
            } else {
                throw ManifestError("manifest: unknown [corpus] key '" + key + "'");
            }
        } else if (section == "params") {
            apply_param(m.params, key, value);
        } else if (section == "stages") {
            apply_stage(m.stages, key, value);
        } else if (section == "cities") {
            const auto parts = split_list(value);
            if (parts.size() != 2) {
                throw ManifestError("manifest line " + std::to_string(line_no) + ": city '" +
                                    key + "' needs 'osm_path, boundary_path'");
            }
            m.cities.push_back({key, resolve(parts[0]), resolve(parts[1])});
        } else {
            throw ManifestError("manifest line " + std::to_string(line_no) +
                                ": key outside a section");
        }
    }

    if (m.cities.empty()) throw ManifestError("manifest: no cities listed");

    std::set<std::string> seen;
    for (const CityEntry& city : m.cities) {
        if (!seen.insert(city.id).second) {
            throw ManifestError("manifest: duplicate city id '" + city.id + "'");
        }
        if (!fs::exists(city.osm_path)) {
            throw ManifestError("manifest: missing OSM file for '" + city.id +
                                "': " + city.osm_path);
        }
        if (!fs::exists(city.boundary_path)) {
            throw ManifestError("manifest: missing boundary file for '" + city.id +
                                "': " + city.boundary_path);
        }
    }
    if (!m.indicators_path.empty() && !fs::exists(m.indicators_path)) {
        throw ManifestError("manifest: missing indicators file " + m.indicators_path);
    }
    for (const std::string& id : m.exclude) {
        if (!seen.contains(id)) {
            throw ManifestError("manifest: excluded city '" + id + "' is not in [cities]");
        }
    }
    return m;
}

}  // namespace citynet::pipeline
