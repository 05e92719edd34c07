#include "citynet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include <json.hpp>

#include "citynet/csv.hpp"

namespace citynet::metrics {

PathProfile all_pairs_profile(const StreetGraph& g, PathWeighting weighting) {
    const std::size_t n = g.node_count();
    PathProfile profile;
    profile.ordered_pairs = n < 2 ? 0 : n * (n - 1);
    profile.eccentricity.assign(n, std::numeric_limits<double>::quiet_NaN());

    for (std::size_t s = 0; s < n; ++s) {
        const std::vector<double> dist = dijkstra_from_index(g, s, weighting);
        double ecc = -1.0;
        for (std::size_t t = 0; t < n; ++t) {
            if (t == s || dist[t] == kUnreachable) continue;
            profile.distance_sum += dist[t];
            ++profile.reachable_pairs;
            ecc = std::max(ecc, dist[t]);
        }
        if (ecc >= 0.0) profile.eccentricity[s] = ecc;
    }
    return profile;
}

const PathProfile& MetricContext::paths() {
    if (!paths_) paths_ = all_pairs_profile(graph_, config_.path_weighting);
    return *paths_;
}

const std::vector<double>& MetricContext::node_betweenness() {
    if (!betweenness_) {
        if (graph_.node_count() < 3) {
            throw MetricUndefined("graph too small for betweenness normalization");
        }
        betweenness_ = betweenness_by_index(graph_, config_.path_weighting);
    }
    return *betweenness_;
}

double degree_entropy(const StreetGraph& g, double log_base) {
    if (g.node_count() == 0) throw MetricUndefined("degree entropy of an empty graph");
    const auto hist = g.degree_histogram(DegreeKind::kTotal);
    const double n = static_cast<double>(g.node_count());

    double sum = 0.0;
    for (const auto& [degree, count] : hist) {
        const double p = static_cast<double>(count) / n;
        sum += log_base == 2.0 ? p * std::log2(p) : p * std::log(p) / std::log(log_base);
    }
    return sum == 0.0 ? 0.0 : -sum;
}

PathSummary average_shortest_path(const StreetGraph& g, PathWeighting weighting) {
    if (g.node_count() < 2) throw MetricUndefined("average shortest path needs >= 2 nodes");
    const PathProfile profile = all_pairs_profile(g, weighting);
    if (profile.reachable_pairs == 0) throw MetricUndefined("no reachable pairs");
    return {profile.distance_sum / static_cast<double>(profile.reachable_pairs),
            static_cast<double>(profile.reachable_pairs) /
                static_cast<double>(profile.ordered_pairs)};
}

double degree_assortativity(const StreetGraph& g) {
    if (g.edge_count() < 2) throw MetricUndefined("assortativity needs >= 2 edges");

    double mean_x = 0.0, mean_y = 0.0;
    for (const Edge& e : g.edges()) {
        mean_x += static_cast<double>(g.out_degree(g.index_of(e.origin)));
        mean_y += static_cast<double>(g.in_degree(g.index_of(e.destination)));
    }
    const double m = static_cast<double>(g.edge_count());
    mean_x /= m;
    mean_y /= m;

    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (const Edge& e : g.edges()) {
        const double dx = static_cast<double>(g.out_degree(g.index_of(e.origin))) - mean_x;
        const double dy = static_cast<double>(g.in_degree(g.index_of(e.destination))) - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw MetricUndefined("assortativity undefined: endpoint degrees have zero variance");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

EccentricityProfile eccentricity_from_profile(const PathProfile& profile) {
    double diameter = -1.0;
    double radius = std::numeric_limits<double>::infinity();
    double inverse_sum = 0.0;
    std::size_t valid = 0;
    for (double ecc : profile.eccentricity) {
        if (std::isnan(ecc)) continue;
        diameter = std::max(diameter, ecc);
        radius = std::min(radius, ecc);
        inverse_sum += 1.0 / ecc;
        ++valid;
    }
    if (valid == 0) throw MetricUndefined("no node reaches another");
    return {diameter, radius, inverse_sum / static_cast<double>(valid)};
}

}  // namespace

EccentricityProfile eccentricity_profile(const StreetGraph& g, PathWeighting weighting) {
    if (g.node_count() < 2) throw MetricUndefined("eccentricity needs >= 2 nodes");
    return eccentricity_from_profile(all_pairs_profile(g, weighting));
}

double planar_density(const StreetGraph& g) {
    const double n = static_cast<double>(g.node_count());
    if (g.node_count() < 2) throw MetricUndefined("density needs >= 2 nodes");
    return static_cast<double>(g.edge_count()) / (n * (n - 1.0));
}

namespace {

double cpd_numerator(const std::vector<double>& b) {
    const double b_max = *std::max_element(b.begin(), b.end());
    double sum = 0.0;
    for (double v : b) sum += b_max - v;
    return sum;
}

}  // namespace

double central_point_dominance(const StreetGraph& g, PathWeighting weighting) {
    if (g.node_count() < 3) throw MetricUndefined("central point dominance needs >= 3 nodes");
    const auto b = betweenness_by_index(g, weighting);
    const double n = static_cast<double>(g.node_count());
    return cpd_numerator(b) / (n * (n - 1.0));
}

double central_point_dominance_classical(const StreetGraph& g, PathWeighting weighting) {
    if (g.node_count() < 3) throw MetricUndefined("central point dominance needs >= 3 nodes");
    const auto b = betweenness_by_index(g, weighting);
    return cpd_numerator(b) / (static_cast<double>(g.node_count()) - 1.0);
}

std::size_t two_way_streets(const StreetGraph& g) {
    std::size_t doubled = 0;
    for (const Edge& e : g.edges()) {
        if (g.has_edge(e.destination, e.origin)) ++doubled;
    }
    return doubled / 2;
}

double global_clustering(const StreetGraph& g) {
    const std::size_t n = g.node_count();

    // Undirected simple projection as sorted neighbor lists.
    std::vector<std::vector<std::uint32_t>> nbr(n);
    for (const Edge& e : g.edges()) {
        const auto a = static_cast<std::uint32_t>(g.index_of(e.origin));
        const auto b = static_cast<std::uint32_t>(g.index_of(e.destination));
        nbr[a].push_back(b);
        nbr[b].push_back(a);
    }
    for (auto& list : nbr) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }

    std::size_t triples = 0;
    for (const auto& list : nbr) triples += list.size() * (list.size() - 1) / 2;
    if (triples == 0) throw MetricUndefined("no connected triples");

    // Each triangle a<b<c is counted once: from edge (a,b) with c > b.
    std::size_t triangles = 0;
    for (std::uint32_t a = 0; a < n; ++a) {
        for (std::uint32_t b : nbr[a]) {
            if (b <= a) continue;
            auto ai = std::upper_bound(nbr[a].begin(), nbr[a].end(), b);
            auto bi = std::upper_bound(nbr[b].begin(), nbr[b].end(), b);
            while (ai != nbr[a].end() && bi != nbr[b].end()) {
                if (*ai < *bi) {
                    ++ai;
                } else if (*bi < *ai) {
                    ++bi;
                } else {
                    ++triangles;
                    ++ai;
                    ++bi;
                }
            }
        }
    }
    return 3.0 * static_cast<double>(triangles) / static_cast<double>(triples);
}

std::optional<double> FeatureVector::value_of(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return values[i];
    }
    return std::nullopt;
}

MetricRegistry MetricRegistry::standard() {
    MetricRegistry reg;
    reg.add("node_count", [](MetricContext& ctx) {
        return static_cast<double>(ctx.graph().node_count());
    });
    reg.add("edge_count", [](MetricContext& ctx) {
        return static_cast<double>(ctx.graph().edge_count());
    });
    reg.add("mean_degree", [](MetricContext& ctx) {
        if (ctx.graph().node_count() == 0) throw MetricUndefined("mean degree of empty graph");
        return 2.0 * static_cast<double>(ctx.graph().edge_count()) /
               static_cast<double>(ctx.graph().node_count());
    });
    reg.add(
        "degree_entropy",
        [](MetricContext& ctx) {
            return degree_entropy(ctx.graph(), ctx.config().entropy_log_base);
        },
        true, true);
    reg.add(
        "average_shortest_path",
        [](MetricContext& ctx) {
            const auto& p = ctx.paths();
            if (p.reachable_pairs == 0) throw MetricUndefined("no reachable pairs");
            return p.distance_sum / static_cast<double>(p.reachable_pairs);
        },
        true, true);
    reg.add("reachability", [](MetricContext& ctx) {
        const auto& p = ctx.paths();
        if (p.ordered_pairs == 0) throw MetricUndefined("reachability needs >= 2 nodes");
        return static_cast<double>(p.reachable_pairs) / static_cast<double>(p.ordered_pairs);
    });
    reg.add(
        "degree_assortativity",
        [](MetricContext& ctx) { return degree_assortativity(ctx.graph()); }, true, true);
    reg.add(
        "diameter",
        [](MetricContext& ctx) { return eccentricity_from_profile(ctx.paths()).diameter; },
        true, true);
    reg.add(
        "radius",
        [](MetricContext& ctx) { return eccentricity_from_profile(ctx.paths()).radius; }, true,
        true);
    reg.add("mean_inverse_eccentricity", [](MetricContext& ctx) {
        return eccentricity_from_profile(ctx.paths()).mean_inverse;
    });
    reg.add(
        "planar_density", [](MetricContext& ctx) { return planar_density(ctx.graph()); }, true,
        true);
    reg.add(
        "central_point_dominance",
        [](MetricContext& ctx) {
            const auto& b = ctx.node_betweenness();
            const double n = static_cast<double>(ctx.graph().node_count());
            return cpd_numerator(b) / (n * (n - 1.0));
        },
        true, true);
    reg.add("cpd_classical", [](MetricContext& ctx) {
        const auto& b = ctx.node_betweenness();
        return cpd_numerator(b) / (static_cast<double>(ctx.graph().node_count()) - 1.0);
    });
    reg.add(
        "two_way_streets",
        [](MetricContext& ctx) { return static_cast<double>(two_way_streets(ctx.graph())); },
        true, true);
    reg.add(
        "global_clustering", [](MetricContext& ctx) { return global_clustering(ctx.graph()); },
        true, true);
    return reg;
}

void MetricRegistry::add(std::string name, MetricFn fn, bool enabled, bool core) {
    for (const Entry& e : entries_) {
        if (e.name == name) throw std::invalid_argument("duplicate metric name: " + name);
    }
    entries_.push_back({std::move(name), std::move(fn), enabled, core});
}

void MetricRegistry::set_enabled(std::string_view name, bool enabled) {
    for (Entry& e : entries_) {
        if (e.name == name) {
            if (e.core && !enabled) {
                throw std::invalid_argument("core metric cannot be disabled: " +
                                            std::string(name));
            }
            e.enabled = enabled;
            return;
        }
    }
    throw std::invalid_argument("unknown metric: " + std::string(name));
}

std::vector<std::string> MetricRegistry::enabled_names() const {
    std::vector<std::string> names;
    for (const Entry& e : entries_) {
        if (e.enabled) names.push_back(e.name);
    }
    return names;
}

FeatureVector compute_features(const std::string& city_id, const StreetGraph& g,
                               const MetricRegistry& registry, const MetricConfig& config) {
    if (g.node_count() == 0) throw std::invalid_argument("compute_features on an empty graph");

    MetricContext ctx(g, config);
    FeatureVector fv;
    fv.city_id = city_id;
    for (const auto& entry : registry.entries()) {
        if (!entry.enabled) continue;
        fv.names.push_back(entry.name);
        try {
            fv.values.push_back(entry.compute(ctx));
        } catch (const MetricUndefined&) {
            fv.values.push_back(std::nullopt);
        }
    }
    return fv;
}

void write_feature_table(const std::vector<FeatureVector>& rows, const std::string& csv_path,
                         const std::string& sidecar_path, const MetricConfig& config) {
    std::vector<const FeatureVector*> sorted;
    sorted.reserve(rows.size());
    for (const auto& r : rows) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(),
              [](const FeatureVector* a, const FeatureVector* b) {
                  return a->city_id < b->city_id;
              });

    csv::Table table;
    table.header.push_back("city_id");
    if (!sorted.empty()) {
        for (const auto& name : sorted.front()->names) table.header.push_back(name);
    }
    nlohmann::json flags = nlohmann::json::object();
    for (const FeatureVector* fv : sorted) {
        if (!sorted.empty() && fv->names != sorted.front()->names) {
            throw std::invalid_argument("feature-name set differs across the corpus");
        }
        std::vector<std::string> row{fv->city_id};
        nlohmann::json undefined = nlohmann::json::array();
        for (std::size_t i = 0; i < fv->values.size(); ++i) {
            if (fv->values[i]) {
                row.push_back(csv::format_double(*fv->values[i]));
            } else {
                row.emplace_back();
                undefined.push_back(fv->names[i]);
            }
        }
        if (!undefined.empty()) flags[fv->city_id] = std::move(undefined);
        table.rows.push_back(std::move(row));
    }
    csv::write_file(csv_path, table);

    nlohmann::json sidecar{
        {"feature_order", std::vector<std::string>(table.header.begin() + 1, table.header.end())},
        {"entropy_log_base", config.entropy_log_base},
        {"path_weighting",
         config.path_weighting == PathWeighting::kMeters ? "meters" : "hops"},
        {"flags", std::move(flags)},
    };
    std::ofstream out(sidecar_path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + sidecar_path);
    out << sidecar.dump(2) << '\n';
}

}  // namespace citynet::metrics
