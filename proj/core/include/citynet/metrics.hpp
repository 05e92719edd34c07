#ifndef CITYNET_METRICS_HPP
#define CITYNET_METRICS_HPP

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "citynet/betweenness.hpp"
#include "citynet/shortest_paths.hpp"
#include "citynet/street_graph.hpp"

namespace citynet::metrics {

/// Raised by a metric whose value does not exist on the given graph
/// (an empty degree histogram, no reachable pairs, zero variance...).
/// compute_features turns it into an undefined flag instead of a failure.
class MetricUndefined : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MetricConfig {
    double entropy_log_base = 2.0;
    PathWeighting path_weighting = PathWeighting::kMeters;
};

/// All-pairs shortest-path summary shared by the path-based metrics.
struct PathProfile {
    double distance_sum = 0.0;       // over reachable ordered pairs, i != j
    std::size_t reachable_pairs = 0;
    std::size_t ordered_pairs = 0;
    std::vector<double> eccentricity;  // per node index; NaN when nothing is reachable
};

PathProfile all_pairs_profile(const StreetGraph& g,
                              PathWeighting weighting = PathWeighting::kMeters);

/// Lazy per-graph caches so a registry evaluation runs the expensive
/// all-pairs and betweenness passes at most once.
class MetricContext {
public:
    MetricContext(const StreetGraph& g, MetricConfig config)
        : graph_(g), config_(std::move(config)) {}

    const StreetGraph& graph() const { return graph_; }
    const MetricConfig& config() const { return config_; }
    const PathProfile& paths();
    const std::vector<double>& node_betweenness();  // may throw MetricUndefined

private:
    const StreetGraph& graph_;
    MetricConfig config_;
    std::optional<PathProfile> paths_;
    std::optional<std::vector<double>> betweenness_;
};

// --- individual metrics -------------------------------------------------

/// Shannon entropy of the total-degree histogram; 0 log 0 := 0.
double degree_entropy(const StreetGraph& g, double log_base = 2.0);

struct PathSummary {
    double average;       // mean shortest distance over reachable ordered pairs
    double reachability;  // reachable ordered pairs / |V|(|V|-1)
};
PathSummary average_shortest_path(const StreetGraph& g,
                                  PathWeighting weighting = PathWeighting::kMeters);

/// Pearson correlation over edges between origin out-degree and
/// destination in-degree.
double degree_assortativity(const StreetGraph& g);

struct EccentricityProfile {
    double diameter;       // max node eccentricity
    double radius;         // min node eccentricity
    double mean_inverse;   // mean of 1/ecc over nodes with a reachable target
};
EccentricityProfile eccentricity_profile(const StreetGraph& g,
                                         PathWeighting weighting = PathWeighting::kMeters);

/// |E| / (|V| (|V|-1)).
double planar_density(const StreetGraph& g);

/// Sum of (B_max - B_v) over nodes divided by |V|(|V|-1), with B the
/// normalized betweenness.
double central_point_dominance(const StreetGraph& g,
                               PathWeighting weighting = PathWeighting::kMeters);

/// Textbook variant: same numerator over (|V|-1).
double central_point_dominance_classical(const StreetGraph& g,
                                         PathWeighting weighting = PathWeighting::kMeters);

/// Count of unordered node pairs connected in both directions.
std::size_t two_way_streets(const StreetGraph& g);

/// 3 * triangles / connected triples on the undirected simple projection.
double global_clustering(const StreetGraph& g);

// --- registry and feature vectors ----------------------------------------

struct FeatureVector {
    std::string city_id;
    std::vector<std::string> names;             // registry order
    std::vector<std::optional<double>> values;  // nullopt marks an undefined flag

    std::optional<double> value_of(std::string_view name) const;
};

using MetricFn = std::function<double(MetricContext&)>;

/// Ordered metric table. The core set (entropy, average shortest path,
/// assortativity, diameter, radius, density, central point dominance,
/// two-way streets, global clustering) is always present and cannot be
/// removed or disabled; plumbing metrics can be toggled.
class MetricRegistry {
public:
    struct Entry {
        std::string name;
        MetricFn compute;
        bool enabled = true;
        bool core = false;
    };

    /// The standard table: the core metrics, the reciprocal eccentricity
    /// aggregate, the classical central-point-dominance alias, and the
    /// plumbing set (node_count, edge_count, mean_degree, reachability).
    static MetricRegistry standard();

    void add(std::string name, MetricFn fn, bool enabled = true, bool core = false);
    void set_enabled(std::string_view name, bool enabled);  // throws for core metrics
    const std::vector<Entry>& entries() const { return entries_; }
    std::vector<std::string> enabled_names() const;

private:
    std::vector<Entry> entries_;
};

/// Evaluates every enabled metric; MetricUndefined becomes an undefined
/// flag, never a silent zero.
FeatureVector compute_features(const std::string& city_id, const StreetGraph& g,
                               const MetricRegistry& registry, const MetricConfig& config = {});

/// Feature table CSV (+ JSON sidecar with registry order, config, and
/// per-city undefined flags). Rows are written sorted by city_id.
void write_feature_table(const std::vector<FeatureVector>& rows, const std::string& csv_path,
                         const std::string& sidecar_path, const MetricConfig& config);

}  // namespace citynet::metrics

#endif
