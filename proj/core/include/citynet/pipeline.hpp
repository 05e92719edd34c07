#ifndef CITYNET_PIPELINE_HPP
#define CITYNET_PIPELINE_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "citynet/clustering.hpp"
#include "citynet/feature_select.hpp"
#include "citynet/metrics.hpp"
#include "citynet/osm.hpp"
#include "citynet/projection.hpp"

namespace citynet::pipeline {

/// Manifest problems map to exit code 2.
class ManifestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CityEntry {
    std::string id;
    std::string osm_path;       // absolute after manifest resolution
    std::string boundary_path;  // absolute after manifest resolution
};

struct PipelineParams {
    std::set<std::string> highway_filter = osm::default_highway_filter();
    bool keep_geometry_nodes = false;
    double entropy_log_base = 2.0;
    PathWeighting path_weighting = PathWeighting::kMeters;
    double selection_threshold = 0.5;
    select::DropPolicy selection_policy = select::DropPolicy::kDeterministic;
    std::size_t isomap_k = 5;
    std::string cluster_source = "features";  // features | pca2d | isomap2d
    std::size_t k_min = 2;
    std::size_t k_max = 0;  // 0: cities - 1
    std::size_t seeds_per_k = 10;
    std::string indicator_column = "population";
};

struct StageToggles {
    bool ingest = true;
    bool features = true;
    bool select = true;
    bool project = true;
    bool cluster = true;
    bool report = true;
};

/// Parsed and path-resolved run configuration.
struct CorpusManifest {
    std::vector<CityEntry> cities;
    std::string indicators_path;  // empty when absent
    std::string output_dir;
    std::uint64_t seed = 0;
    std::vector<std::string> exclude;
    StageToggles stages;
    PipelineParams params;
    std::string manifest_path;

    /// Reads the INI-style manifest; all paths resolve relative to it.
    /// Throws ManifestError on syntax errors, duplicate city ids, or
    /// missing referenced files.
    static CorpusManifest read_file(const std::string& path);
};

struct IndicatorTable {
    std::vector<std::string> city_ids;
    std::vector<std::string> columns;  // population, area_km2, extras
    std::vector<double> values;        // row-major

    static IndicatorTable read_csv(const std::string& path);

    std::size_t column_index(std::string_view name) const;  // throws if absent
    std::optional<double> value(std::string_view city_id, std::size_t column) const;
};

struct IndicatorCorrelation {
    double r = 0.0;      // signed
    double abs_r = 0.0;  // reported statistic
    std::size_t n = 0;   // matched cities
};

/// Pearson correlation between a 1-D embedding coordinate and an indicator
/// column over matched city ids. Throws when the embedding is not 1-D,
/// fewer than three cities match, or the column is constant.
IndicatorCorrelation correlate_indicator(const proj::Embedding& embedding_1d,
                                         const IndicatorTable& indicators,
                                         std::string_view column);

struct ClusterProfileRow {
    std::size_t cluster = 0;
    std::size_t city_count = 0;
    double population_share_pct = 0.0;
    // Quartile bins of area over the matched cities: tiny, small, medium, large.
    std::array<std::size_t, 4> area_classes{};
};

/// Per-cluster population share and area-class histogram. Throws when the
/// assignment and the indicators share no city.
std::vector<ClusterProfileRow> cluster_profile(const cluster::ClusterAssignment& assignment,
                                               const IndicatorTable& indicators);

struct StageStatus {
    std::string name;
    std::string status;  // "run" | "skipped" | "disabled"
    double seconds = 0.0;
    std::string detail;
};

struct RunResult {
    int exit_code = 0;  // 0 ok, 1 stage failure
    std::vector<StageStatus> stages;
    std::vector<std::pair<std::string, std::string>> excluded_cities;  // (id, reason)
    std::string failure;  // set when exit_code != 0, names the failing artifact
};

/// Runs ingestion, feature extraction, selection, projection, clustering
/// and reporting with file-based stage boundaries under the manifest's
/// output directory. A stage is skipped when its outputs are newer than
/// its inputs, unless `force` is set. Writes run_log.json last.
RunResult run_pipeline(const CorpusManifest& manifest, bool force = false);

/// Individual stages, exposed for the matching CLI subcommands. Each
/// returns true when work was done, false when outputs were fresh.
bool stage_ingest(const CorpusManifest& manifest, bool force, RunResult& result);
bool stage_features(const CorpusManifest& manifest, bool force, RunResult& result);
bool stage_select(const CorpusManifest& manifest, bool force, RunResult& result);
bool stage_project(const CorpusManifest& manifest, bool force, RunResult& result);
bool stage_cluster(const CorpusManifest& manifest, bool force, RunResult& result);
bool stage_report(const CorpusManifest& manifest, bool force, RunResult& result);

}  // namespace citynet::pipeline

#endif
