#include "citynet/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "citynet/csv.hpp"
#include "citynet/detail/parallel.hpp"
#include "citynet/street_graph_io.hpp"

namespace citynet::pipeline {

namespace fs = std::filesystem;

namespace {

struct Paths {
    fs::path out;
    fs::path graphs;
    fs::path embeddings;
    fs::path clusters;
    fs::path features_csv, features_json;
    fs::path correlation_csv, kept_json;
    fs::path assignments_csv, quality_json;
    fs::path report_json, run_log;

    explicit Paths(const CorpusManifest& m) : out(m.output_dir) {
        graphs = out / "graphs";
        embeddings = out / "embeddings";
        clusters = out / "clusters";
        features_csv = out / "features.csv";
        features_json = out / "features.json";
        correlation_csv = out / "correlation.csv";
        kept_json = out / "kept_features.json";
        assignments_csv = clusters / "assignments.csv";
        quality_json = clusters / "quality.json";
        report_json = out / "report.json";
        run_log = out / "run_log.json";
    }

    fs::path nodes_csv(const std::string& id) const { return graphs / (id + ".nodes.csv"); }
    fs::path edges_csv(const std::string& id) const { return graphs / (id + ".edges.csv"); }
    fs::path embedding_csv(const std::string& name) const { return embeddings / (name + ".csv"); }
    fs::path embedding_json(const std::string& name) const {
        return embeddings / (name + ".json");
    }
};

/// Outputs are fresh when they all exist and none is older than any input.
bool outputs_fresh(const std::vector<fs::path>& outputs, const std::vector<fs::path>& inputs) {
    fs::file_time_type oldest_output = fs::file_time_type::max();
    for (const fs::path& p : outputs) {
        std::error_code ec;
        const auto t = fs::last_write_time(p, ec);
        if (ec) return false;
        oldest_output = std::min(oldest_output, t);
    }
    for (const fs::path& p : inputs) {
        std::error_code ec;
        const auto t = fs::last_write_time(p, ec);
        if (!ec && t > oldest_output) return false;
    }
    return true;
}

std::vector<CityEntry> active_cities(const CorpusManifest& m) {
    std::vector<CityEntry> cities;
    for (const CityEntry& c : m.cities) {
        if (std::find(m.exclude.begin(), m.exclude.end(), c.id) == m.exclude.end()) {
            cities.push_back(c);
        }
    }
    return cities;
}

metrics::MetricConfig metric_config(const CorpusManifest& m) {
    return {m.params.entropy_log_base, m.params.path_weighting};
}

class StageTimer {
public:
    StageTimer(RunResult& result, std::string name)
        : result_(result), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}

    void finish(const std::string& status, const std::string& detail = "") {
        const auto elapsed = std::chrono::steady_clock::now() - start_;
        result_.stages.push_back(
            {name_, status, std::chrono::duration<double>(elapsed).count(), detail});
    }

private:
    RunResult& result_;
    std::string name_;
    std::chrono::steady_clock::time_point start_;
};

std::vector<std::string> read_kept_features(const fs::path& kept_json) {
    std::ifstream in(kept_json);
    if (!in) throw std::runtime_error("cannot open " + kept_json.string());
    nlohmann::json root;
    in >> root;
    return root.at("kept").get<std::vector<std::string>>();
}

select::FeatureMatrix clustering_points(const CorpusManifest& m, const Paths& paths) {
    if (m.params.cluster_source == "pca2d" || m.params.cluster_source == "isomap2d") {
        const std::string name = m.params.cluster_source == "pca2d" ? "pca_2d" : "isomap_2d";
        const proj::Embedding e = proj::read_embedding_csv(paths.embedding_csv(name).string());
        std::vector<std::string> col_names;
        for (std::size_t c = 0; c < e.dims; ++c) col_names.push_back("c" + std::to_string(c + 1));
        return select::FeatureMatrix(e.city_ids, col_names, e.coordinates);
    }
    const auto matrix = select::FeatureMatrix::read_csv(paths.features_csv.string());
    const auto kept = read_kept_features(paths.kept_json);
    return proj::standardize(matrix.select_columns(kept).drop_undefined_rows());
}

}  // namespace

bool stage_ingest(const CorpusManifest& m, bool force, RunResult& result) {
    StageTimer timer(result, "ingest");
    const Paths paths(m);
    fs::create_directories(paths.graphs);

    const std::vector<CityEntry> cities = active_cities(m);
    struct CityOutcome {
        std::string status;  // "run" | "skipped" | "failed"
        std::string reason;
    };
    std::vector<CityOutcome> outcomes(cities.size());

    detail::parallel_for(cities.size(), [&](std::size_t i) {
        const CityEntry& city = cities[i];
        const fs::path nodes = paths.nodes_csv(city.id);
        const fs::path edges = paths.edges_csv(city.id);
        if (!force && outputs_fresh({nodes, edges},
                                    {fs::path(m.manifest_path), fs::path(city.osm_path),
                                     fs::path(city.boundary_path)})) {
            outcomes[i] = {"skipped", ""};
            return;
        }
        try {
            const osm::OsmDocument doc = osm::parse_osm_file(city.osm_path);
            const osm::BoundaryPolygon boundary = osm::read_boundary_geojson(city.boundary_path);
            const osm::OsmDocument clipped = osm::clip(doc, boundary);
            osm::GraphBuildOptions options;
            options.highway_filter = m.params.highway_filter;
            options.keep_geometry_nodes = m.params.keep_geometry_nodes;
            const StreetGraph g = osm::build_street_graph(clipped, options);

            const fs::path nodes_tmp = nodes.string() + ".tmp";
            const fs::path edges_tmp = edges.string() + ".tmp";
            write_graph_csv(g, nodes_tmp.string(), edges_tmp.string());
            fs::rename(nodes_tmp, nodes);
            fs::rename(edges_tmp, edges);
            outcomes[i] = {"run", ""};
        } catch (const std::exception& e) {
            outcomes[i] = {"failed", e.what()};
            std::error_code ec;
            fs::remove(nodes, ec);
            fs::remove(edges, ec);
        }
    });

    std::size_t ran = 0, skipped = 0;
    for (std::size_t i = 0; i < cities.size(); ++i) {
        if (outcomes[i].status == "run") {
            ++ran;
        } else if (outcomes[i].status == "skipped") {
            ++skipped;
        } else {
            result.excluded_cities.push_back({cities[i].id, outcomes[i].reason});
        }
    }
    timer.finish(ran > 0 ? "run" : "skipped",
                 std::to_string(ran) + " ingested, " + std::to_string(skipped) + " fresh, " +
                     std::to_string(cities.size() - ran - skipped) + " failed");
    return ran > 0;
}

bool stage_features(const CorpusManifest& m, bool force, RunResult& result) {
    StageTimer timer(result, "features");
    const Paths paths(m);

    // Cities with graph artifacts present; ingest failures drop out here.
    std::vector<std::string> ids;
    std::vector<fs::path> inputs{fs::path(m.manifest_path)};
    for (const CityEntry& city : active_cities(m)) {
        const fs::path nodes = paths.nodes_csv(city.id);
        const fs::path edges = paths.edges_csv(city.id);
        if (fs::exists(nodes) && fs::exists(edges)) {
            ids.push_back(city.id);
            inputs.push_back(nodes);
            inputs.push_back(edges);
        }
    }
    if (ids.empty()) throw std::runtime_error("features: no ingested graphs under " +
                                              paths.graphs.string());

    // Fresh only when the timestamps hold AND the table still covers
    // exactly the cities that have graphs (a city excluded by a failed
    // re-ingest must drop out of the table).
    auto same_city_set = [&] {
        try {
            const auto existing = select::FeatureMatrix::read_csv(paths.features_csv.string());
            std::vector<std::string> sorted_ids = ids;  // table rows sort by city_id
            std::sort(sorted_ids.begin(), sorted_ids.end());
            return existing.city_ids() == sorted_ids;
        } catch (const std::exception&) {
            return false;
        }
    };
    if (!force && outputs_fresh({paths.features_csv, paths.features_json}, inputs) &&
        same_city_set()) {
        timer.finish("skipped");
        return false;
    }

    const metrics::MetricRegistry registry = metrics::MetricRegistry::standard();
    const metrics::MetricConfig config = metric_config(m);

    std::vector<metrics::FeatureVector> vectors(ids.size());
    std::vector<std::string> errors(ids.size());
    detail::parallel_for(ids.size(), [&](std::size_t i) {
        try {
            const StreetGraph g = read_graph_csv(paths.nodes_csv(ids[i]).string(),
                                                 paths.edges_csv(ids[i]).string());
            vectors[i] = metrics::compute_features(ids[i], g, registry, config);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (!errors[i].empty()) {
            throw std::runtime_error("features: " + ids[i] + ": " + errors[i] +
                                     " (see " + paths.nodes_csv(ids[i]).string() + ")");
        }
    }

    metrics::write_feature_table(vectors, paths.features_csv.string(),
                                 paths.features_json.string(), config);
    timer.finish("run", std::to_string(ids.size()) + " cities");
    return true;
}

bool stage_select(const CorpusManifest& m, bool force, RunResult& result) {
    StageTimer timer(result, "select");
    const Paths paths(m);

    if (!force && outputs_fresh({paths.correlation_csv, paths.kept_json},
                                {fs::path(m.manifest_path), paths.features_csv})) {
        timer.finish("skipped");
        return false;
    }

    const auto matrix = select::FeatureMatrix::read_csv(paths.features_csv.string());
    const select::CorrelationResult corr = select::correlation_matrix(matrix);
    const select::SelectionResult selection =
        select::select_features(corr.matrix, m.params.selection_threshold,
                                m.params.selection_policy, m.seed);

    select::write_correlation_csv(corr.matrix, paths.correlation_csv.string());
    select::write_selection_json(selection, corr.excluded_constant,
                                 m.params.selection_threshold, m.params.selection_policy,
                                 paths.kept_json.string());
    timer.finish("run", std::to_string(selection.kept.size()) + " of " +
                            std::to_string(matrix.cols()) + " features kept");
    return true;
}

bool stage_project(const CorpusManifest& m, bool force, RunResult& result) {
    StageTimer timer(result, "project");
    const Paths paths(m);
    fs::create_directories(paths.embeddings);

    const auto matrix = select::FeatureMatrix::read_csv(paths.features_csv.string());
    const auto kept = read_kept_features(paths.kept_json);
    std::vector<std::string> dropped;
    const auto complete = matrix.select_columns(kept).drop_undefined_rows(&dropped);

    if (complete.rows() < 3 || complete.cols() < 1) {
        throw std::runtime_error("project: not enough complete data (" +
                                 std::to_string(complete.rows()) + " cities x " +
                                 std::to_string(complete.cols()) + " kept features, see " +
                                 paths.features_csv.string() + ")");
    }
    // A strongly pruned corpus can legitimately keep a single feature;
    // 2-D embeddings then do not exist and are skipped.
    const std::size_t max_dims = std::min(complete.rows() - 1, complete.cols());
    std::vector<std::string> names{"pca_1d", "isomap_1d"};
    if (max_dims >= 2) {
        names.push_back("pca_2d");
        names.push_back("isomap_2d");
    }

    const std::vector<fs::path> inputs{fs::path(m.manifest_path), paths.features_csv,
                                       paths.kept_json};
    std::vector<fs::path> outputs;
    for (const auto& name : names) {
        outputs.push_back(paths.embedding_csv(name));
        outputs.push_back(paths.embedding_json(name));
    }
    if (!force && outputs_fresh(outputs, inputs)) {
        timer.finish("skipped");
        return false;
    }

    const auto standardized = proj::standardize(complete);
    auto emit = [&](const proj::Embedding& e, const std::string& name) {
        proj::write_embedding_csv(e, paths.embedding_csv(name).string(),
                                  paths.embedding_json(name).string());
    };
    emit(proj::pca(standardized, 1), "pca_1d");
    emit(proj::isomap(standardized, 1, m.params.isomap_k), "isomap_1d");
    if (max_dims >= 2) {
        emit(proj::pca(standardized, 2), "pca_2d");
        emit(proj::isomap(standardized, 2, m.params.isomap_k), "isomap_2d");
    }

    std::string detail = std::to_string(standardized.rows()) + " cities";
    if (max_dims < 2) detail += ", 1-D only (single kept feature)";
    if (!dropped.empty()) {
        detail += ", dropped incomplete:";
        for (const auto& id : dropped) detail += " " + id;
    }
    timer.finish("run", detail);
    return true;
}

bool stage_cluster(const CorpusManifest& m, bool force, RunResult& result) {
    StageTimer timer(result, "cluster");
    const Paths paths(m);
    fs::create_directories(paths.clusters);

    std::vector<fs::path> inputs{fs::path(m.manifest_path), paths.features_csv,
                                 paths.kept_json};
    if (m.params.cluster_source == "pca2d") inputs.push_back(paths.embedding_csv("pca_2d"));
    if (m.params.cluster_source == "isomap2d") {
        inputs.push_back(paths.embedding_csv("isomap_2d"));
    }
    if (!force &&
        outputs_fresh({paths.assignments_csv, paths.quality_json}, inputs)) {
        timer.finish("skipped");
        return false;
    }

    const select::FeatureMatrix points = clustering_points(m, paths);

    cluster::SweepOptions options;
    options.k_min = m.params.k_min;
    options.k_max = m.params.k_max == 0
                        ? (points.rows() > 1 ? points.rows() - 1 : 1)
                        : std::min(m.params.k_max, points.rows() - 1);
    options.seeds_per_k = m.params.seeds_per_k;
    options.base_seed = m.seed;

    const cluster::QualityReport report = cluster::sweep_k(points, options);
    if (!report.selected_k) {
        throw std::runtime_error("cluster: sweep selected no k (" + report.selection_reason +
                                 "); see " + paths.quality_json.string());
    }
    const cluster::ClusterAssignment assignment = cluster::assignment_for(points, report);

    cluster::write_quality_json(report, paths.quality_json.string());
    cluster::write_assignment_csv(assignment, paths.assignments_csv.string());
    timer.finish("run", "selected k = " + std::to_string(*report.selected_k));
    return true;
}

bool stage_report(const CorpusManifest& m, bool force, RunResult& result) {
    StageTimer timer(result, "report");
    const Paths paths(m);

    std::vector<fs::path> inputs{fs::path(m.manifest_path), paths.quality_json,
                                 paths.assignments_csv, paths.embedding_csv("pca_1d"),
                                 paths.embedding_csv("isomap_1d")};
    if (!m.indicators_path.empty()) inputs.push_back(fs::path(m.indicators_path));
    if (!force && outputs_fresh({paths.report_json}, inputs)) {
        timer.finish("skipped");
        return false;
    }

    nlohmann::json report;
    {
        std::ifstream in(paths.quality_json);
        if (!in) throw std::runtime_error("report: missing " + paths.quality_json.string());
        nlohmann::json quality;
        in >> quality;
        report["selected_k"] = quality.at("selected_k");
        report["selection_reason"] = quality.at("selection_reason");
    }

    if (!m.indicators_path.empty()) {
        const IndicatorTable indicators = IndicatorTable::read_csv(m.indicators_path);
        const std::string& column = m.params.indicator_column;

        nlohmann::json corr{{"column", column}};
        for (const char* method : {"pca", "isomap"}) {
            const proj::Embedding e = proj::read_embedding_csv(
                paths.embedding_csv(std::string(method) + "_1d").string());
            const IndicatorCorrelation c = correlate_indicator(e, indicators, column);
            corr[method] = {{"r", c.r}, {"abs_r", c.abs_r}, {"n", c.n}};
        }
        report["indicator_correlation"] = std::move(corr);

        const cluster::ClusterAssignment assignment =
            cluster::read_assignment_csv(paths.assignments_csv.string());
        nlohmann::json profile = nlohmann::json::array();
        for (const ClusterProfileRow& row : cluster_profile(assignment, indicators)) {
            profile.push_back({{"cluster", row.cluster},
                               {"city_count", row.city_count},
                               {"population_share_pct", row.population_share_pct},
                               {"area_classes",
                                {{"tiny", row.area_classes[0]},
                                 {"small", row.area_classes[1]},
                                 {"medium", row.area_classes[2]},
                                 {"large", row.area_classes[3]}}}});
        }
        report["cluster_profile"] = std::move(profile);
    }

    std::ofstream out(paths.report_json, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + paths.report_json.string());
    out << report.dump(2) << '\n';
    timer.finish("run");
    return true;
}

namespace {

void write_run_log(const CorpusManifest& m, const RunResult& result,
                   std::chrono::system_clock::time_point started) {
    const Paths paths(m);
    nlohmann::json stages = nlohmann::json::array();
    for (const StageStatus& s : result.stages) {
        stages.push_back({{"name", s.name},
                          {"status", s.status},
                          {"seconds", s.seconds},
                          {"detail", s.detail}});
    }
    nlohmann::json excluded = nlohmann::json::array();
    for (const auto& [id, reason] : result.excluded_cities) {
        excluded.push_back({{"city", id}, {"reason", reason}});
    }

    const auto to_unix = [](std::chrono::system_clock::time_point t) {
        return std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch())
            .count();
    };
    nlohmann::json root{
        {"tool", "citynet"},
        {"version", "0.1.0"},
        {"seed", m.seed},
        {"manifest", m.manifest_path},
        {"parameters",
         {{"selection_threshold", m.params.selection_threshold},
          {"selection_policy",
           m.params.selection_policy == select::DropPolicy::kDeterministic ? "deterministic"
                                                                           : "seeded"},
          {"entropy_log_base", m.params.entropy_log_base},
          {"path_weighting",
           m.params.path_weighting == PathWeighting::kMeters ? "meters" : "hops"},
          {"isomap_k", m.params.isomap_k},
          {"cluster_source", m.params.cluster_source},
          {"seeds_per_k", m.params.seeds_per_k},
          {"keep_geometry_nodes", m.params.keep_geometry_nodes}}},
        {"stages", std::move(stages)},
        {"excluded_cities", std::move(excluded)},
        {"exit_code", result.exit_code},
        {"failure", result.failure},
        {"started_unix_ms", to_unix(started)},
        {"finished_unix_ms", to_unix(std::chrono::system_clock::now())},
    };
    std::ofstream out(paths.run_log, std::ios::trunc);
    if (out) out << root.dump(2) << '\n';
}

}  // namespace

RunResult run_pipeline(const CorpusManifest& m, bool force) {
    const auto started = std::chrono::system_clock::now();
    RunResult result;
    fs::create_directories(m.output_dir);

    using Stage = bool (*)(const CorpusManifest&, bool, RunResult&);
    struct Step {
        const char* name;
        bool enabled;
        Stage fn;
    };
    const Step steps[] = {
        {"ingest", m.stages.ingest, stage_ingest},
        {"features", m.stages.features, stage_features},
        {"select", m.stages.select, stage_select},
        {"project", m.stages.project, stage_project},
        {"cluster", m.stages.cluster, stage_cluster},
        {"report", m.stages.report, stage_report},
    };

    for (const Step& step : steps) {
        if (!step.enabled) {
            result.stages.push_back({step.name, "disabled", 0.0, ""});
            continue;
        }
        try {
            step.fn(m, force, result);
        } catch (const std::exception& e) {
            result.exit_code = 1;
            result.failure = std::string(step.name) + ": " + e.what();
            result.stages.push_back({step.name, "failed", 0.0, e.what()});
            break;
        }
    }

    write_run_log(m, result, started);
    return result;
}

}  // namespace citynet::pipeline
