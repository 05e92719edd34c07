#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "citynet/pipeline.hpp"
#include "citynet/synthetic.hpp"

namespace {

namespace fs = std::filesystem;
using citynet::pipeline::CorpusManifest;
using citynet::pipeline::RunResult;

void print_stages(const RunResult& result) {
    for (const auto& stage : result.stages) {
        std::printf("%-10s %-8s %8.3fs  %s\n", stage.name.c_str(), stage.status.c_str(),
                    stage.seconds, stage.detail.c_str());
    }
    for (const auto& [id, reason] : result.excluded_cities) {
        std::printf("excluded   %-24s %s\n", id.c_str(), reason.c_str());
    }
    if (!result.failure.empty()) std::fprintf(stderr, "error: %s\n", result.failure.c_str());
}

int run_stage(const CorpusManifest& manifest,
              bool (*stage)(const CorpusManifest&, bool, RunResult&), bool force) {
    RunResult result;
    fs::create_directories(manifest.output_dir);
    try {
        stage(manifest, force, result);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        print_stages(result);
        return 1;
    }
    print_stages(result);
    return 0;
}

int run_profile(const CorpusManifest& manifest) {
    if (manifest.indicators_path.empty()) {
        std::fprintf(stderr, "error: profile needs an indicators file in the manifest\n");
        return 1;
    }
    try {
        const auto assignment = citynet::cluster::read_assignment_csv(
            (fs::path(manifest.output_dir) / "clusters" / "assignments.csv").string());
        const auto indicators =
            citynet::pipeline::IndicatorTable::read_csv(manifest.indicators_path);
        std::printf("%-8s %-7s %-12s %-6s %-6s %-7s %s\n", "cluster", "cities", "pop_share_%",
                    "tiny", "small", "medium", "large");
        for (const auto& row : citynet::pipeline::cluster_profile(assignment, indicators)) {
            std::printf("%-8zu %-7zu %-12.2f %-6zu %-6zu %-7zu %zu\n", row.cluster,
                        row.city_count, row.population_share_pct, row.area_classes[0],
                        row.area_classes[1], row.area_classes[2], row.area_classes[3]);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"citynet: street-network topology features, projection and clustering"};
    app.require_subcommand(1);

    std::string manifest_path;
    std::string out_override;
    std::optional<std::uint64_t> seed_override;
    std::string highway_override;
    bool force = false;

    bool keep_geometry_nodes = false;
    std::string indicator_column;

    app.add_option("--manifest", manifest_path, "Path to the corpus manifest (INI)");
    app.add_option("--out", out_override, "Override the manifest output directory");
    app.add_option("--seed", seed_override, "Override the manifest seed");
    app.add_option("--highway-filter", highway_override,
                   "Comma-separated highway tag values to retain");
    app.add_flag("--keep-geometry-nodes", keep_geometry_nodes,
                 "Keep degree-2 geometry nodes as graph vertices");
    app.add_option("--indicator-column", indicator_column,
                   "Indicator column for the correlation report (default population)");
    app.add_flag("--force", force, "Re-run stages even when outputs are fresh");

    auto* cmd_ingest = app.add_subcommand("ingest", "Parse, clip and build city graphs");
    auto* cmd_features = app.add_subcommand("features", "Extract the feature table");
    auto* cmd_select = app.add_subcommand("select", "Correlation pruning of features");
    auto* cmd_project = app.add_subcommand("project", "PCA and Isomap embeddings");
    auto* cmd_cluster = app.add_subcommand("cluster", "KMeans sweep with quality indices");
    auto* cmd_profile = app.add_subcommand("profile", "Per-cluster indicator summary");
    auto* cmd_run = app.add_subcommand("run", "Run every stage in order");

    auto* cmd_synth = app.add_subcommand("synth", "Generate a synthetic test corpus");
    std::size_t synth_dense = 20;
    std::size_t synth_sparse = 20;
    std::uint64_t synth_seed = 0;
    std::string synth_out = "synthetic_corpus";
    cmd_synth->add_option("--dense", synth_dense, "Number of small dense grid cities");
    cmd_synth->add_option("--sparse", synth_sparse, "Number of large sparse cities");
    cmd_synth->add_option("--seed", synth_seed, "Generator seed");
    cmd_synth->add_option("--out", synth_out, "Corpus directory to create");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (cmd_synth->parsed()) {
        try {
            const auto corpus =
                citynet::pipeline::plan_two_type_corpus(synth_dense, synth_sparse, synth_seed);
            citynet::pipeline::write_synthetic_corpus(corpus, synth_out, synth_seed);
            std::printf("wrote %zu cities under %s (manifest.ini, maps/, boundaries/)\n",
                        corpus.cities.size(), synth_out.c_str());
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 1;
        }
        return 0;
    }

    if (manifest_path.empty()) {
        std::fprintf(stderr, "error: --manifest is required\n");
        return 2;
    }

    CorpusManifest manifest;
    try {
        manifest = CorpusManifest::read_file(manifest_path);
    } catch (const citynet::pipeline::ManifestError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    if (!out_override.empty()) {
        manifest.output_dir = fs::absolute(out_override).lexically_normal().string();
    }
    if (seed_override) manifest.seed = *seed_override;
    if (!highway_override.empty()) {
        manifest.params.highway_filter = citynet::osm::parse_highway_filter(highway_override);
        if (manifest.params.highway_filter.empty()) {
            std::fprintf(stderr, "error: --highway-filter must not be empty\n");
            return 2;
        }
    }
    if (keep_geometry_nodes) manifest.params.keep_geometry_nodes = true;
    if (!indicator_column.empty()) manifest.params.indicator_column = indicator_column;

    if (cmd_run->parsed()) {
        const RunResult result = citynet::pipeline::run_pipeline(manifest, force);
        print_stages(result);
        return result.exit_code;
    }
    if (cmd_ingest->parsed()) return run_stage(manifest, citynet::pipeline::stage_ingest, force);
    if (cmd_features->parsed()) {
        return run_stage(manifest, citynet::pipeline::stage_features, force);
    }
    if (cmd_select->parsed()) return run_stage(manifest, citynet::pipeline::stage_select, force);
    if (cmd_project->parsed()) {
        return run_stage(manifest, citynet::pipeline::stage_project, force);
    }
    if (cmd_cluster->parsed()) {
        return run_stage(manifest, citynet::pipeline::stage_cluster, force);
    }
    if (cmd_profile->parsed()) return run_profile(manifest);

    std::fprintf(stderr, "error: no subcommand\n");
    return 2;
}
