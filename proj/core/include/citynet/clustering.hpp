#ifndef CITYNET_CLUSTERING_HPP
#define CITYNET_CLUSTERING_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "citynet/feature_select.hpp"

namespace citynet::cluster {

/// KMeans result. Every cluster is nonempty and every point is labeled
/// with its nearest centroid.
struct ClusterAssignment {
    std::vector<std::string> city_ids;
    std::vector<std::size_t> labels;
    std::size_t k = 0;
    std::size_t dims = 0;
    std::vector<double> centroids;      // row-major k x dims
    double inertia = 0.0;               // total within-cluster squared distance
    std::vector<double> inertia_trace;  // value after each Lloyd update
};

/// Lloyd iterations from a greedy k-means++ start, followed by
/// single-point refinement passes that accept any move lowering the total
/// squared distance. Deterministic for a fixed (data, k, seed); empty
/// clusters are repaired by reseeding to the point farthest from its
/// current centroid. Throws when k is 0 or exceeds the number of points.
ClusterAssignment kmeans(const select::FeatureMatrix& points, std::size_t k, std::uint64_t seed,
                         std::size_t max_iter = 300, double tol = 1e-6);

struct SilhouetteResult {
    std::vector<double> per_point;  // each in [-1, 1]; singleton clusters score 0
    double average = 0.0;
};

/// Rousseeuw silhouette over Euclidean distances. Throws when fewer than
/// two clusters are present.
SilhouetteResult silhouette(const select::FeatureMatrix& points,
                            const std::vector<std::size_t>& labels);

/// Minimum single-linkage inter-cluster distance over maximum cluster
/// diameter. All-singleton clusterings yield +infinity. Throws when fewer
/// than two clusters are present.
double dunn_index(const select::FeatureMatrix& points, const std::vector<std::size_t>& labels);

struct KRecord {
    std::size_t k = 0;
    std::optional<std::string> skipped;  // reason, when the k could not be evaluated
    double avg_silhouette = 0.0;
    double dunn = 0.0;
    double inertia = 0.0;
    std::uint64_t seed = 0;  // seed of the best-of-restarts run
};

struct QualityReport {
    std::vector<KRecord> per_k;
    std::optional<std::size_t> selected_k;
    std::string selection_reason;
    std::uint64_t base_seed = 0;
    std::size_t seeds_per_k = 0;
    std::size_t max_iter = 300;  // echoed so the winning run can be replayed
    double tol = 1e-6;
};

struct SweepOptions {
    std::size_t k_min = 2;
    std::size_t k_max = 0;  // 0: rows - 1
    std::size_t seeds_per_k = 10;
    std::uint64_t base_seed = 0;
    std::size_t max_iter = 300;
    double tol = 1e-6;
};

/// Evaluates every k in [k_min, k_max], keeping the best-of-seeds run by
/// inertia, and selects the k with the greatest average silhouette among
/// those whose Dunn index exceeds one. When no k qualifies, falls back to
/// the greatest silhouette overall and records the fallback.
QualityReport sweep_k(const select::FeatureMatrix& points, const SweepOptions& options = {});

/// Returns the assignment the sweep selected (re-run deterministically).
ClusterAssignment assignment_for(const select::FeatureMatrix& points, const QualityReport& report);

void write_assignment_csv(const ClusterAssignment& a, const std::string& path);
ClusterAssignment read_assignment_csv(const std::string& path);
void write_quality_json(const QualityReport& report, const std::string& path);

}  // namespace citynet::cluster

#endif
