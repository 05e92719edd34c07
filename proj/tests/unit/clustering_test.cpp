#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "citynet/clustering.hpp"
#include "oracles.hpp"

using namespace citynet;
using namespace citynet::cluster;
using citynet::select::FeatureMatrix;

namespace {

FeatureMatrix points_2d(const std::vector<std::array<double, 2>>& pts) {
    std::vector<std::string> ids;
    std::vector<double> values;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        ids.push_back("p" + std::to_string(i));
        values.push_back(pts[i][0]);
        values.push_back(pts[i][1]);
    }
    return FeatureMatrix(std::move(ids), {"x", "y"}, std::move(values));
}

FeatureMatrix points_1d(const std::vector<double>& xs) {
    std::vector<std::string> ids;
    std::vector<double> values;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        ids.push_back("p" + std::to_string(i));
        values.push_back(xs[i]);
    }
    return FeatureMatrix(std::move(ids), {"x"}, std::move(values));
}

}  // namespace

TEST_CASE("kmeans with k = 1 returns the column means") {
    const FeatureMatrix pts = points_2d({{0, 0}, {2, 0}, {0, 2}, {2, 2}});
    const ClusterAssignment a = kmeans(pts, 1, 7);
    REQUIRE(a.k == 1);
    CHECK(a.centroids[0] == 1.0);
    CHECK(a.centroids[1] == 1.0);
    // Inertia equals the total squared deviation around the mean.
    CHECK(a.inertia == doctest::Approx(8.0).epsilon(1e-12));
    for (std::size_t label : a.labels) CHECK(label == 0);
}

TEST_CASE("kmeans separates two obvious blocks") {
    const FeatureMatrix pts = points_2d({{0, 0}, {0, 1}, {10, 0}, {10, 1}});
    const ClusterAssignment a = kmeans(pts, 2, 3);
    REQUIRE(a.k == 2);
    CHECK(a.labels[0] == a.labels[1]);
    CHECK(a.labels[2] == a.labels[3]);
    CHECK(a.labels[0] != a.labels[2]);
    CHECK(a.inertia == doctest::Approx(1.0).epsilon(1e-12));
    // Centroids are {(0, 0.5), (10, 0.5)} in some order.
    const double cx0 = a.centroids[a.labels[0] * 2];
    const double cx2 = a.centroids[a.labels[2] * 2];
    CHECK(cx0 == doctest::Approx(0.0).scale(1.0));
    CHECK(cx2 == doctest::Approx(10.0));
    CHECK(a.centroids[a.labels[0] * 2 + 1] == doctest::Approx(0.5));
}

TEST_CASE("kmeans validates k") {
    const FeatureMatrix pts = points_2d({{0, 0}, {1, 1}});
    CHECK_THROWS_AS(kmeans(pts, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(kmeans(pts, 3, 1), std::invalid_argument);
}

TEST_CASE("kmeans best-of-seeds matches the exhaustive 2-partition optimum") {
    oracles::TestRng rng(103);
    int hits = 0;
    const int trials = 60;
    for (int trial = 0; trial < trials; ++trial) {
        std::vector<std::array<double, 2>> pts;
        for (int i = 0; i < 6; ++i) {
            pts.push_back({rng.unit() * 10.0, rng.unit() * 10.0});
        }
        const double optimum = oracles::best_two_partition_inertia(pts);

        double best = std::numeric_limits<double>::infinity();
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            best = std::min(best, kmeans(points_2d(pts), 2, seed).inertia);
        }
        CHECK(best >= optimum - 1e-9);        // can never beat the optimum
        CHECK(best <= optimum * 1.05 + 1e-9);  // and never far above it
        if (best <= optimum * (1.0 + 1e-9) + 1e-12) ++hits;
    }
    CHECK(hits >= trials * 95 / 100);
}

TEST_CASE("kmeans invariants: labels map to nearest centroid, inertia trace nonincreasing") {
    oracles::TestRng rng(107);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::array<double, 2>> pts;
        const std::size_t n = 8 + rng.index(12);
        for (std::size_t i = 0; i < n; ++i) {
            pts.push_back({rng.unit() * 6.0, rng.unit() * 6.0});
        }
        const std::size_t k = 2 + rng.index(3);
        const ClusterAssignment a = kmeans(points_2d(pts), k, trial);

        // Nonempty clusters.
        std::vector<std::size_t> counts(a.k, 0);
        for (std::size_t label : a.labels) ++counts[label];
        for (std::size_t c = 0; c < a.k; ++c) CHECK(counts[c] > 0);

        // Labels self-consistent: nearest centroid wins.
        for (std::size_t i = 0; i < n; ++i) {
            double own = 0.0;
            for (std::size_t c = 0; c < 2; ++c) {
                const double dx = pts[i][c] - a.centroids[a.labels[i] * 2 + c];
                own += dx * dx;
            }
            for (std::size_t other = 0; other < a.k; ++other) {
                double d = 0.0;
                for (std::size_t c = 0; c < 2; ++c) {
                    const double dx = pts[i][c] - a.centroids[other * 2 + c];
                    d += dx * dx;
                }
                CHECK(own <= d + 1e-12);
            }
        }

        // Lloyd inertia nonincreasing.
        for (std::size_t i = 1; i < a.inertia_trace.size(); ++i) {
            CHECK(a.inertia_trace[i] <= a.inertia_trace[i - 1] * (1.0 + 1e-9) + 1e-12);
        }
        CHECK(a.inertia >= 0.0);
    }
}

TEST_CASE("kmeans is deterministic for a fixed (data, k, seed)") {
    oracles::TestRng rng(109);
    std::vector<std::array<double, 2>> pts;
    for (int i = 0; i < 15; ++i) pts.push_back({rng.unit(), rng.unit()});
    const ClusterAssignment a = kmeans(points_2d(pts), 3, 42);
    const ClusterAssignment b = kmeans(points_2d(pts), 3, 42);
    CHECK(a.labels == b.labels);
    CHECK(a.centroids == b.centroids);
    CHECK(a.inertia == b.inertia);
}

TEST_CASE("silhouette fixtures") {
    SUBCASE("two tight far clusters score near 1") {
        const FeatureMatrix pts = points_1d({0, 1, 100, 101});
        const SilhouetteResult s = silhouette(pts, {0, 0, 1, 1});
        CHECK(s.average > 0.95);
        for (double v : s.per_point) {
            CHECK(v >= -1.0);
            CHECK(v <= 1.0);
        }
    }
    SUBCASE("singleton clusters score zero") {
        const FeatureMatrix pts = points_1d({0, 1});
        const SilhouetteResult s = silhouette(pts, {0, 1});
        CHECK(s.per_point[0] == 0.0);
        CHECK(s.per_point[1] == 0.0);
        CHECK(s.average == 0.0);
    }
    SUBCASE("five-point fixture matches the hand formula") {
        // Points 0, 1, 2 in cluster 0; 10, 11 in cluster 1.
        const FeatureMatrix pts = points_1d({0, 1, 2, 10, 11});
        const std::vector<std::size_t> labels{0, 0, 0, 1, 1};
        const SilhouetteResult s = silhouette(pts, labels);
        // Point 0: a = (1+2)/2 = 1.5, b = (10+11)/2 = 10.5, s = 9/10.5.
        CHECK(s.per_point[0] == doctest::Approx((10.5 - 1.5) / 10.5).epsilon(1e-12));
        // Point 1: a = (1+1)/2 = 1, b = (9+10)/2 = 9.5.
        CHECK(s.per_point[1] == doctest::Approx((9.5 - 1.0) / 9.5).epsilon(1e-12));
        // Point 2: a = (2+1)/2 = 1.5, b = (8+9)/2 = 8.5.
        CHECK(s.per_point[2] == doctest::Approx((8.5 - 1.5) / 8.5).epsilon(1e-12));
        // Point 3: a = 1, b = (10+9+8)/3 = 9.
        CHECK(s.per_point[3] == doctest::Approx((9.0 - 1.0) / 9.0).epsilon(1e-12));
        // Point 4: a = 1, b = (11+10+9)/3 = 10.
        CHECK(s.per_point[4] == doctest::Approx((10.0 - 1.0) / 10.0).epsilon(1e-12));
        double mean = 0.0;
        for (double v : s.per_point) mean += v;
        CHECK(s.average == doctest::Approx(mean / 5.0).epsilon(1e-12));
    }
    SUBCASE("k < 2 is an error") {
        const FeatureMatrix pts = points_1d({0, 1});
        CHECK_THROWS_AS(silhouette(pts, {0, 0}), std::invalid_argument);
    }
}

TEST_CASE("silhouette under duplication of a far-copy clustering") {
    // Two disjoint translated copies, labels respected: the duplicate's
    // average must be at least the original's.
    oracles::TestRng rng(113);
    std::vector<double> xs;
    std::vector<std::size_t> labels;
    for (int i = 0; i < 6; ++i) {
        xs.push_back(rng.unit());
        labels.push_back(0);
        xs.push_back(5.0 + rng.unit());
        labels.push_back(1);
    }
    const double base = silhouette(points_1d(xs), labels).average;

    std::vector<double> doubled = xs;
    std::vector<std::size_t> doubled_labels = labels;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        doubled.push_back(xs[i] + 1e6);
        doubled_labels.push_back(labels[i] + 2);
    }
    const double dup = silhouette(points_1d(doubled), doubled_labels).average;
    CHECK(dup >= base - 1e-9);
}

TEST_CASE("dunn_index fixtures") {
    CHECK(dunn_index(points_1d({0, 1, 10, 11}), {0, 0, 1, 1}) == 9.0);
    CHECK(dunn_index(points_1d({0, 1, 2, 3}), {0, 1, 0, 1}) == 0.5);
    CHECK_THROWS_AS(dunn_index(points_1d({0, 1}), {0, 0}), std::invalid_argument);
    // All singletons: zero diameter everywhere, +infinity sentinel.
    CHECK(std::isinf(dunn_index(points_1d({0, 5, 9}), {0, 1, 2})));
}

TEST_CASE("dunn_index equals a brute-force evaluation on random labelings") {
    oracles::TestRng rng(127);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::array<double, 2>> pts;
        std::vector<std::size_t> labels;
        const std::size_t k = 2 + rng.index(2);
        for (int i = 0; i < 8; ++i) {
            pts.push_back({rng.unit() * 8.0, rng.unit() * 8.0});
            labels.push_back(rng.index(k));
        }
        // Ensure every cluster nonempty.
        for (std::size_t c = 0; c < k; ++c) labels[c] = c;

        auto dist = [&](std::size_t a, std::size_t b) {
            return std::hypot(pts[a][0] - pts[b][0], pts[a][1] - pts[b][1]);
        };
        double min_gap = std::numeric_limits<double>::infinity();
        double max_diam = 0.0;
        for (std::size_t a = 0; a < pts.size(); ++a) {
            for (std::size_t b = 0; b < pts.size(); ++b) {
                if (a == b) continue;
                if (labels[a] == labels[b]) {
                    max_diam = std::max(max_diam, dist(a, b));
                } else {
                    min_gap = std::min(min_gap, dist(a, b));
                }
            }
        }
        const double expected = max_diam == 0.0
                                    ? std::numeric_limits<double>::infinity()
                                    : min_gap / max_diam;
        // hypot in the oracle vs sqrt in the implementation: last-ulp slack.
        if (std::isinf(expected)) {
            CHECK(std::isinf(dunn_index(points_2d(pts), labels)));
        } else {
            CHECK(dunn_index(points_2d(pts), labels) ==
                  doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("dunn above one means the gap beats every diameter") {
    const FeatureMatrix pts = points_1d({0, 1, 10, 11});
    const std::vector<std::size_t> labels{0, 0, 1, 1};
    const double dnn = dunn_index(pts, labels);
    REQUIRE(dnn > 1.0);
    // Direct comparison underlying the index.
    const double gap = 9.0;
    const double diameter = 1.0;
    CHECK(gap > diameter);
}

TEST_CASE("sweep_k selects the planted blob count") {
    // Three tight blobs of three points each, far apart.
    std::vector<std::array<double, 2>> pts;
    for (const auto& center : std::vector<std::array<double, 2>>{{0, 0}, {50, 0}, {0, 50}}) {
        pts.push_back({center[0], center[1]});
        pts.push_back({center[0] + 1.0, center[1]});
        pts.push_back({center[0], center[1] + 1.0});
    }
    SweepOptions options;
    options.k_max = 8;
    options.base_seed = 5;
    const QualityReport report = sweep_k(points_2d(pts), options);
    REQUIRE(report.selected_k.has_value());
    CHECK(*report.selected_k == 3);

    double best_avg = -2.0;
    std::size_t best_k = 0;
    for (const KRecord& r : report.per_k) {
        if (!r.skipped && r.avg_silhouette > best_avg) {
            best_avg = r.avg_silhouette;
            best_k = r.k;
        }
        if (r.k == 3) CHECK(r.dunn > 1.0);
    }
    CHECK(best_k == 3);

    const ClusterAssignment a = assignment_for(points_2d(pts), report);
    CHECK(a.k == 3);
    CHECK(a.labels[0] == a.labels[1]);
    CHECK(a.labels[3] == a.labels[4]);
    CHECK(a.labels[0] != a.labels[3]);
}

TEST_CASE("sweep_k selects two blobs when two are planted") {
    std::vector<std::array<double, 2>> pts;
    oracles::TestRng rng(131);
    for (int i = 0; i < 6; ++i) pts.push_back({rng.unit(), rng.unit()});
    for (int i = 0; i < 6; ++i) pts.push_back({40.0 + rng.unit(), rng.unit()});
    SweepOptions options;
    options.k_max = 6;
    const QualityReport report = sweep_k(points_2d(pts), options);
    REQUIRE(report.selected_k.has_value());
    CHECK(*report.selected_k == 2);
}

TEST_CASE("sweep_k falls back when no k reaches Dunn above one") {
    // One diffuse blob: any split has overlapping clusters.
    oracles::TestRng rng(137);
    std::vector<std::array<double, 2>> pts;
    for (int i = 0; i < 12; ++i) pts.push_back({rng.unit(), rng.unit()});
    SweepOptions options;
    options.k_max = 4;
    const QualityReport report = sweep_k(points_2d(pts), options);
    REQUIRE(report.selected_k.has_value());
    CHECK(report.selection_reason.find("fallback") != std::string::npos);
    for (const KRecord& r : report.per_k) {
        if (!r.skipped) CHECK(r.dunn <= 1.0);
    }
}

TEST_CASE("sweep_k is deterministic and validates its bounds") {
    oracles::TestRng rng(139);
    std::vector<std::array<double, 2>> pts;
    for (int i = 0; i < 10; ++i) pts.push_back({rng.unit() * 9.0, rng.unit() * 9.0});
    SweepOptions options;
    options.k_max = 5;
    options.base_seed = 77;
    const QualityReport a = sweep_k(points_2d(pts), options);
    const QualityReport b = sweep_k(points_2d(pts), options);
    REQUIRE(a.per_k.size() == b.per_k.size());
    for (std::size_t i = 0; i < a.per_k.size(); ++i) {
        CHECK(a.per_k[i].avg_silhouette == b.per_k[i].avg_silhouette);
        CHECK(a.per_k[i].dunn == b.per_k[i].dunn);
        CHECK(a.per_k[i].inertia == b.per_k[i].inertia);
        CHECK(a.per_k[i].seed == b.per_k[i].seed);
    }
    CHECK(a.selected_k == b.selected_k);

    SweepOptions bad;
    bad.k_min = 1;
    CHECK_THROWS_AS(sweep_k(points_2d(pts), bad), std::invalid_argument);
}

TEST_CASE("quality report and assignment artifacts") {
    const std::string dir = "clustering_test_tmp";
    std::filesystem::create_directories(dir);

    const FeatureMatrix pts = points_1d({0, 1, 50, 51});
    SweepOptions options;
    options.k_max = 3;
    const QualityReport report = sweep_k(pts, options);
    write_quality_json(report, dir + "/quality.json");
    {
        std::ifstream in(dir + "/quality.json");
        std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        CHECK(all.find("\"per_k\"") != std::string::npos);
        CHECK(all.find("\"selected_k\": 2") != std::string::npos);
        CHECK(all.find("\"avg_silhouette\"") != std::string::npos);
    }

    const ClusterAssignment a = assignment_for(pts, report);
    write_assignment_csv(a, dir + "/assignments.csv");
    const ClusterAssignment back = read_assignment_csv(dir + "/assignments.csv");
    CHECK(back.city_ids == a.city_ids);
    CHECK(back.labels == a.labels);
    CHECK(back.k == a.k);
    std::filesystem::remove_all(dir);
}

TEST_CASE("dunn infinity serializes as a string sentinel") {
    const std::string dir = "clustering_inf_tmp";
    std::filesystem::create_directories(dir);
    QualityReport report;
    KRecord r;
    r.k = 2;
    r.avg_silhouette = 0.0;
    r.dunn = std::numeric_limits<double>::infinity();
    report.per_k.push_back(r);
    report.selected_k = 2;
    write_quality_json(report, dir + "/q.json");
    std::ifstream in(dir + "/q.json");
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(all.find("\"dunn\": \"inf\"") != std::string::npos);
    std::filesystem::remove_all(dir);
}
