#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "citynet/clustering.hpp"
#include "citynet/csv.hpp"
#include "citynet/detail/parallel.hpp"

namespace citynet::cluster {

namespace {

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t k, std::uint64_t restart) {
    std::uint64_t z = base ^ (k * 0x9E3779B97F4A7C15ULL) ^ (restart * 0xBF58476D1CE4E5B9ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct BestRun {
    ClusterAssignment assignment;
    std::uint64_t seed = 0;
};

BestRun best_of_seeds(const select::FeatureMatrix& points, std::size_t k,
                      const SweepOptions& options) {
    BestRun best;
    bool have = false;
    for (std::size_t s = 0; s < options.seeds_per_k; ++s) {
        const std::uint64_t seed = mix_seed(options.base_seed, k, s);
        ClusterAssignment run = kmeans(points, k, seed, options.max_iter, options.tol);
        if (!have || run.inertia < best.assignment.inertia) {
            best.assignment = std::move(run);
            best.seed = seed;
            have = true;
        }
    }
    return best;
}

}  // namespace

QualityReport sweep_k(const select::FeatureMatrix& points, const SweepOptions& options) {
    const std::size_t n = points.rows();
    if (options.k_min < 2) throw std::invalid_argument("sweep needs k_min >= 2");
    const std::size_t k_max = options.k_max == 0 ? (n == 0 ? 0 : n - 1) : options.k_max;
    if (k_max < options.k_min) throw std::invalid_argument("sweep needs k_max >= k_min");
    if (options.seeds_per_k == 0) throw std::invalid_argument("sweep needs >= 1 seed per k");

    QualityReport report;
    report.base_seed = options.base_seed;
    report.seeds_per_k = options.seeds_per_k;
    report.max_iter = options.max_iter;
    report.tol = options.tol;

    // Independent (k, seed) runs fan out across threads; the report is
    // assembled in ascending-k order, so the output is order-independent.
    report.per_k.resize(k_max - options.k_min + 1);
    detail::parallel_for(report.per_k.size(), [&](std::size_t i) {
        const std::size_t k = options.k_min + i;
        KRecord& record = report.per_k[i];
        record.k = k;
        try {
            const BestRun best = best_of_seeds(points, k, options);
            const SilhouetteResult sil = silhouette(points, best.assignment.labels);
            record.avg_silhouette = sil.average;
            record.dunn = dunn_index(points, best.assignment.labels);
            record.inertia = best.assignment.inertia;
            record.seed = best.seed;
        } catch (const std::exception& e) {
            record.skipped = e.what();
        }
    });

    // Greatest silhouette among k whose Dunn index exceeds one; ties take
    // the smaller k. Fall back to the greatest silhouette overall.
    const KRecord* admissible = nullptr;
    const KRecord* overall = nullptr;
    for (const KRecord& r : report.per_k) {
        if (r.skipped) continue;
        if (!overall || r.avg_silhouette > overall->avg_silhouette) overall = &r;
        if (r.dunn > 1.0 && (!admissible || r.avg_silhouette > admissible->avg_silhouette)) {
            admissible = &r;
        }
    }
    if (admissible) {
        report.selected_k = admissible->k;
        report.selection_reason = "greatest average silhouette among k with Dunn index > 1";
    } else if (overall) {
        report.selected_k = overall->k;
        report.selection_reason = "fallback: no k reached Dunn index > 1, greatest silhouette overall";
    } else {
        report.selection_reason = "no k could be evaluated";
    }
    return report;
}

ClusterAssignment assignment_for(const select::FeatureMatrix& points,
                                 const QualityReport& report) {
    if (!report.selected_k) throw std::invalid_argument("sweep selected no k");
    for (const KRecord& r : report.per_k) {
        if (r.k == *report.selected_k && !r.skipped) {
            return kmeans(points, r.k, r.seed, report.max_iter, report.tol);
        }
    }
    throw std::logic_error("selected k missing from the report");
}

void write_assignment_csv(const ClusterAssignment& a, const std::string& path) {
    csv::Table table;
    table.header = {"city_id", "cluster"};
    for (std::size_t i = 0; i < a.city_ids.size(); ++i) {
        table.rows.push_back({a.city_ids[i], std::to_string(a.labels[i])});
    }
    csv::write_file(path, table);
}

ClusterAssignment read_assignment_csv(const std::string& path) {
    const csv::Table table = csv::read_file(path);
    const std::size_t id_col = table.column("city_id");
    const std::size_t cluster_col = table.column("cluster");

    ClusterAssignment a;
    for (const auto& row : table.rows) {
        a.city_ids.push_back(row[id_col]);
        a.labels.push_back(csv::parse_u64(row[cluster_col], path));
    }
    a.k = a.labels.empty() ? 0 : *std::max_element(a.labels.begin(), a.labels.end()) + 1;
    return a;
}

void write_quality_json(const QualityReport& report, const std::string& path) {
    nlohmann::json per_k = nlohmann::json::array();
    for (const KRecord& r : report.per_k) {
        nlohmann::json rec{{"k", r.k}};
        if (r.skipped) {
            rec["skipped"] = *r.skipped;
        } else {
            rec["avg_silhouette"] = r.avg_silhouette;
            rec["dunn"] = std::isinf(r.dunn) ? nlohmann::json("inf") : nlohmann::json(r.dunn);
            rec["inertia"] = r.inertia;
            rec["seed"] = r.seed;
        }
        per_k.push_back(std::move(rec));
    }
    nlohmann::json root{
        {"per_k", std::move(per_k)},
        {"selection_reason", report.selection_reason},
        {"base_seed", report.base_seed},
        {"seeds_per_k", report.seeds_per_k},
    };
    if (report.selected_k) {
        root["selected_k"] = *report.selected_k;
    } else {
        root["selected_k"] = nullptr;
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << root.dump(2) << '\n';
}

}  // namespace citynet::cluster
