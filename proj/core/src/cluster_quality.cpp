#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "citynet/clustering.hpp"

namespace citynet::cluster {

namespace {

double euclid(const select::FeatureMatrix& points, std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t c = 0; c < points.cols(); ++c) {
        const double d = points.at(a, c) - points.at(b, c);
        s += d * d;
    }
    return std::sqrt(s);
}

std::size_t cluster_count(const std::vector<std::size_t>& labels) {
    return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

std::vector<std::vector<std::size_t>> members_by_cluster(const std::vector<std::size_t>& labels,
                                                         std::size_t k) {
    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
    for (std::size_t c = 0; c < k; ++c) {
        if (members[c].empty()) {
            throw std::invalid_argument("cluster " + std::to_string(c) + " is empty");
        }
    }
    return members;
}

}  // namespace

SilhouetteResult silhouette(const select::FeatureMatrix& points,
                            const std::vector<std::size_t>& labels) {
    const std::size_t n = points.rows();
    if (labels.size() != n) throw std::invalid_argument("labels/points size mismatch");
    const std::size_t k = cluster_count(labels);
    if (k < 2) throw std::invalid_argument("silhouette needs >= 2 clusters");
    const auto members = members_by_cluster(labels, k);

    SilhouetteResult result;
    result.per_point.resize(n, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t own = labels[i];
        if (members[own].size() == 1) {
            result.per_point[i] = 0.0;  // singleton convention
            continue;
        }

        double a = 0.0;
        for (std::size_t j : members[own]) {
            if (j != i) a += euclid(points, i, j);
        }
        a /= static_cast<double>(members[own].size() - 1);

        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (c == own) continue;
            double mean = 0.0;
            for (std::size_t j : members[c]) mean += euclid(points, i, j);
            mean /= static_cast<double>(members[c].size());
            b = std::min(b, mean);
        }

        const double denom = std::max(a, b);
        result.per_point[i] = denom == 0.0 ? 0.0 : (b - a) / denom;
    }

    double sum = 0.0;
    for (double s : result.per_point) sum += s;
    result.average = sum / static_cast<double>(n);
    return result;
}

double dunn_index(const select::FeatureMatrix& points, const std::vector<std::size_t>& labels) {
    const std::size_t n = points.rows();
    if (labels.size() != n) throw std::invalid_argument("labels/points size mismatch");
    const std::size_t k = cluster_count(labels);
    if (k < 2) throw std::invalid_argument("dunn index needs >= 2 clusters");
    const auto members = members_by_cluster(labels, k);

    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            for (std::size_t i : members[a]) {
                for (std::size_t j : members[b]) {
                    min_gap = std::min(min_gap, euclid(points, i, j));
                }
            }
        }
    }

    double max_diameter = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t x = 0; x < members[c].size(); ++x) {
            for (std::size_t y = x + 1; y < members[c].size(); ++y) {
                max_diameter = std::max(max_diameter, euclid(points, members[c][x], members[c][y]));
            }
        }
    }

    if (max_diameter == 0.0) return std::numeric_limits<double>::infinity();
    return min_gap / max_diameter;
}

}  // namespace citynet::cluster
