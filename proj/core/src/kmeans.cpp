#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <stdexcept>

#include "citynet/clustering.hpp"

namespace citynet::cluster {

namespace {

// mt19937_64 bits folded to [0, 1); avoids std::uniform_real_distribution,
// whose output is implementation-defined.
class UnitRng {
public:
    explicit UnitRng(std::uint64_t seed) : engine_(seed) {}
    double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    std::size_t next_index(std::size_t n) {
        return std::min(n - 1, static_cast<std::size_t>(next() * static_cast<double>(n)));
    }

private:
    std::mt19937_64 engine_;
};

double sq_dist(const double* a, const double* b, std::size_t dims) {
    double s = 0.0;
    for (std::size_t c = 0; c < dims; ++c) {
        const double d = a[c] - b[c];
        s += d * d;
    }
    return s;
}

}  // namespace

ClusterAssignment kmeans(const select::FeatureMatrix& points, std::size_t k, std::uint64_t seed,
                         std::size_t max_iter, double tol) {
    const std::size_t n = points.rows();
    const std::size_t dims = points.cols();
    if (k == 0) throw std::invalid_argument("kmeans needs k >= 1");
    if (k > n) {
        throw std::invalid_argument("kmeans k = " + std::to_string(k) + " exceeds " +
                                    std::to_string(n) + " points");
    }
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < dims; ++c) {
            if (!points.is_defined(r, c)) throw std::invalid_argument("kmeans needs finite data");
        }
    }

    std::vector<double> data(n * dims);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < dims; ++c) data[r * dims + c] = points.at(r, c);
    }
    auto point = [&](std::size_t r) { return data.data() + r * dims; };

    // Greedy k-means++ seeding: each new centroid is sampled proportional
    // to the squared distance to the nearest chosen one, over a few
    // candidates, keeping the candidate that minimizes the potential.
    UnitRng rng(seed);
    std::vector<double> centroids(k * dims);
    {
        const std::size_t local_trials =
            2 + static_cast<std::size_t>(std::log2(static_cast<double>(k)));
        std::vector<double> min_sq(n, std::numeric_limits<double>::infinity());

        const std::size_t first = rng.next_index(n);
        std::memcpy(centroids.data(), point(first), dims * sizeof(double));
        double potential = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            min_sq[r] = sq_dist(point(r), centroids.data(), dims);
            potential += min_sq[r];
        }

        for (std::size_t c = 1; c < k; ++c) {
            std::size_t best_candidate = n;
            double best_potential = std::numeric_limits<double>::infinity();
            for (std::size_t t = 0; t < local_trials; ++t) {
                std::size_t chosen;
                if (potential > 0.0) {
                    const double target = rng.next() * potential;
                    double cum = 0.0;
                    chosen = n - 1;
                    for (std::size_t r = 0; r < n; ++r) {
                        cum += min_sq[r];
                        if (cum > target) {
                            chosen = r;
                            break;
                        }
                    }
                } else {
                    chosen = rng.next_index(n);  // all points coincide with a centroid
                }
                double new_potential = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    new_potential += std::min(min_sq[r], sq_dist(point(r), point(chosen), dims));
                }
                if (new_potential < best_potential) {
                    best_potential = new_potential;
                    best_candidate = chosen;
                }
            }
            std::memcpy(&centroids[c * dims], point(best_candidate), dims * sizeof(double));
            potential = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                min_sq[r] = std::min(min_sq[r], sq_dist(point(r), point(best_candidate), dims));
                potential += min_sq[r];
            }
        }
    }

    std::vector<std::size_t> labels(n, 0);
    std::vector<std::size_t> counts(k, 0);
    std::vector<double> sums(k * dims, 0.0);

    auto assign = [&] {
        for (std::size_t r = 0; r < n; ++r) {
            std::size_t best = 0;
            double best_d = sq_dist(point(r), &centroids[0], dims);
            for (std::size_t c = 1; c < k; ++c) {
                const double d = sq_dist(point(r), &centroids[c * dims], dims);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            labels[r] = best;
        }
    };

    auto repair_empty = [&] {
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t r = 0; r < n; ++r) ++counts[labels[r]];
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] > 0) continue;
            // Reseed on the point farthest from its current centroid, but
            // never steal the last member of another cluster.
            std::size_t worst = n;
            double worst_d = -1.0;
            for (std::size_t r = 0; r < n; ++r) {
                if (counts[labels[r]] <= 1) continue;
                const double d = sq_dist(point(r), &centroids[labels[r] * dims], dims);
                if (d > worst_d) {
                    worst_d = d;
                    worst = r;
                }
            }
            if (worst == n) throw std::runtime_error("kmeans could not repair an empty cluster");
            --counts[labels[worst]];
            labels[worst] = c;
            counts[c] = 1;
            std::memcpy(&centroids[c * dims], point(worst), dims * sizeof(double));
        }
    };

    auto current_inertia = [&] {
        double total = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            total += sq_dist(point(r), &centroids[labels[r] * dims], dims);
        }
        return total;
    };

    ClusterAssignment out;
    double prev_inertia = std::numeric_limits<double>::infinity();
    auto run_lloyd = [&] {
        for (std::size_t iter = 0; iter < max_iter; ++iter) {
            assign();
            repair_empty();

            std::fill(sums.begin(), sums.end(), 0.0);
            std::fill(counts.begin(), counts.end(), 0);
            for (std::size_t r = 0; r < n; ++r) {
                ++counts[labels[r]];
                const double* p = point(r);
                double* s = &sums[labels[r] * dims];
                for (std::size_t c = 0; c < dims; ++c) s[c] += p[c];
            }
            double shift_sq = 0.0;
            for (std::size_t c = 0; c < k; ++c) {
                double cs = 0.0;
                for (std::size_t j = 0; j < dims; ++j) {
                    const double updated = sums[c * dims + j] / static_cast<double>(counts[c]);
                    const double delta = updated - centroids[c * dims + j];
                    cs += delta * delta;
                    centroids[c * dims + j] = updated;
                }
                shift_sq = std::max(shift_sq, cs);
            }

            const double inertia = current_inertia();
            if (inertia > prev_inertia * (1.0 + 1e-9) + 1e-12) {
                throw std::logic_error("kmeans inertia increased across a Lloyd iteration");
            }
            prev_inertia = inertia;
            out.inertia_trace.push_back(inertia);

            if (std::sqrt(shift_sq) < tol) break;
        }
    };

    // Single-point first-variation pass: move a point to another cluster
    // when the exact change in total squared distance is negative. Returns
    // whether anything moved. Escapes Lloyd fixed points that a plain
    // restart rarely leaves on small inputs.
    auto refine_once = [&] {
        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t r = 0; r < n; ++r) {
            ++counts[labels[r]];
            for (std::size_t c = 0; c < dims; ++c) sums[labels[r] * dims + c] += point(r)[c];
        }
        std::vector<double> means(k * dims);
        auto refresh_means = [&] {
            for (std::size_t c = 0; c < k; ++c) {
                for (std::size_t j = 0; j < dims; ++j) {
                    means[c * dims + j] = sums[c * dims + j] / static_cast<double>(counts[c]);
                }
            }
        };
        refresh_means();

        bool moved = false;
        for (std::size_t r = 0; r < n; ++r) {
            const std::size_t from = labels[r];
            if (counts[from] <= 1) continue;
            const double m = static_cast<double>(counts[from]);
            const double removal = m / (m - 1.0) * sq_dist(point(r), &means[from * dims], dims);

            std::size_t best_to = k;
            double best_gain = 0.0;
            for (std::size_t to = 0; to < k; ++to) {
                if (to == from) continue;
                const double p = static_cast<double>(counts[to]);
                const double insertion =
                    p / (p + 1.0) * sq_dist(point(r), &means[to * dims], dims);
                const double gain = removal - insertion;
                if (gain > best_gain + 1e-12 * (removal + insertion + 1.0)) {
                    best_gain = gain;
                    best_to = to;
                }
            }
            if (best_to == k) continue;

            for (std::size_t j = 0; j < dims; ++j) {
                sums[from * dims + j] -= point(r)[j];
                sums[best_to * dims + j] += point(r)[j];
            }
            --counts[from];
            ++counts[best_to];
            labels[r] = best_to;
            refresh_means();
            moved = true;
        }
        if (moved) {
            std::copy(means.begin(), means.end(), centroids.begin());
            prev_inertia = current_inertia();
        }
        return moved;
    };

    run_lloyd();
    for (std::size_t round = 0; round < 64; ++round) {
        if (!refine_once()) break;
        run_lloyd();
    }

    // Final authoritative assignment: labels must map to the nearest
    // centroid with no cluster left empty. A repair changes centroids, so
    // re-assign until the state is consistent.
    for (std::size_t round = 0;; ++round) {
        assign();
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t r = 0; r < n; ++r) ++counts[labels[r]];
        if (std::find(counts.begin(), counts.end(), std::size_t{0}) == counts.end()) break;
        if (round >= 32) throw std::runtime_error("kmeans failed to stabilize nonempty clusters");
        repair_empty();
    }

    out.city_ids = points.city_ids();
    out.labels = labels;
    out.k = k;
    out.dims = dims;
    out.centroids = centroids;
    out.inertia = current_inertia();
    return out;
}

}  // namespace citynet::cluster
