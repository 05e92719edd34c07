#include "citynet/projection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "citynet/csv.hpp"
#include "citynet/eigen.hpp"

namespace citynet::proj {

std::vector<double> Embedding::dimension(std::size_t col) const {
    std::vector<double> out(city_ids.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = coord(i, col);
    return out;
}

select::FeatureMatrix standardize(const select::FeatureMatrix& m) {
    const std::size_t n = m.rows();
    const std::size_t d = m.cols();
    if (n < 2) throw std::invalid_argument("standardize needs >= 2 rows");

    std::vector<double> values(n * d);
    for (std::size_t c = 0; c < d; ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            if (!m.is_defined(r, c)) {
                throw std::invalid_argument("undefined cell in column " + m.feature_names()[c]);
            }
            mean += m.at(r, c);
        }
        mean /= static_cast<double>(n);

        double ss = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double dx = m.at(r, c) - mean;
            ss += dx * dx;
        }
        const double variance = ss / static_cast<double>(n - 1);
        if (variance == 0.0) {
            throw std::invalid_argument("constant column " + m.feature_names()[c] +
                                        " (should have been dropped upstream)");
        }
        const double scale = 1.0 / std::sqrt(variance);
        for (std::size_t r = 0; r < n; ++r) {
            values[r * d + c] = (m.at(r, c) - mean) * scale;
        }
    }
    return select::FeatureMatrix(m.city_ids(), m.feature_names(), std::move(values));
}

namespace {

// Fixes each eigenvector's sign so its largest-magnitude entry is positive.
void apply_sign_convention(std::vector<EigenPair>& pairs) {
    for (EigenPair& p : pairs) {
        std::size_t arg = 0;
        for (std::size_t i = 1; i < p.vector.size(); ++i) {
            if (std::fabs(p.vector[i]) > std::fabs(p.vector[arg])) arg = i;
        }
        if (p.vector[arg] < 0.0) {
            for (double& x : p.vector) x = -x;
        }
    }
}

std::vector<double> centered(const select::FeatureMatrix& m) {
    const std::size_t n = m.rows();
    const std::size_t d = m.cols();
    std::vector<double> x(n * d);
    for (std::size_t c = 0; c < d; ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < n; ++r) mean += m.at(r, c);
        mean /= static_cast<double>(n);
        for (std::size_t r = 0; r < n; ++r) x[r * d + c] = m.at(r, c) - mean;
    }
    return x;
}

}  // namespace

Embedding pca(const select::FeatureMatrix& m, std::size_t dims) {
    const std::size_t n = m.rows();
    const std::size_t d = m.cols();
    if (n < 2) throw std::invalid_argument("pca needs >= 2 rows");
    if (dims < 1 || dims > std::min(n - 1, d)) {
        throw std::invalid_argument("pca dims must lie in [1, min(rows-1, cols)]");
    }

    const std::vector<double> x = centered(m);

    std::vector<double> cov(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < n; ++r) s += x[r * d + i] * x[r * d + j];
            s /= static_cast<double>(n - 1);
            cov[i * d + j] = s;
            cov[j * d + i] = s;
        }
    }
    double trace = 0.0;
    for (std::size_t i = 0; i < d; ++i) trace += cov[i * d + i];

    std::vector<EigenPair> pairs = symmetric_top_eigen(cov, d, dims);
    apply_sign_convention(pairs);

    Embedding e;
    e.city_ids = m.city_ids();
    e.dims = dims;
    e.method = "pca";
    e.coordinates.assign(n * dims, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < dims; ++c) {
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j) s += x[r * d + j] * pairs[c].vector[j];
            e.coordinates[r * dims + c] = s;
        }
    }
    for (const EigenPair& p : pairs) {
        e.explained_variance.push_back(trace > 0.0 ? std::max(0.0, p.value) / trace : 0.0);
        e.components.insert(e.components.end(), p.vector.begin(), p.vector.end());
    }
    return e;
}

Embedding isomap(const select::FeatureMatrix& m, std::size_t dims, std::size_t k_neighbors) {
    const std::size_t n = m.rows();
    if (n < 2) throw std::invalid_argument("isomap needs >= 2 rows");
    if (k_neighbors < 1) throw std::invalid_argument("isomap needs k >= 1");
    if (dims < 1 || dims >= n) throw std::invalid_argument("isomap dims must lie in [1, rows)");
    const std::size_t k = std::min(k_neighbors, n - 1);

    const std::size_t d = m.cols();
    auto euclid = [&](std::size_t a, std::size_t b) {
        double s = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
            const double dx = m.at(a, c) - m.at(b, c);
            s += dx * dx;
        }
        return std::sqrt(s);
    };

    // Symmetrized k-NN graph: an edge exists when either endpoint ranks the
    // other among its k nearest (ties by index).
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
    {
        std::vector<std::pair<double, std::size_t>> order(n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t pos = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) order[pos++] = {euclid(i, j), j};
            }
            std::sort(order.begin(), order.end());
            for (std::size_t t = 0; t < k; ++t) {
                const auto [dist, j] = order[t];
                adj[i].push_back({j, dist});
                adj[j].push_back({i, dist});
            }
        }
        for (auto& list : adj) {
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
        }
    }

    // Connectivity check with component sizes in the error message.
    {
        std::vector<int> comp(n, -1);
        int comp_count = 0;
        std::vector<std::size_t> sizes;
        for (std::size_t s = 0; s < n; ++s) {
            if (comp[s] >= 0) continue;
            std::size_t size = 0;
            std::vector<std::size_t> stack{s};
            comp[s] = comp_count;
            while (!stack.empty()) {
                const std::size_t u = stack.back();
                stack.pop_back();
                ++size;
                for (const auto& [v, _] : adj[u]) {
                    if (comp[v] < 0) {
                        comp[v] = comp_count;
                        stack.push_back(v);
                    }
                }
            }
            sizes.push_back(size);
            ++comp_count;
        }
        if (comp_count > 1) {
            std::ostringstream msg;
            msg << "isomap neighborhood graph is disconnected (component sizes:";
            for (std::size_t s : sizes) msg << ' ' << s;
            msg << "); try a larger k than " << k;
            throw std::runtime_error(msg.str());
        }
    }

    // All-pairs geodesics on the k-NN graph.
    std::vector<double> geo(n * n, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, std::size_t>;
    for (std::size_t s = 0; s < n; ++s) {
        double* dist = geo.data() + s * n;
        dist[s] = 0.0;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        heap.push({0.0, s});
        while (!heap.empty()) {
            const auto [du, u] = heap.top();
            heap.pop();
            if (du > dist[u]) continue;
            for (const auto& [v, w] : adj[u]) {
                const double nd = du + w;
                if (nd < dist[v]) {
                    dist[v] = nd;
                    heap.push({nd, v});
                }
            }
        }
    }

    // Classical MDS: double-center the squared geodesic matrix.
    std::vector<double> sq(n * n);
    for (std::size_t i = 0; i < n * n; ++i) sq[i] = geo[i] * geo[i];
    std::vector<double> row_mean(n, 0.0);
    double all_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) row_mean[i] += sq[i * n + j];
        row_mean[i] /= static_cast<double>(n);
        all_mean += row_mean[i];
    }
    all_mean /= static_cast<double>(n);

    std::vector<double> b(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            b[i * n + j] = -0.5 * (sq[i * n + j] - row_mean[i] - row_mean[j] + all_mean);
        }
    }

    std::vector<EigenPair> pairs = symmetric_top_eigen(b, n, dims);
    apply_sign_convention(pairs);

    Embedding e;
    e.city_ids = m.city_ids();
    e.dims = dims;
    e.method = "isomap";
    e.knn = k;
    e.coordinates.assign(n * dims, 0.0);
    for (std::size_t c = 0; c < dims; ++c) {
        double lambda = pairs[c].value;
        if (lambda < 0.0) {
            e.clamped_mass += -lambda;
            lambda = 0.0;
        }
        const double scale = std::sqrt(lambda);
        for (std::size_t r = 0; r < n; ++r) {
            e.coordinates[r * dims + c] = scale * pairs[c].vector[r];
        }
    }

    // Normalized residual stress of the embedding against the geodesics.
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double emb = 0.0;
            for (std::size_t c = 0; c < dims; ++c) {
                const double dx = e.coord(i, c) - e.coord(j, c);
                emb += dx * dx;
            }
            emb = std::sqrt(emb);
            const double g = geo[i * n + j];
            num += (emb - g) * (emb - g);
            den += g * g;
        }
    }
    e.geodesic_stress = den > 0.0 ? std::sqrt(num / den) : 0.0;
    return e;
}

void write_embedding_csv(const Embedding& e, const std::string& csv_path,
                         const std::string& sidecar_path) {
    csv::Table table;
    table.header.push_back("city_id");
    for (std::size_t c = 0; c < e.dims; ++c) table.header.push_back("c" + std::to_string(c + 1));
    for (std::size_t r = 0; r < e.city_ids.size(); ++r) {
        std::vector<std::string> row{e.city_ids[r]};
        for (std::size_t c = 0; c < e.dims; ++c) row.push_back(csv::format_double(e.coord(r, c)));
        table.rows.push_back(std::move(row));
    }
    csv::write_file(csv_path, table);

    nlohmann::json sidecar{{"method", e.method}, {"dims", e.dims}};
    if (e.method == "pca") {
        sidecar["explained_variance"] = e.explained_variance;
    } else {
        sidecar["k"] = e.knn;
        sidecar["clamped_mass"] = e.clamped_mass;
        sidecar["geodesic_stress"] = e.geodesic_stress;
    }
    std::ofstream out(sidecar_path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + sidecar_path);
    out << sidecar.dump(2) << '\n';
}

Embedding read_embedding_csv(const std::string& csv_path) {
    const csv::Table table = csv::read_file(csv_path);
    if (table.header.empty() || table.header.front() != "city_id") {
        throw std::runtime_error(csv_path + ": first column must be city_id");
    }
    Embedding e;
    e.dims = table.header.size() - 1;
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) {
            throw std::runtime_error(csv_path + ": ragged row");
        }
        e.city_ids.push_back(row.front());
        for (std::size_t c = 1; c < row.size(); ++c) {
            e.coordinates.push_back(csv::parse_double(row[c], csv_path));
        }
    }
    return e;
}

}  // namespace citynet::proj
