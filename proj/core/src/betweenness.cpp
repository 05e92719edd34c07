#include "citynet/betweenness.hpp"

#include <queue>
#include <stdexcept>

namespace citynet {

std::vector<double> betweenness_by_index(const StreetGraph& g, PathWeighting weighting) {
    const std::size_t n = g.node_count();
    if (n < 3) {
        throw std::invalid_argument("graph too small for betweenness normalization");
    }

    std::vector<double> score(n, 0.0);

    std::vector<double> dist(n);
    std::vector<double> sigma(n);
    std::vector<double> delta(n);
    std::vector<std::vector<std::uint32_t>> pred(n);
    std::vector<std::uint32_t> settled;  // nondecreasing distance order
    settled.reserve(n);

    using Item = std::pair<double, std::uint32_t>;
    for (std::size_t s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), kUnreachable);
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        for (auto& p : pred) p.clear();
        settled.clear();

        dist[s] = 0.0;
        sigma[s] = 1.0;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        heap.push({0.0, static_cast<std::uint32_t>(s)});

        while (!heap.empty()) {
            const auto [d, u] = heap.top();
            heap.pop();
            if (d > dist[u]) continue;
            settled.push_back(u);
            for (const auto& arc : g.out_arcs(u)) {
                const double w = weighting == PathWeighting::kMeters ? arc.weight : 1.0;
                const double nd = d + w;
                if (nd < dist[arc.target]) {
                    dist[arc.target] = nd;
                    sigma[arc.target] = sigma[u];
                    pred[arc.target].assign(1, u);
                    heap.push({nd, arc.target});
                } else if (nd == dist[arc.target]) {
                    sigma[arc.target] += sigma[u];
                    pred[arc.target].push_back(u);
                }
            }
        }

        // Dependency accumulation in reverse settled order.
        for (auto it = settled.rbegin(); it != settled.rend(); ++it) {
            const std::uint32_t w = *it;
            for (std::uint32_t v : pred[w]) {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if (w != s) score[w] += delta[w];
        }
    }

    const double norm = static_cast<double>(n - 1) * static_cast<double>(n - 2);
    for (double& v : score) v /= norm;
    return score;
}

std::map<NodeId, double> betweenness(const StreetGraph& g, PathWeighting weighting) {
    const std::vector<double> by_index = betweenness_by_index(g, weighting);
    std::map<NodeId, double> out;
    for (std::size_t i = 0; i < by_index.size(); ++i) out.emplace(g.id_at(i), by_index[i]);
    return out;
}

}  // namespace citynet
