#include "citynet/components.hpp"

#include <algorithm>
#include <cstdint>
#include <map>

namespace citynet {

namespace {

std::vector<std::uint32_t> weak_labels(const StreetGraph& g) {
    const std::size_t n = g.node_count();
    std::vector<std::uint32_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<std::uint32_t>(i);

    auto find = [&](std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };

    for (std::size_t u = 0; u < n; ++u) {
        for (const auto& arc : g.out_arcs(u)) {
            const auto a = find(static_cast<std::uint32_t>(u));
            const auto b = find(arc.target);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
    }

    std::vector<std::uint32_t> label(n);
    for (std::size_t i = 0; i < n; ++i) label[i] = find(static_cast<std::uint32_t>(i));
    return label;
}

// Iterative Tarjan strongly-connected components.
std::vector<std::uint32_t> strong_labels(const StreetGraph& g) {
    const std::size_t n = g.node_count();
    constexpr std::uint32_t kUnvisited = 0xFFFFFFFF;

    std::vector<std::uint32_t> index(n, kUnvisited);
    std::vector<std::uint32_t> lowlink(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::uint32_t> stack;
    std::vector<std::uint32_t> label(n, 0);
    std::uint32_t next_index = 0;

    struct Frame {
        std::uint32_t node;
        std::size_t arc_pos;
    };
    std::vector<Frame> call_stack;

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != kUnvisited) continue;
        call_stack.push_back({static_cast<std::uint32_t>(root), 0});

        while (!call_stack.empty()) {
            Frame& f = call_stack.back();
            const std::uint32_t v = f.node;
            if (f.arc_pos == 0) {
                index[v] = lowlink[v] = next_index++;
                stack.push_back(v);
                on_stack[v] = true;
            }

            const auto arcs = g.out_arcs(v);
            bool descended = false;
            while (f.arc_pos < arcs.size()) {
                const std::uint32_t w = arcs[f.arc_pos].target;
                ++f.arc_pos;
                if (index[w] == kUnvisited) {
                    call_stack.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w]) lowlink[v] = std::min(lowlink[v], index[w]);
            }
            if (descended) continue;

            if (lowlink[v] == index[v]) {
                std::uint32_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    label[w] = v;
                } while (w != v);
            }
            call_stack.pop_back();
            if (!call_stack.empty()) {
                const std::uint32_t parent = call_stack.back().node;
                lowlink[parent] = std::min(lowlink[parent], lowlink[v]);
            }
        }
    }
    return label;
}

}  // namespace

std::vector<std::set<NodeId>> connected_components(const StreetGraph& g, ComponentMode mode) {
    const std::size_t n = g.node_count();
    if (n == 0) return {};

    const std::vector<std::uint32_t> label =
        mode == ComponentMode::kWeak ? weak_labels(g) : strong_labels(g);

    std::map<std::uint32_t, std::set<NodeId>> grouped;
    for (std::size_t i = 0; i < n; ++i) grouped[label[i]].insert(g.id_at(i));

    std::vector<std::set<NodeId>> out;
    out.reserve(grouped.size());
    for (auto& [_, members] : grouped) out.push_back(std::move(members));
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return *a.begin() < *b.begin(); });
    return out;
}

}  // namespace citynet
