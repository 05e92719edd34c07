#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "citynet/csv.hpp"
#include "citynet/feature_select.hpp"

namespace citynet::select {

SelectionResult select_features(const CorrelationMatrix& c, double threshold, DropPolicy policy,
                                std::uint64_t seed) {
    const std::size_t n = c.size();
    const auto& names = c.feature_names();
    std::vector<bool> active(n, true);
    std::mt19937_64 rng(seed);

    SelectionResult result;
    std::size_t step = 1;

    while (true) {
        // Worst offending active pair; ties broken by the sorted name pair.
        std::size_t best_i = n, best_j = n;
        double best_abs = threshold;
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i]) continue;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (!active[j]) continue;
                const double a = std::fabs(c.at(i, j));
                if (a <= threshold) continue;
                bool better = a > best_abs;
                if (a == best_abs && best_i < n) {
                    const auto key = std::minmax(names[i], names[j]);
                    const auto best_key = std::minmax(names[best_i], names[best_j]);
                    better = key < best_key;
                }
                if (better || best_i == n) {
                    best_abs = a;
                    best_i = i;
                    best_j = j;
                }
            }
        }
        if (best_i == n) break;

        std::size_t drop;
        std::string rule;
        if (policy == DropPolicy::kSeeded) {
            drop = (rng() & 1) ? best_j : best_i;
            rule = "seeded";
        } else {
            auto mean_abs = [&](std::size_t self) {
                double sum = 0.0;
                std::size_t count = 0;
                for (std::size_t other = 0; other < n; ++other) {
                    if (!active[other] || other == self) continue;
                    sum += std::fabs(c.at(self, other));
                    ++count;
                }
                return count == 0 ? 0.0 : sum / static_cast<double>(count);
            };
            const double mi = mean_abs(best_i);
            const double mj = mean_abs(best_j);
            if (mi != mj) {
                drop = mi > mj ? best_i : best_j;
            } else {
                // Tie: keep the lexicographically smaller name.
                drop = names[best_i] < names[best_j] ? best_j : best_i;
            }
            rule = "deterministic:mean_abs_r";
        }

        active[drop] = false;
        const auto pair = std::minmax(names[best_i], names[best_j]);
        result.log.push_back(
            {step++, pair.first, pair.second, c.at(best_i, best_j), names[drop], rule});
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (active[i]) result.kept.push_back(names[i]);
    }

    // The loop cannot terminate while an offending active pair remains.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (active[i] && active[j] && std::fabs(c.at(i, j)) > threshold) {
                throw std::logic_error("selection left a correlated pair behind");
            }
        }
    }
    return result;
}

void write_correlation_csv(const CorrelationMatrix& c, const std::string& path) {
    csv::Table table;
    table.header.push_back("feature");
    for (const auto& name : c.feature_names()) table.header.push_back(name);
    for (std::size_t i = 0; i < c.size(); ++i) {
        std::vector<std::string> row{c.feature_names()[i]};
        for (std::size_t j = 0; j < c.size(); ++j) row.push_back(csv::format_double(c.at(i, j)));
        table.rows.push_back(std::move(row));
    }
    csv::write_file(path, table);
}

void write_selection_json(const SelectionResult& result,
                          const std::vector<std::string>& excluded_constant, double threshold,
                          DropPolicy policy, const std::string& path) {
    nlohmann::json log = nlohmann::json::array();
    for (const DropEvent& e : result.log) {
        log.push_back({{"step", e.step},
                       {"pair", {e.pair_a, e.pair_b}},
                       {"r", e.r},
                       {"dropped", e.dropped},
                       {"rule", e.rule}});
    }
    nlohmann::json root{
        {"kept", result.kept},
        {"dropped", std::move(log)},
        {"excluded_constant", excluded_constant},
        {"threshold", threshold},
        {"policy", policy == DropPolicy::kDeterministic ? "deterministic" : "seeded"},
    };
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << root.dump(2) << '\n';
}

}  // namespace citynet::select
