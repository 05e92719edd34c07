#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "citynet/csv.hpp"
#include "citynet/pipeline.hpp"

namespace citynet::pipeline {

IndicatorTable IndicatorTable::read_csv(const std::string& path) {
    const csv::Table table = csv::read_file(path);
    if (table.header.empty() || table.header.front() != "city_id") {
        throw std::runtime_error(path + ": first column must be city_id");
    }

    IndicatorTable t;
    t.columns.assign(table.header.begin() + 1, table.header.end());
    const std::size_t pop_col = t.column_index("population");
    const std::size_t area_col = t.column_index("area_km2");

    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) throw std::runtime_error(path + ": ragged row");
        t.city_ids.push_back(row.front());
        for (std::size_t c = 1; c < row.size(); ++c) {
            t.values.push_back(csv::parse_double(row[c], path));
        }
        const std::size_t r = t.city_ids.size() - 1;
        const double population = t.values[r * t.columns.size() + pop_col];
        const double area = t.values[r * t.columns.size() + area_col];
        if (population < 0.0) {
            throw std::runtime_error(path + ": negative population for " + row.front());
        }
        if (!(area > 0.0)) {
            throw std::runtime_error(path + ": non-positive area for " + row.front());
        }
    }
    return t;
}

std::size_t IndicatorTable::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return i;
    }
    throw std::invalid_argument("indicators: missing column " + std::string(name));
}

std::optional<double> IndicatorTable::value(std::string_view city_id, std::size_t column) const {
    for (std::size_t r = 0; r < city_ids.size(); ++r) {
        if (city_ids[r] == city_id) return values[r * columns.size() + column];
    }
    return std::nullopt;
}

IndicatorCorrelation correlate_indicator(const proj::Embedding& embedding_1d,
                                         const IndicatorTable& indicators,
                                         std::string_view column) {
    if (embedding_1d.dims != 1) {
        throw std::invalid_argument("correlate_indicator needs a 1-D embedding, got " +
                                    std::to_string(embedding_1d.dims) + " dims");
    }
    const std::size_t col = indicators.column_index(column);

    std::vector<double> coords, values;
    for (std::size_t i = 0; i < embedding_1d.city_ids.size(); ++i) {
        if (const auto v = indicators.value(embedding_1d.city_ids[i], col)) {
            coords.push_back(embedding_1d.coord(i, 0));
            values.push_back(*v);
        }
    }
    if (coords.size() < 3) {
        throw std::runtime_error("correlate_indicator: fewer than 3 matched cities");
    }

    double r = 0.0;
    try {
        r = select::pearson(coords, values);
    } catch (const std::invalid_argument&) {
        throw std::runtime_error("correlate_indicator: constant column " + std::string(column));
    }
    return {r, std::fabs(r), coords.size()};
}

namespace {

// Linear-interpolation quantile over a sorted sample.
double quantile_sorted(const std::vector<double>& sorted, double p) {
    const double h = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

std::vector<ClusterProfileRow> cluster_profile(const cluster::ClusterAssignment& assignment,
                                               const IndicatorTable& indicators) {
    const std::size_t pop_col = indicators.column_index("population");
    const std::size_t area_col = indicators.column_index("area_km2");

    struct Matched {
        std::size_t cluster;
        double population;
        double area;
    };
    std::vector<Matched> matched;
    for (std::size_t i = 0; i < assignment.city_ids.size(); ++i) {
        const auto pop = indicators.value(assignment.city_ids[i], pop_col);
        const auto area = indicators.value(assignment.city_ids[i], area_col);
        if (pop && area) matched.push_back({assignment.labels[i], *pop, *area});
    }
    if (matched.empty()) {
        throw std::runtime_error("cluster_profile: assignment and indicators share no city");
    }

    std::vector<double> areas;
    double total_population = 0.0;
    for (const Matched& m : matched) {
        areas.push_back(m.area);
        total_population += m.population;
    }
    std::sort(areas.begin(), areas.end());
    const double q1 = quantile_sorted(areas, 0.25);
    const double q2 = quantile_sorted(areas, 0.50);
    const double q3 = quantile_sorted(areas, 0.75);

    const std::size_t k =
        1 + *std::max_element(assignment.labels.begin(), assignment.labels.end());
    std::vector<ClusterProfileRow> rows(k);
    for (std::size_t c = 0; c < k; ++c) rows[c].cluster = c;

    for (const Matched& m : matched) {
        ClusterProfileRow& row = rows[m.cluster];
        ++row.city_count;
        row.population_share_pct += m.population;
        std::size_t cls = 3;
        if (m.area <= q1) {
            cls = 0;
        } else if (m.area <= q2) {
            cls = 1;
        } else if (m.area <= q3) {
            cls = 2;
        }
        ++row.area_classes[cls];
    }
    for (ClusterProfileRow& row : rows) {
        row.population_share_pct =
            total_population > 0.0 ? 100.0 * row.population_share_pct / total_population : 0.0;
    }
    return rows;
}

}  // namespace citynet::pipeline
