#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "citynet/csv.hpp"
#include "citynet/feature_select.hpp"

namespace citynet::select {

FeatureMatrix::FeatureMatrix(std::vector<std::string> city_ids,
                             std::vector<std::string> feature_names,
                             std::vector<double> row_major_values)
    : city_ids_(std::move(city_ids)),
      feature_names_(std::move(feature_names)),
      values_(std::move(row_major_values)) {
    if (values_.size() != city_ids_.size() * feature_names_.size()) {
        throw std::invalid_argument("feature matrix dimensions inconsistent");
    }
}

FeatureMatrix FeatureMatrix::from_vectors(const std::vector<metrics::FeatureVector>& vectors) {
    if (vectors.empty()) return {};

    std::vector<const metrics::FeatureVector*> sorted;
    for (const auto& v : vectors) sorted.push_back(&v);
    std::sort(sorted.begin(), sorted.end(),
              [](const auto* a, const auto* b) { return a->city_id < b->city_id; });

    std::vector<std::string> ids;
    std::vector<double> values;
    for (const auto* v : sorted) {
        if (v->names != sorted.front()->names) {
            throw std::invalid_argument("feature-name set differs across the corpus");
        }
        ids.push_back(v->city_id);
        for (const auto& cell : v->values) {
            values.push_back(cell ? *cell : std::numeric_limits<double>::quiet_NaN());
        }
    }
    return FeatureMatrix(std::move(ids), sorted.front()->names, std::move(values));
}

FeatureMatrix FeatureMatrix::read_csv(const std::string& path) {
    const csv::Table table = csv::read_file(path);
    if (table.header.empty() || table.header.front() != "city_id") {
        throw std::runtime_error(path + ": first column must be city_id");
    }
    std::vector<std::string> names(table.header.begin() + 1, table.header.end());
    std::vector<std::string> ids;
    std::vector<double> values;
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) throw std::runtime_error(path + ": ragged row");
        ids.push_back(row.front());
        for (std::size_t c = 1; c < row.size(); ++c) {
            values.push_back(row[c].empty() ? std::numeric_limits<double>::quiet_NaN()
                                            : csv::parse_double(row[c], path));
        }
    }
    return FeatureMatrix(std::move(ids), std::move(names), std::move(values));
}

bool FeatureMatrix::is_defined(std::size_t row, std::size_t col) const {
    return !std::isnan(at(row, col));
}

std::size_t FeatureMatrix::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < feature_names_.size(); ++i) {
        if (feature_names_[i] == name) return i;
    }
    throw std::invalid_argument("unknown feature: " + std::string(name));
}

std::vector<double> FeatureMatrix::column(std::size_t col) const {
    std::vector<double> out(rows());
    for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, col);
    return out;
}

std::vector<double> FeatureMatrix::row(std::size_t r) const {
    std::vector<double> out(cols());
    for (std::size_t c = 0; c < cols(); ++c) out[c] = at(r, c);
    return out;
}

FeatureMatrix FeatureMatrix::select_columns(const std::vector<std::string>& names) const {
    std::vector<std::size_t> idx;
    for (const auto& name : names) idx.push_back(column_index(name));

    std::vector<double> values;
    values.reserve(rows() * idx.size());
    for (std::size_t r = 0; r < rows(); ++r) {
        for (std::size_t i : idx) values.push_back(at(r, i));
    }
    return FeatureMatrix(city_ids_, names, std::move(values));
}

FeatureMatrix FeatureMatrix::drop_undefined_rows(std::vector<std::string>* dropped) const {
    std::vector<std::string> ids;
    std::vector<double> values;
    for (std::size_t r = 0; r < rows(); ++r) {
        bool complete = true;
        for (std::size_t c = 0; c < cols(); ++c) {
            if (!is_defined(r, c)) {
                complete = false;
                break;
            }
        }
        if (!complete) {
            if (dropped) dropped->push_back(city_ids_[r]);
            continue;
        }
        ids.push_back(city_ids_[r]);
        for (std::size_t c = 0; c < cols(); ++c) values.push_back(at(r, c));
    }
    return FeatureMatrix(std::move(ids), feature_names_, std::move(values));
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
    if (x.size() < 2) throw std::invalid_argument("pearson: need >= 2 samples");

    const double n = static_cast<double>(x.size());
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mean_x += x[i];
        mean_y += y[i];
    }
    mean_x /= n;
    mean_y /= n;

    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("constant feature");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationMatrix::CorrelationMatrix(std::vector<std::string> feature_names,
                                     std::vector<double> entries)
    : feature_names_(std::move(feature_names)), entries_(std::move(entries)) {
    const std::size_t n = feature_names_.size();
    if (entries_.size() != n * n) {
        throw std::invalid_argument("correlation matrix dimensions inconsistent");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (entries_[i * n + i] != 1.0) {
            throw std::invalid_argument("correlation diagonal must be exactly 1");
        }
        for (std::size_t j = 0; j < i; ++j) {
            const double v = entries_[i * n + j];
            if (!std::isfinite(v) || v < -1.0 || v > 1.0 || v != entries_[j * n + i]) {
                throw std::invalid_argument("correlation matrix must be symmetric in [-1, 1]");
            }
        }
    }
}

CorrelationResult correlation_matrix(const FeatureMatrix& m) {
    // A column is usable when it has at least two distinct defined values.
    std::vector<std::size_t> usable;
    std::vector<std::string> excluded;
    for (std::size_t c = 0; c < m.cols(); ++c) {
        double first = std::numeric_limits<double>::quiet_NaN();
        bool distinct = false;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (!m.is_defined(r, c)) continue;
            if (std::isnan(first)) {
                first = m.at(r, c);
            } else if (m.at(r, c) != first) {
                distinct = true;
                break;
            }
        }
        if (distinct) {
            usable.push_back(c);
        } else {
            excluded.push_back(m.feature_names()[c]);
        }
    }

    const std::size_t k = usable.size();
    std::vector<std::string> names;
    for (std::size_t c : usable) names.push_back(m.feature_names()[c]);

    std::vector<double> entries(k * k, 0.0);
    for (std::size_t i = 0; i < k; ++i) entries[i * k + i] = 1.0;

    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            xs.clear();
            ys.clear();
            for (std::size_t r = 0; r < m.rows(); ++r) {
                if (m.is_defined(r, usable[i]) && m.is_defined(r, usable[j])) {
                    xs.push_back(m.at(r, usable[i]));
                    ys.push_back(m.at(r, usable[j]));
                }
            }
            if (xs.size() < 3) {
                throw std::runtime_error("fewer than 3 pairwise-complete rows for " + names[i] +
                                         " / " + names[j]);
            }
            double r = 0.0;
            try {
                r = pearson(xs, ys);
            } catch (const std::invalid_argument&) {
                throw std::runtime_error("feature constant on the pairwise-complete rows: " +
                                         names[i] + " / " + names[j]);
            }
            entries[i * k + j] = r;
            entries[j * k + i] = r;
        }
    }
    return {CorrelationMatrix(std::move(names), std::move(entries)), std::move(excluded)};
}

}  // namespace citynet::select
