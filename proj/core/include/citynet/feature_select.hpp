#ifndef CITYNET_FEATURE_SELECT_HPP
#define CITYNET_FEATURE_SELECT_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "citynet/metrics.hpp"

namespace citynet::select {

/// Dense city-by-feature table. Undefined cells are stored as NaN.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    FeatureMatrix(std::vector<std::string> city_ids, std::vector<std::string> feature_names,
                  std::vector<double> row_major_values);

    static FeatureMatrix from_vectors(const std::vector<metrics::FeatureVector>& vectors);
    static FeatureMatrix read_csv(const std::string& path);

    std::size_t rows() const { return city_ids_.size(); }
    std::size_t cols() const { return feature_names_.size(); }
    double at(std::size_t row, std::size_t col) const { return values_[row * cols() + col]; }
    double& at(std::size_t row, std::size_t col) { return values_[row * cols() + col]; }
    bool is_defined(std::size_t row, std::size_t col) const;

    const std::vector<std::string>& city_ids() const { return city_ids_; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }
    std::size_t column_index(std::string_view name) const;  // throws if absent

    std::vector<double> column(std::size_t col) const;
    std::vector<double> row(std::size_t r) const;

    FeatureMatrix select_columns(const std::vector<std::string>& names) const;

    /// Removes cities with any undefined cell, recording their ids.
    FeatureMatrix drop_undefined_rows(std::vector<std::string>* dropped = nullptr) const;

private:
    std::vector<std::string> city_ids_;
    std::vector<std::string> feature_names_;
    std::vector<double> values_;
};

/// Sample Pearson correlation, clamped to [-1, 1] against rounding.
/// Throws on length mismatch, length < 2, or a constant input.
double pearson(std::span<const double> x, std::span<const double> y);

class CorrelationMatrix {
public:
    CorrelationMatrix(std::vector<std::string> feature_names, std::vector<double> entries);

    std::size_t size() const { return feature_names_.size(); }
    double at(std::size_t i, std::size_t j) const { return entries_[i * size() + j]; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }

private:
    std::vector<std::string> feature_names_;
    std::vector<double> entries_;  // symmetric, unit diagonal
};

struct CorrelationResult {
    CorrelationMatrix matrix;
    std::vector<std::string> excluded_constant;  // columns dropped before correlating
};

/// Pairwise-complete Pearson matrix: entry (i, j) correlates the rows where
/// both features are defined. Constant columns are excluded and reported.
/// Throws when a feature pair has fewer than three complete rows.
CorrelationResult correlation_matrix(const FeatureMatrix& m);

enum class DropPolicy { kDeterministic, kSeeded };

struct DropEvent {
    std::size_t step;
    std::string pair_a;  // lexicographically first of the offending pair
    std::string pair_b;
    double r;
    std::string dropped;
    std::string rule;
};

struct SelectionResult {
    std::vector<std::string> kept;  // in original feature order
    std::vector<DropEvent> log;
};

/// Iteratively resolves every off-diagonal |r| > threshold, worst pair
/// first (ties by lexicographic name pair). The deterministic policy drops
/// the member with the larger mean |r| to the other remaining features
/// (ties keep the lexicographically smaller name); the seeded policy drops
/// one member uniformly at random.
SelectionResult select_features(const CorrelationMatrix& c, double threshold = 0.5,
                                DropPolicy policy = DropPolicy::kDeterministic,
                                std::uint64_t seed = 0);

/// Square CSV: header row and first column carry the feature names.
void write_correlation_csv(const CorrelationMatrix& c, const std::string& path);

/// Selection audit trail: kept set, ordered drop log, excluded constants.
void write_selection_json(const SelectionResult& result,
                          const std::vector<std::string>& excluded_constant, double threshold,
                          DropPolicy policy, const std::string& path);

}  // namespace citynet::select

#endif
