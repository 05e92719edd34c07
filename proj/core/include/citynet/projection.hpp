#ifndef CITYNET_PROJECTION_HPP
#define CITYNET_PROJECTION_HPP

#include <string>
#include <vector>

#include "citynet/feature_select.hpp"

namespace citynet::proj {

/// Low-dimensional coordinates per city plus method diagnostics.
struct Embedding {
    std::vector<std::string> city_ids;
    std::size_t dims = 0;
    std::vector<double> coordinates;  // row-major city x dims
    std::string method;               // "pca" or "isomap"

    std::vector<double> explained_variance;  // PCA: ratio per component
    std::vector<double> components;          // PCA: dims x cols loading rows
    std::size_t knn = 0;                     // Isomap neighborhood size
    double clamped_mass = 0.0;               // Isomap: |sum of clamped negative eigenvalues|
    double geodesic_stress = 0.0;            // Isomap: normalized residual stress

    double coord(std::size_t row, std::size_t col) const {
        return coordinates[row * dims + col];
    }
    std::vector<double> dimension(std::size_t col) const;
};

/// Rescales every column to zero mean and unit sample variance.
/// Throws on a constant or incomplete column.
select::FeatureMatrix standardize(const select::FeatureMatrix& m);

/// Projects onto the top-d eigenvectors of the sample covariance matrix.
/// Sign convention: each component's largest-magnitude loading is positive.
Embedding pca(const select::FeatureMatrix& m, std::size_t dims);

/// Geodesic embedding: symmetrized k-nearest-neighbor graph, all-pairs
/// shortest paths, classical MDS on the geodesic matrix. Throws when the
/// neighborhood graph is disconnected, naming the component sizes.
Embedding isomap(const select::FeatureMatrix& m, std::size_t dims, std::size_t k_neighbors = 5);

/// `city_id,c1[,c2...]` CSV plus a JSON diagnostics sidecar.
void write_embedding_csv(const Embedding& e, const std::string& csv_path,
                         const std::string& sidecar_path);
Embedding read_embedding_csv(const std::string& csv_path);

}  // namespace citynet::proj

#endif
