#ifndef CITYNET_EIGEN_HPP
#define CITYNET_EIGEN_HPP

#include <cstddef>
#include <vector>

namespace citynet::proj {

struct EigenPair {
    double value;
    std::vector<double> vector;  // unit length
};

/// Top-k eigenpairs of a dense symmetric matrix in descending algebraic
/// order. Power iteration on the Gershgorin-shifted matrix with deflation;
/// deterministic start vectors. Throws with the iteration count when the
/// residual does not reach `tol` within `max_iter` iterations.
std::vector<EigenPair> symmetric_top_eigen(const std::vector<double>& matrix, std::size_t n,
                                           std::size_t k, double tol = 1e-12,
                                           std::size_t max_iter = 10000);

}  // namespace citynet::proj

#endif
