#include "citynet/eigen.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace citynet::proj {

namespace {

double splitmix64_unit(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

std::vector<EigenPair> symmetric_top_eigen(const std::vector<double>& matrix, std::size_t n,
                                           std::size_t k, double tol, std::size_t max_iter) {
    if (matrix.size() != n * n) throw std::invalid_argument("matrix dimensions inconsistent");
    if (k > n) throw std::invalid_argument("requested more eigenpairs than the dimension");

    // Gershgorin shift makes the spectrum nonnegative, so the power method
    // ranks eigenvalues algebraically rather than by magnitude.
    double shift = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += std::fabs(matrix[i * n + j]);
        shift = std::max(shift, row);
    }

    std::vector<EigenPair> found;
    found.reserve(k);

    std::vector<double> v(n), w(n);
    for (std::size_t comp = 0; comp < k; ++comp) {
        std::uint64_t rng_state = 0x5DEECE66DULL + comp;
        for (double& x : v) x = splitmix64_unit(rng_state) - 0.5;

        // Start orthogonal to the found eigenvectors.
        for (const EigenPair& p : found) {
            const double c = dot(v, p.vector);
            for (std::size_t i = 0; i < n; ++i) v[i] -= c * p.vector[i];
        }
        double vn = norm2(v);
        if (vn == 0.0) throw std::runtime_error("degenerate start vector");
        for (double& x : v) x /= vn;

        double shifted = 0.0;
        bool converged = false;
        std::size_t iter = 0;
        for (; iter < max_iter; ++iter) {
            // w = (A + shift I) v, deflated by the found components.
            for (std::size_t i = 0; i < n; ++i) {
                double s = shift * v[i];
                const double* row = matrix.data() + i * n;
                for (std::size_t j = 0; j < n; ++j) s += row[j] * v[j];
                w[i] = s;
            }
            for (const EigenPair& p : found) {
                const double c = (p.value + shift) * dot(v, p.vector);
                for (std::size_t i = 0; i < n; ++i) w[i] -= c * p.vector[i];
            }

            shifted = dot(v, w);  // Rayleigh quotient of the deflated operator

            double residual = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double r = w[i] - shifted * v[i];
                residual += r * r;
            }
            residual = std::sqrt(residual);
            if (residual <= tol * std::max(1.0, std::fabs(shifted))) {
                converged = true;
                break;
            }

            const double wn = norm2(w);
            if (wn == 0.0) {
                // Remaining spectrum sits exactly at -shift; v already spans it.
                shifted = 0.0;
                converged = true;
                break;
            }
            for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wn;
            // Re-orthogonalize occasionally to stop drift back into deflated space.
            if ((iter & 15) == 15) {
                for (const EigenPair& p : found) {
                    const double c = dot(v, p.vector);
                    for (std::size_t i = 0; i < n; ++i) v[i] -= c * p.vector[i];
                }
                vn = norm2(v);
                if (vn == 0.0) throw std::runtime_error("eigen space exhausted");
                for (double& x : v) x /= vn;
            }
        }
        if (!converged) {
            throw std::runtime_error("eigen solver did not converge after " +
                                     std::to_string(iter) + " iterations");
        }
        found.push_back({shifted - shift, v});
    }
    return found;
}

}  // namespace citynet::proj
