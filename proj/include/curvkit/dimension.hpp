#pragma once

#include "curvkit/distance_matrix.hpp"

#include <span>

namespace curvkit {

/// Maximum-likelihood intrinsic-dimension estimate from nearest-neighbor
/// distance log-ratios.
struct dimension_estimate {
    std::size_t n_hat = 0;           // nearest integer to the mean of per_k_means
    std::vector<double> per_k_means; // n_hat_k for k = k1..k2
    std::size_t k1 = 0;
    std::size_t k2 = 0;

    /// n_hat recomputed for a narrower neighbor range [k1, k2_sub].
    std::size_t n_hat_for_range(std::size_t k2_sub) const;
};

/// Per-point estimator on the sorted distances T_1 <= ... <= T_k from a
/// point to its k nearest neighbors:
///   [ (1/(k-1)) sum_{j<k} log(T_k / T_j) ]^-1.
/// Returns +inf when all T_j equal T_k and NaN when any T_j is zero.
double levina_bickel_point(std::span<const double> sorted_T, std::size_t k);

/// Averages the per-point estimator over all points for each k in [k1, k2]
/// and rounds the mean over k. Points with zero nearest-neighbor distances
/// (duplicates) are skipped with a warning, as are infinite per-point
/// estimates caused by tied distances.
dimension_estimate levina_bickel(const distance_matrix& d, std::size_t k1, std::size_t k2);

} // namespace curvkit
