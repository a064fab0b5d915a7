#pragma once

#include "curvkit/distance_matrix.hpp"

namespace curvkit {

enum class kde_kernel { gaussian, biweight };

/// Which distances were fed to the kernel; recorded for provenance.
enum class distance_source { exact, graph, euclidean };

/// Pointwise density estimates rho_hat(z) > 0 for every sample point.
struct density_field {
    std::vector<double> values;
    kde_kernel kernel = kde_kernel::gaussian;
    double bandwidth = 0.0;
    distance_source source = distance_source::exact;
    std::size_t dimension = 0; // n_hat used for normalization

    /// Throws unless every value is strictly positive and finite.
    void validate() const;
};

/// Kernel normalizers: the Gaussian constant (2 pi)^(-n/2), and the biweight
/// constant (n+2)(n+4)/(8 v_n) that makes (1-u^2)^2 integrate to 1 over the
/// unit n-ball.
double gaussian_normalizer(std::size_t n);
double biweight_normalizer(std::size_t n);

/// Manifold KDE from a distance matrix:
///   rho_hat(x) = (1/(N h^n)) sum_z c_K K(d(x,z)/h),
/// with the self-term included. With include_self = false the sum runs over
/// z != x and is divided by (N-1) h^n instead: the leave-one-out form, which
/// removes an O(c_K/(N h^n rho)) positive bias that the curvature pipeline
/// amplifies by ~40/r_max^2, and is what the experiment presets use. Throws
/// (advising a larger bandwidth) if any estimate fails to be strictly
/// positive, which can happen for compact kernels without the self-term.
density_field kde_density(const distance_matrix& d, std::size_t n_hat, kde_kernel kernel,
                          double bandwidth, distance_source source = distance_source::exact,
                          bool include_self = true);

/// Harmonic mean of rho_hat over the in-ball points other than x; falls back
/// to rho_hat(x) when the ball is empty.
double mean_ball_density(const density_field& field, const distance_matrix& d,
                         std::size_t x, double r);

/// Default bandwidth: mean over points of the distance to the
/// ceil(sqrt(N))-th nearest neighbor (clamped to N-1).
double default_bandwidth(const distance_matrix& d);

} // namespace curvkit
