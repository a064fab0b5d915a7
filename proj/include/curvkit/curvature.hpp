#pragma once

#include "curvkit/density.hpp"
#include "curvkit/distance_matrix.hpp"

#include <optional>
#include <span>

namespace curvkit {

/// Volume of the unit Euclidean n-ball, pi^(n/2)/Gamma(n/2 + 1).
double unit_ball_volume(std::size_t n);

/// Volume of a Euclidean n-ball of radius r.
double euclidean_ball_volume(std::size_t n, double r);

enum class schedule_mode { nearest_neighbor, equal_spacing };

/// The radius sequence r_min = r_0 < ... < r_m = r_max at which ball volumes
/// are sampled. Nearest-neighbor mode draws the radii per evaluation point
/// from its sorted neighbor distances, filtered to (r_min, r_max].
struct radius_schedule {
    double r_min = 0.0;
    double r_max = 0.0;
    schedule_mode mode = schedule_mode::nearest_neighbor;
    double spacing = 0.0; // equal-spacing only

    static radius_schedule nearest_neighbor(double r_min, double r_max);
    /// Requires (r_max - r_min)/spacing to be a positive integer.
    static radius_schedule equal_spacing(double r_min, double r_max, double spacing);
};

/// One maximum-likelihood ball-volume evaluation.
struct ball_volume_estimate {
    double radius = 0.0;
    std::size_t count = 0;      // N(x, r)
    double mean_density = 0.0;  // harmonic-mean density over the ball
    double volume = 0.0;        // 0 iff the ball is empty
};

/// v_hat = N(x,r) / ((N-1) rho_bar_hat), equivalently the sum of reciprocal
/// in-ball densities over N-1; the two forms are checked against each other
/// to 1e-12 relative.
ball_volume_estimate estimate_ball_volume(const distance_matrix& d, const density_field& field,
                                          std::size_t x, double r);

struct ratio_point {
    double radius = 0.0;
    double y_hat = 0.0; // v_hat / (v_n r^n)
};

/// Estimated ball-volume ratios along the schedule. Nearest-neighbor mode
/// uses the O(m) incremental reciprocal-density sum over sorted neighbors;
/// radii equal to zero (duplicates of x) are dropped. Throws if no radius
/// survives filtering.
std::vector<ratio_point> ratio_sequence(const distance_matrix& d, const density_field& field,
                                        std::size_t x, const radius_schedule& schedule,
                                        std::size_t n_hat);

/// Discretized quadratic coefficient of the ratio curve:
///   sum_i r_i^2 (y_i - 1)(r_i - r_{i-1}) / ((r_max^5 - r_min^5)/5),
/// with r_0 = r_min as the left endpoint of the first increment.
double fit_quadratic_coefficient(std::span<const ratio_point> ratios,
                                 const radius_schedule& schedule);

struct curvature_report {
    std::size_t point = 0;
    std::size_t n_hat = 0;
    std::vector<ratio_point> ratios; // kept only when requested
    double c_hat = 0.0;
    double s_hat = 0.0; // always exactly -6 (n_hat + 2) c_hat
    std::optional<double> true_s;
};

curvature_report estimate_scalar_curvature(const distance_matrix& d, const density_field& field,
                                           std::size_t x, const radius_schedule& schedule,
                                           std::size_t n_hat, bool keep_ratios = false);

/// Reports for every point in the mask, computed concurrently and returned
/// in mask order.
std::vector<curvature_report> estimate_curvature_batch(
    const distance_matrix& d, const density_field& field, const evaluation_set& mask,
    const radius_schedule& schedule, std::size_t n_hat, bool keep_ratios = false);

} // namespace curvkit
