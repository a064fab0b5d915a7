#include "curvkit/curvature.hpp"

#include "curvkit/common.hpp"
#include "curvkit/kernels.hpp"
#include "curvkit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace curvkit {

double unit_ball_volume(std::size_t n) {
    const double nd = static_cast<double>(n);
    return std::exp(0.5 * nd * std::log(M_PI) - std::lgamma(0.5 * nd + 1.0));
}

namespace {

// r^n by left-to-right multiplication: bit-reproducible across callers,
// unlike runtime-exponent pow
double integer_power(double r, std::size_t n) {
    double p = 1.0;
    for (std::size_t i = 0; i < n; ++i) p *= r;
    return p;
}

} // namespace

double euclidean_ball_volume(std::size_t n, double r) {
    if (n < 1) throw error("euclidean_ball_volume: dimension must be >= 1");
    if (r < 0.0) throw error("euclidean_ball_volume: negative radius");
    return unit_ball_volume(n) * integer_power(r, n);
}

radius_schedule radius_schedule::nearest_neighbor(double r_min, double r_max) {
    if (!(r_min >= 0.0) || !(r_max > r_min))
        throw error("radius_schedule: need 0 <= r_min < r_max");
    radius_schedule s;
    s.r_min = r_min;
    s.r_max = r_max;
    s.mode = schedule_mode::nearest_neighbor;
    return s;
}

radius_schedule radius_schedule::equal_spacing(double r_min, double r_max, double spacing) {
    if (!(r_min >= 0.0) || !(r_max > r_min))
        throw error("radius_schedule: need 0 <= r_min < r_max");
    if (!(spacing > 0.0)) throw error("radius_schedule: spacing must be > 0");
    const double steps = (r_max - r_min) / spacing;
    const double rounded = std::round(steps);
    if (rounded < 1.0 || std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps))
        throw error("radius_schedule: (r_max - r_min)/spacing must be a positive integer");
    radius_schedule s;
    s.r_min = r_min;
    s.r_max = r_max;
    s.mode = schedule_mode::equal_spacing;
    s.spacing = spacing;
    return s;
}

ball_volume_estimate estimate_ball_volume(const distance_matrix& d, const density_field& field,
                                          std::size_t x, double r) {
    if (x >= d.size()) throw error("estimate_ball_volume: index out of range");
    if (r < 0.0) throw error("estimate_ball_volume: negative radius");
    const std::size_t n = d.size();

    std::vector<double> row(n), recip(n);
    d.copy_row(x, row);
    row[x] = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) recip[j] = 1.0 / field.values[j];

    const auto& k = kernels::active();
    ball_volume_estimate est;
    est.radius = r;
    est.count = k.count_leq(row.data(), n, r);
    if (est.count == 0) {
        est.mean_density = field.values[x];
        est.volume = 0.0;
        return est;
    }
    const double recip_sum = k.sum_recip_leq(row.data(), recip.data(), n, r);
    est.mean_density = static_cast<double>(est.count) / recip_sum;
    est.volume = recip_sum / static_cast<double>(n - 1);

    // cross-check against the count/mean-density form
    const double alt = static_cast<double>(est.count) /
                       (static_cast<double>(n - 1) * est.mean_density);
    if (std::abs(alt - est.volume) > 1e-12 * std::max(std::abs(alt), std::abs(est.volume)))
        throw error("estimate_ball_volume: volume forms disagree");
    return est;
}

namespace {

struct neighbor {
    double dist;
    std::size_t index;
    bool operator<(const neighbor& other) const {
        return dist != other.dist ? dist < other.dist : index < other.index;
    }
};

/// Sorted neighbors of x (self excluded) with distance <= limit first;
/// the full sorted order is needed, so this is a plain sort of the row.
void sorted_neighbors(const distance_matrix& d, std::size_t x, std::vector<neighbor>& out,
                      std::vector<double>& row_buffer) {
    const std::size_t n = d.size();
    row_buffer.resize(n);
    d.copy_row(x, row_buffer);
    out.clear();
    out.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j)
        if (j != x) out.push_back({row_buffer[j], j});
    std::sort(out.begin(), out.end());
}

} // namespace

std::vector<ratio_point> ratio_sequence(const distance_matrix& d, const density_field& field,
                                        std::size_t x, const radius_schedule& schedule,
                                        std::size_t n_hat) {
    if (x >= d.size()) throw error("ratio_sequence: index out of range");
    if (n_hat < 1) throw error("ratio_sequence: dimension must be >= 1");
    const std::size_t n = d.size();
    const double v_n = unit_ball_volume(n_hat);

    std::vector<neighbor> nbrs;
    std::vector<double> row;
    sorted_neighbors(d, x, nbrs, row);

    std::vector<ratio_point> ratios;
    double running = 0.0; // incremental sum of 1/rho_hat over sorted neighbors

    if (schedule.mode == schedule_mode::nearest_neighbor) {
        for (std::size_t j = 0; j < nbrs.size(); ++j) {
            const double r = nbrs[j].dist;
            if (r > schedule.r_max) break;
            running += 1.0 / field.values[nbrs[j].index];
            if (r <= schedule.r_min) continue; // also drops r = 0 duplicates
            const bool tie_with_next = j + 1 < nbrs.size() && nbrs[j + 1].dist == r;
            if (tie_with_next) continue; // emit once per distinct radius
            const double volume = running / static_cast<double>(n - 1);
            ratios.push_back({r, volume / (v_n * integer_power(r, n_hat))});
        }
        if (!nbrs.empty() && nbrs.back().dist < schedule.r_max)
            warn("ratio_sequence: schedule truncates at effective r_max=" +
                 std::to_string(nbrs.back().dist) + " (requested " +
                 std::to_string(schedule.r_max) + ")");
    } else {
        const auto steps = static_cast<std::size_t>(
            std::llround((schedule.r_max - schedule.r_min) / schedule.spacing));
        std::size_t j = 0;
        for (std::size_t i = 1; i <= steps; ++i) {
            const double r = i == steps ? schedule.r_max
                                        : schedule.r_min + static_cast<double>(i) * schedule.spacing;
            while (j < nbrs.size() && nbrs[j].dist <= r) {
                running += 1.0 / field.values[nbrs[j].index];
                ++j;
            }
            if (r <= 0.0) continue;
            const double volume = running / static_cast<double>(n - 1);
            ratios.push_back({r, volume / (v_n * integer_power(r, n_hat))});
        }
    }

    if (ratios.empty())
        throw error("ratio_sequence: no radii in (" + std::to_string(schedule.r_min) + ", " +
                    std::to_string(schedule.r_max) + "] at point " + std::to_string(x));
    return ratios;
}

double fit_quadratic_coefficient(std::span<const ratio_point> ratios,
                                 const radius_schedule& schedule) {
    if (ratios.empty()) throw error("fit_quadratic_coefficient: empty ratio sequence");
    if (!(schedule.r_max > schedule.r_min))
        throw error("fit_quadratic_coefficient: degenerate schedule");
    double numerator = 0.0;
    double prev = schedule.r_min;
    for (const auto& p : ratios) {
        numerator += p.radius * p.radius * (p.y_hat - 1.0) * (p.radius - prev);
        prev = p.radius;
    }
    const double denominator =
        0.2 * (std::pow(schedule.r_max, 5.0) - std::pow(schedule.r_min, 5.0));
    return numerator / denominator;
}

curvature_report estimate_scalar_curvature(const distance_matrix& d, const density_field& field,
                                           std::size_t x, const radius_schedule& schedule,
                                           std::size_t n_hat, bool keep_ratios) {
    curvature_report report;
    report.point = x;
    report.n_hat = n_hat;
    auto ratios = ratio_sequence(d, field, x, schedule, n_hat);
    report.c_hat = fit_quadratic_coefficient(ratios, schedule);
    report.s_hat = -6.0 * (static_cast<double>(n_hat) + 2.0) * report.c_hat;
    if (keep_ratios) report.ratios = std::move(ratios);
    return report;
}

std::vector<curvature_report> estimate_curvature_batch(
    const distance_matrix& d, const density_field& field, const evaluation_set& mask,
    const radius_schedule& schedule, std::size_t n_hat, bool keep_ratios) {
    mask.validate(d.size());
    std::vector<curvature_report> reports(mask.size());
    parallel_for(0, mask.size(), [&](std::size_t s) {
        reports[s] =
            estimate_scalar_curvature(d, field, mask.indices[s], schedule, n_hat, keep_ratios);
    });
    return reports;
}

} // namespace curvkit
