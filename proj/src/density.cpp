#include "curvkit/density.hpp"

#include "curvkit/common.hpp"
#include "curvkit/curvature.hpp"
#include "curvkit/kernels.hpp"
#include "curvkit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace curvkit {

void density_field::validate() const {
    for (double v : values)
        if (!(v > 0.0) || !std::isfinite(v))
            throw error("density_field: estimate not strictly positive; increase the bandwidth");
}

double gaussian_normalizer(std::size_t n) {
    return std::pow(2.0 * M_PI, -0.5 * static_cast<double>(n));
}

double biweight_normalizer(std::size_t n) {
    const double nd = static_cast<double>(n);
    return (nd + 2.0) * (nd + 4.0) / (8.0 * unit_ball_volume(n));
}

density_field kde_density(const distance_matrix& d, std::size_t n_hat, kde_kernel kernel,
                          double bandwidth, distance_source source, bool include_self) {
    if (!(bandwidth > 0.0)) throw error("kde_density: bandwidth must be > 0");
    if (n_hat < 1) throw error("kde_density: dimension must be >= 1");

    const std::size_t n = d.size();
    if (!include_self && n < 2)
        throw error("kde_density: leave-one-out form needs at least 2 points");
    const double inv_h = 1.0 / bandwidth;
    const double c_k = kernel == kde_kernel::gaussian ? gaussian_normalizer(n_hat)
                                                      : biweight_normalizer(n_hat);
    const double denom = include_self ? static_cast<double>(n) : static_cast<double>(n - 1);
    const double scale = c_k / (denom * std::pow(bandwidth, static_cast<double>(n_hat)));
    const double self_term = 1.0; // K(0) for both kernels

    density_field field;
    field.kernel = kernel;
    field.bandwidth = bandwidth;
    field.source = source;
    field.dimension = n_hat;
    field.values.resize(n);

    const auto& k = kernels::active();
    parallel_for(0, n, [&](std::size_t i) {
        thread_local std::vector<double> row;
        row.resize(n);
        d.copy_row(i, row);
        double sum = kernel == kde_kernel::gaussian ? k.gaussian_sum(row.data(), n, inv_h)
                                                    : k.biweight_sum(row.data(), n, inv_h);
        if (!include_self) sum -= self_term;
        field.values[i] = scale * sum;
    });

    field.validate();
    return field;
}

double mean_ball_density(const density_field& field, const distance_matrix& d,
                         std::size_t x, double r) {
    if (x >= d.size()) throw error("mean_ball_density: index out of range");
    if (r < 0.0) throw error("mean_ball_density: negative radius");
    const std::size_t n = d.size();

    std::vector<double> row(n), recip(n);
    d.copy_row(x, row);
    row[x] = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) recip[j] = 1.0 / field.values[j];

    const auto& k = kernels::active();
    const std::size_t count = k.count_leq(row.data(), n, r);
    if (count == 0) return field.values[x];
    const double recip_sum = k.sum_recip_leq(row.data(), recip.data(), n, r);
    return static_cast<double>(count) / recip_sum;
}

double default_bandwidth(const distance_matrix& d) {
    const std::size_t n = d.size();
    if (n < 2) throw error("default_bandwidth: need at least 2 points");
    const auto target = static_cast<std::size_t>(
        std::ceil(std::sqrt(static_cast<double>(n))));
    const std::size_t rank = std::min(target, n - 1); // 1-based order statistic

    std::vector<double> per_point(n);
    parallel_for(0, n, [&](std::size_t i) {
        thread_local std::vector<double> nn;
        nn.resize(n);
        d.copy_row(i, nn);
        nn[i] = std::numeric_limits<double>::infinity(); // push self past every neighbor
        std::nth_element(nn.begin(), nn.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                         nn.end());
        per_point[i] = nn[rank - 1];
    });

    double sum = 0.0;
    for (double v : per_point) sum += v;
    return sum / static_cast<double>(n);
}

} // namespace curvkit
