#include "curvkit/dimension.hpp"

#include "curvkit/common.hpp"
#include "curvkit/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

namespace curvkit {

std::size_t dimension_estimate::n_hat_for_range(std::size_t k2_sub) const {
    if (k2_sub < k1 || k2_sub > k2) throw error("dimension_estimate: k2 out of range");
    double sum = 0.0;
    for (std::size_t k = k1; k <= k2_sub; ++k) sum += per_k_means[k - k1];
    const double mean = sum / static_cast<double>(k2_sub - k1 + 1);
    return static_cast<std::size_t>(std::llround(mean));
}

double levina_bickel_point(std::span<const double> sorted_T, std::size_t k) {
    const double tk = sorted_T[k - 1];
    double log_sum = 0.0;
    for (std::size_t j = 0; j + 1 < k; ++j) {
        if (sorted_T[j] <= 0.0) return std::numeric_limits<double>::quiet_NaN();
        log_sum += std::log(tk / sorted_T[j]);
    }
    if (log_sum == 0.0) return std::numeric_limits<double>::infinity();
    return static_cast<double>(k - 1) / log_sum;
}

dimension_estimate levina_bickel(const distance_matrix& d, std::size_t k1, std::size_t k2) {
    const std::size_t n = d.size();
    if (k1 < 2 || k1 > k2 || k2 > n - 1)
        throw error("levina_bickel: need 2 <= k1 <= k2 <= N-1");

    const std::size_t n_k = k2 - k1 + 1;
    // per-point estimates for every k in [k1, k2]; NaN marks exclusions
    std::vector<double> per_point(n * n_k);
    std::atomic<std::size_t> skipped_zero{0};
    std::atomic<std::size_t> skipped_tied{0};

    parallel_for(0, n, [&](std::size_t i) {
        thread_local std::vector<double> row, nn;
        row.resize(n);
        d.copy_row(i, row);
        nn.clear();
        nn.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) nn.push_back(row[j]);
        std::nth_element(nn.begin(), nn.begin() + static_cast<std::ptrdiff_t>(k2 - 1), nn.end());
        std::sort(nn.begin(), nn.begin() + static_cast<std::ptrdiff_t>(k2));

        double* out = per_point.data() + i * n_k;
        if (nn[k2 - 1] <= 0.0) { // duplicates all the way out: skip the point
            for (std::size_t k = k1; k <= k2; ++k)
                out[k - k1] = std::numeric_limits<double>::quiet_NaN();
            skipped_zero.fetch_add(1);
            return;
        }

        // prefix sums of log T_j make every k an O(1) lookup
        thread_local std::vector<double> log_prefix;
        log_prefix.resize(k2 + 1);
        log_prefix[0] = 0.0;
        bool has_zero = false;
        for (std::size_t j = 0; j < k2; ++j) {
            if (nn[j] <= 0.0) {
                has_zero = true;
                break;
            }
            log_prefix[j + 1] = log_prefix[j] + std::log(nn[j]);
        }
        if (has_zero) {
            for (std::size_t k = k1; k <= k2; ++k)
                out[k - k1] = std::numeric_limits<double>::quiet_NaN();
            skipped_zero.fetch_add(1);
            return;
        }

        for (std::size_t k = k1; k <= k2; ++k) {
            const double denom =
                static_cast<double>(k - 1) * std::log(nn[k - 1]) - log_prefix[k - 1];
            if (denom <= 0.0) {
                out[k - k1] = std::numeric_limits<double>::quiet_NaN();
                skipped_tied.fetch_add(1);
            } else {
                out[k - k1] = static_cast<double>(k - 1) / denom;
            }
        }
    });

    if (skipped_zero.load() > 0)
        warn("levina_bickel: skipped " + std::to_string(skipped_zero.load()) +
             " point(s) with zero nearest-neighbor distances");
    if (skipped_tied.load() > 0)
        warn("levina_bickel: excluded " + std::to_string(skipped_tied.load()) +
             " tied-distance estimate(s)");

    dimension_estimate est;
    est.k1 = k1;
    est.k2 = k2;
    est.per_k_means.resize(n_k);
    for (std::size_t kk = 0; kk < n_k; ++kk) {
        double sum = 0.0;
        std::size_t valid = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = per_point[i * n_k + kk];
            if (std::isfinite(v)) {
                sum += v;
                ++valid;
            }
        }
        if (valid == 0) throw error("levina_bickel: no valid points at k=" +
                                    std::to_string(k1 + kk));
        est.per_k_means[kk] = sum / static_cast<double>(valid);
    }
    est.n_hat = est.n_hat_for_range(k2);
    if (est.n_hat < 1) est.n_hat = 1;
    return est;
}

} // namespace curvkit
