#include "curvkit/distance_matrix.hpp"

#include "curvkit/common.hpp"
#include "curvkit/kernels.hpp"
#include "curvkit/parallel.hpp"
#include "curvkit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace curvkit {

distance_matrix::distance_matrix(std::size_t n) : n_(n) {
    if (n == 0) throw error("distance_matrix: need at least one point");
    entries_.assign(n * (n - 1) / 2, 0.0);
}

distance_matrix distance_matrix::from_lower_triangle(std::size_t n, std::vector<double> entries) {
    if (n == 0) throw error("distance_matrix: need at least one point");
    if (entries.size() != n * (n - 1) / 2)
        throw error("distance_matrix: lower triangle has " + std::to_string(entries.size()) +
                    " entries, expected " + std::to_string(n * (n - 1) / 2));
    std::size_t zeros = 0;
    for (double v : entries) {
        if (!std::isfinite(v)) throw error("distance_matrix: non-finite entry");
        if (v < 0.0) throw error("distance_matrix: negative entry " + std::to_string(v));
        if (v == 0.0) ++zeros;
    }
    if (zeros > 0)
        warn(std::to_string(zeros) + " zero off-diagonal distance(s): duplicate points");
    distance_matrix m(n);
    m.entries_ = std::move(entries);
    return m;
}

void distance_matrix::copy_row(std::size_t i, std::span<double> out) const {
    for (std::size_t j = 0; j < i; ++j) out[j] = entries_[tri_index(i, j)];
    out[i] = 0.0;
    for (std::size_t j = i + 1; j < n_; ++j) out[j] = entries_[tri_index(j, i)];
}

double distance_matrix::max_entry() const {
    double best = 0.0;
    for (double v : entries_) best = std::max(best, v);
    return best;
}

void distance_matrix::check_triangle_sampled(std::size_t n_triples, std::uint64_t seed,
                                             double rel_tol) const {
    if (n_ < 3) return;
    rng gen(seed);
    const double slack = rel_tol * std::max(1.0, max_entry());
    for (std::size_t t = 0; t < n_triples; ++t) {
        const auto i = static_cast<std::size_t>(gen.below(n_));
        const auto j = static_cast<std::size_t>(gen.below(n_));
        const auto k = static_cast<std::size_t>(gen.below(n_));
        const double lhs = (*this)(i, k);
        const double rhs = (*this)(i, j) + (*this)(j, k);
        if (lhs > rhs + slack)
            throw error("triangle inequality violated: d(" + std::to_string(i) + "," +
                        std::to_string(k) + ")=" + std::to_string(lhs) + " > " +
                        std::to_string(rhs));
    }
}

void point_cloud::validate() const {
    if (ambient_dim < 1) throw error("point_cloud: ambient_dim must be >= 1");
    if (coordinates.size() != n_points * ambient_dim)
        throw error("point_cloud: coordinate buffer size mismatch");
    for (double v : coordinates)
        if (!std::isfinite(v)) throw error("point_cloud: non-finite coordinate");
}

evaluation_set evaluation_set::all(std::size_t n) {
    evaluation_set s;
    s.indices.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.indices[i] = i;
    return s;
}

void evaluation_set::validate(std::size_t n) const {
    std::vector<bool> seen(n, false);
    for (std::size_t idx : indices) {
        if (idx >= n) throw error("evaluation_set: index " + std::to_string(idx) + " out of range");
        if (seen[idx]) throw error("evaluation_set: duplicate index " + std::to_string(idx));
        seen[idx] = true;
    }
}

distance_matrix pairwise_euclidean(const point_cloud& cloud) {
    cloud.validate();
    if (cloud.n_points == 0) throw error("pairwise_euclidean: empty cloud");
    distance_matrix m(cloud.n_points);
    auto& tri = m.mutable_lower_triangle();
    const std::size_t dim = cloud.ambient_dim;
    parallel_for(1, cloud.n_points, [&](std::size_t i) {
        const double* pi = cloud.point(i);
        double* row = tri.data() + distance_matrix::tri_index(i, 0);
        for (std::size_t j = 0; j < i; ++j) {
            const double* pj = cloud.point(j);
            double s = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                const double diff = pi[k] - pj[k];
                s += diff * diff;
            }
            row[j] = std::sqrt(s);
        }
    });
    return m;
}

std::size_t ball_count(const distance_matrix& d, std::size_t x, double r) {
    if (x >= d.size()) throw error("ball_count: index out of range");
    if (r < 0.0) throw error("ball_count: negative radius");
    std::vector<double> row(d.size());
    d.copy_row(x, row);
    row[x] = std::numeric_limits<double>::infinity(); // exclude the center
    return kernels::active().count_leq(row.data(), row.size(), r);
}

} // namespace curvkit
