#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace curvkit {

/// Symmetric N x N nonnegative distance matrix stored as a row-major lower
/// triangle (entry (i,j) with j < i at offset i*(i-1)/2 + j). The diagonal
/// is implicitly zero. Immutable after construction; concurrent reads from
/// any number of workers are safe.
class distance_matrix {
public:
    /// Zero matrix on n points (n >= 1).
    explicit distance_matrix(std::size_t n);

    /// Takes ownership of a prebuilt lower triangle. Validates length,
    /// nonnegativity, and finiteness; warns once if any off-diagonal entry
    /// is zero (duplicate points).
    static distance_matrix from_lower_triangle(std::size_t n, std::vector<double> entries);

    std::size_t size() const { return n_; }

    double operator()(std::size_t i, std::size_t j) const {
        if (i == j) return 0.0;
        return i > j ? entries_[tri_index(i, j)] : entries_[tri_index(j, i)];
    }

    /// Writes distances from point i to all points (including d(i,i)=0)
    /// into out, which must have length size().
    void copy_row(std::size_t i, std::span<double> out) const;

    const std::vector<double>& lower_triangle() const { return entries_; }
    std::vector<double>& mutable_lower_triangle() { return entries_; }

    double max_entry() const;

    /// Triangle inequality spot-check on n_triples random triples
    /// (d(i,k) <= d(i,j) + d(j,k) up to float associativity slack).
    /// Throws on violation.
    void check_triangle_sampled(std::size_t n_triples, std::uint64_t seed,
                                double rel_tol = 1e-12) const;

    static std::size_t tri_index(std::size_t i, std::size_t j) {
        return i * (i - 1) / 2 + j;
    }

private:
    std::size_t n_;
    std::vector<double> entries_;
};

/// N points in an ambient Euclidean space, row-major.
struct point_cloud {
    std::size_t n_points = 0;
    std::size_t ambient_dim = 0;
    std::vector<double> coordinates; // n_points * ambient_dim

    const double* point(std::size_t i) const { return coordinates.data() + i * ambient_dim; }
    double* point(std::size_t i) { return coordinates.data() + i * ambient_dim; }

    /// Throws unless all coordinates are finite and ambient_dim >= 1.
    void validate() const;
};

/// Subset of {0..N-1} at which curvature is estimated.
struct evaluation_set {
    std::vector<std::size_t> indices;

    static evaluation_set all(std::size_t n);

    /// Throws unless indices are distinct and < n.
    void validate(std::size_t n) const;
    bool empty() const { return indices.empty(); }
    std::size_t size() const { return indices.size(); }
};

/// d(i,j) = Euclidean norm of the coordinate difference.
distance_matrix pairwise_euclidean(const point_cloud& cloud);

/// N(x,r) = |{ y != x : d(x,y) <= r }| (closed ball).
std::size_t ball_count(const distance_matrix& d, std::size_t x, double r);

} // namespace curvkit
