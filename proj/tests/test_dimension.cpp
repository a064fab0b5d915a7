#include "curvkit/common.hpp"
#include "curvkit/dimension.hpp"
#include "curvkit/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

using namespace curvkit;

namespace {

std::vector<std::string> g_warnings;
void capture_warning(const std::string& msg) {
    g_warnings.push_back(msg);
}

point_cloud random_square(std::size_t n, std::uint64_t seed) {
    rng gen(seed);
    point_cloud cloud;
    cloud.n_points = n;
    cloud.ambient_dim = 2;
    cloud.coordinates.resize(2 * n);
    for (auto& v : cloud.coordinates) v = gen.uniform();
    return cloud;
}

} // namespace

TEST_SUITE("dimension") {

TEST_CASE("per-point estimator: hand-evaluated neighbor distances") {
    const std::vector<double> T{1.0, 2.0, 3.0};
    const double expected = 2.0 / (std::log(3.0) + std::log(1.5)); // 1.3297...
    CHECK(levina_bickel_point(T, 3) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(levina_bickel_point(T, 3) == doctest::Approx(1.3297).epsilon(1e-4));
}

TEST_CASE("per-point estimator through the matrix path") {
    // point 0 sits at 0 with neighbors at 1, 2, 3 on a line
    point_cloud cloud;
    cloud.n_points = 4;
    cloud.ambient_dim = 1;
    cloud.coordinates = {0.0, 1.0, 2.0, 3.0};
    const auto d = pairwise_euclidean(cloud);
    std::vector<double> row(4);
    d.copy_row(0, row);
    const std::vector<double> T{row[1], row[2], row[3]};
    CHECK(levina_bickel_point(T, 3) ==
          doctest::Approx(2.0 / (std::log(3.0) + std::log(1.5))).epsilon(1e-12));
}

TEST_CASE("tied distances give an infinite per-point estimate") {
    const std::vector<double> T{2.0, 2.0, 2.0};
    CHECK(std::isinf(levina_bickel_point(T, 3)));
    const std::vector<double> zero{0.0, 1.0, 2.0};
    CHECK(std::isnan(levina_bickel_point(zero, 3)));
}

TEST_CASE("uniform square recovers dimension 2 (majority over repetitions)") {
    int votes_for_2 = 0;
    for (std::uint64_t rep = 0; rep < 3; ++rep) {
        const auto d = pairwise_euclidean(random_square(10000, 500 + rep));
        const auto est = levina_bickel(d, 20, 55);
        if (est.n_hat == 2) ++votes_for_2;
    }
    CHECK(votes_for_2 >= 2);
}

TEST_CASE("n_hat is invariant under metric doubling") {
    const auto d = pairwise_euclidean(random_square(400, 9));
    auto tri = d.lower_triangle();
    for (auto& v : tri) v *= 2.0;
    const auto doubled = distance_matrix::from_lower_triangle(400, std::move(tri));
    const auto a = levina_bickel(d, 5, 25);
    const auto b = levina_bickel(doubled, 5, 25);
    CHECK(a.n_hat == b.n_hat);
    for (std::size_t i = 0; i < a.per_k_means.size(); ++i)
        CHECK(a.per_k_means[i] == doctest::Approx(b.per_k_means[i]).epsilon(1e-12));
}

TEST_CASE("duplicate points are skipped with a warning") {
    const auto prev = set_warning_handler(&capture_warning);
    g_warnings.clear();
    point_cloud cloud = random_square(50, 3);
    // make point 1 an exact duplicate of point 0
    cloud.coordinates[2] = cloud.coordinates[0];
    cloud.coordinates[3] = cloud.coordinates[1];
    const auto d = pairwise_euclidean(cloud);
    const auto est = levina_bickel(d, 3, 10);
    set_warning_handler(prev);
    CHECK(est.n_hat >= 1);
    bool saw_skip = false;
    for (const auto& w : g_warnings)
        if (w.find("zero nearest-neighbor") != std::string::npos) saw_skip = true;
    CHECK(saw_skip);
}

TEST_CASE("parameter validation and k2 sub-ranges") {
    const auto d = pairwise_euclidean(random_square(30, 4));
    CHECK_THROWS_AS(levina_bickel(d, 1, 10), error);
    CHECK_THROWS_AS(levina_bickel(d, 5, 30), error);
    CHECK_THROWS_AS(levina_bickel(d, 10, 5), error);

    const auto est = levina_bickel(d, 5, 20);
    REQUIRE(est.per_k_means.size() == 16);
    CHECK(est.n_hat_for_range(20) == est.n_hat);
    CHECK_THROWS_AS(est.n_hat_for_range(21), error);
    CHECK_THROWS_AS(est.n_hat_for_range(4), error);
    // a sub-range mean equals the mean of its per-k values
    double sum = 0.0;
    for (std::size_t k = 5; k <= 10; ++k) sum += est.per_k_means[k - 5];
    CHECK(est.n_hat_for_range(10) ==
          static_cast<std::size_t>(std::llround(sum / 6.0)));
}

} // TEST_SUITE
