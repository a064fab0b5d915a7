#include "curvkit/common.hpp"
#include "curvkit/density.hpp"
#include "curvkit/rng.hpp"
#include "curvkit/samplers.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace curvkit;

namespace {

distance_matrix from_row_of_three(double d01, double d02, double d12) {
    std::vector<double> tri(3);
    tri[distance_matrix::tri_index(1, 0)] = d01;
    tri[distance_matrix::tri_index(2, 0)] = d02;
    tri[distance_matrix::tri_index(2, 1)] = d12;
    return distance_matrix::from_lower_triangle(3, tri);
}

// Simpson quadrature over [a, b]
double simpson(double (*f)(double), double a, double b, int intervals) {
    const double h = (b - a) / intervals;
    double sum = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

double biweight_1d(double u) {
    const double t = 1.0 - u * u;
    return t * t;
}

} // namespace

TEST_SUITE("density") {

TEST_CASE("single point: gaussian KDE reduces to the self-term") {
    const distance_matrix d(1);
    for (std::size_t n_hat : {std::size_t{1}, std::size_t{2}, std::size_t{3}}) {
        for (double h : {0.3, 1.0, 2.5}) {
            const auto field = kde_density(d, n_hat, kde_kernel::gaussian, h);
            const double expected = std::pow(2.0 * M_PI, -0.5 * static_cast<double>(n_hat)) /
                                    std::pow(h, static_cast<double>(n_hat));
            CHECK(field.values[0] == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("biweight normalizer: quadrature oracle in one dimension") {
    // c_K * integral_{-1}^{1} (1-u^2)^2 du must be 1; the integral is 16/15
    const double integral = simpson(&biweight_1d, -1.0, 1.0, 2000);
    CHECK(integral == doctest::Approx(16.0 / 15.0).epsilon(1e-10));
    CHECK(biweight_normalizer(1) * integral == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(biweight_normalizer(1) == doctest::Approx(15.0 / 16.0).epsilon(1e-12));
    CHECK(gaussian_normalizer(2) == doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-14));
}

TEST_CASE("biweight normalizer integrates to one over the n-ball (radial oracle)") {
    // n v_n c_K int_0^1 u^(n-1)(1-u^2)^2 du = 1 for each n
    for (std::size_t n : {std::size_t{2}, std::size_t{3}, std::size_t{5}}) {
        const int steps = 20000;
        double radial = 0.0;
        for (int i = 0; i < steps; ++i) {
            const double u = (i + 0.5) / steps;
            radial += std::pow(u, static_cast<double>(n - 1)) * biweight_1d(u) / steps;
        }
        const double nd = static_cast<double>(n);
        const double v_n = std::exp(0.5 * nd * std::log(M_PI) - std::lgamma(0.5 * nd + 1.0));
        CHECK(nd * v_n * biweight_normalizer(n) * radial == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("uniform sphere KDE: mean density near 1/(4 pi) with the default bandwidth") {
    const auto sample = sample_sphere(2, 4000, 31);
    const auto& d = *sample.exact_distances;
    const double h = default_bandwidth(d);
    CHECK(h > 0.0);
    for (auto kernel : {kde_kernel::gaussian, kde_kernel::biweight}) {
        const auto field = kde_density(d, 2, kernel, h);
        double mean = 0.0;
        for (double v : field.values) mean += v;
        mean /= static_cast<double>(field.values.size());
        const double truth = 1.0 / (4.0 * M_PI);
        CHECK(std::abs(mean - truth) <= 0.10 * truth);
    }
}

TEST_CASE("KDE values are invariant under point relabeling") {
    rng gen(77);
    point_cloud cloud;
    cloud.n_points = 80;
    cloud.ambient_dim = 2;
    cloud.coordinates.resize(160);
    for (auto& v : cloud.coordinates) v = gen.uniform();
    const auto d = pairwise_euclidean(cloud);
    const auto field = kde_density(d, 2, kde_kernel::gaussian, 0.2);

    // reverse the labels
    point_cloud reversed = cloud;
    for (std::size_t i = 0; i < 80; ++i) {
        reversed.coordinates[2 * i] = cloud.coordinates[2 * (79 - i)];
        reversed.coordinates[2 * i + 1] = cloud.coordinates[2 * (79 - i) + 1];
    }
    const auto field_rev = kde_density(pairwise_euclidean(reversed), 2, kde_kernel::gaussian, 0.2);
    for (std::size_t i = 0; i < 80; ++i)
        REQUIRE(field.values[i] == doctest::Approx(field_rev.values[79 - i]).epsilon(1e-12));
}

TEST_CASE("KDE parameter validation") {
    const distance_matrix d(1);
    CHECK_THROWS_AS(kde_density(d, 2, kde_kernel::gaussian, 0.0), error);
    CHECK_THROWS_AS(kde_density(d, 0, kde_kernel::gaussian, 1.0), error);
}

TEST_CASE("mean ball density: harmonic mean, empty ball, constant field") {
    const auto d = from_row_of_three(0.1, 0.2, 0.15);
    density_field field;
    field.values = {5.0, 1.0, 3.0};
    field.dimension = 2;
    CHECK(mean_ball_density(field, d, 0, 0.5) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(mean_ball_density(field, d, 0, 0.01) == 5.0); // empty ball falls back to rho(x)

    density_field constant;
    constant.values = {2.5, 2.5, 2.5};
    constant.dimension = 2;
    CHECK(mean_ball_density(constant, d, 1, 0.5) == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("harmonic mean never exceeds the arithmetic mean of in-ball densities") {
    rng gen(91);
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 10 + gen.below(40);
        point_cloud cloud;
        cloud.n_points = n;
        cloud.ambient_dim = 2;
        cloud.coordinates.resize(2 * n);
        for (auto& v : cloud.coordinates) v = gen.uniform();
        const auto d = pairwise_euclidean(cloud);
        density_field field;
        field.dimension = 2;
        field.values.resize(n);
        for (auto& v : field.values) v = 0.2 + gen.uniform();

        const auto x = static_cast<std::size_t>(gen.below(n));
        const double r = gen.uniform(0.1, 1.0);
        std::vector<double> in_ball;
        for (std::size_t j = 0; j < n; ++j)
            if (j != x && d(x, j) <= r) in_ball.push_back(field.values[j]);
        if (in_ball.empty()) continue;
        double arith = 0.0;
        for (double v : in_ball) arith += v;
        arith /= static_cast<double>(in_ball.size());
        REQUIRE(mean_ball_density(field, d, x, r) <= arith + 1e-12);
    }
}

TEST_CASE("mean reciprocal density is unbiased for 1/rho_bar (nonuniform 1D, Monte Carlo)") {
    // pdf rho(t) = (1+t)/1.5 on [0,1]; inverse CDF t = sqrt(1+3u) - 1.
    // At x = 0.5, r = 0.3 the ball is [0.2, 0.8] and rho_bar works out to 1.
    const std::size_t n = 200;
    const std::size_t resamples = 2000;
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t t = 0; t < resamples; ++t) {
        rng gen(4000 + t);
        point_cloud cloud;
        cloud.n_points = n;
        cloud.ambient_dim = 1;
        cloud.coordinates.resize(n);
        cloud.coordinates[0] = 0.5; // fixed center
        for (std::size_t i = 1; i < n; ++i)
            cloud.coordinates[i] = std::sqrt(1.0 + 3.0 * gen.uniform()) - 1.0;
        const auto d = pairwise_euclidean(cloud);
        density_field truth;
        truth.dimension = 1;
        truth.values.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            truth.values[i] = (1.0 + cloud.coordinates[i]) / 1.5;
        const double recip = 1.0 / mean_ball_density(truth, d, 0, 0.3);
        sum += recip;
        sum_sq += recip * recip;
    }
    const double mean = sum / static_cast<double>(resamples);
    const double var =
        (sum_sq - sum * sum / static_cast<double>(resamples)) / static_cast<double>(resamples - 1);
    const double stderr_mean = std::sqrt(var / static_cast<double>(resamples));
    CHECK(std::abs(mean - 1.0) <= 3.0 * stderr_mean);
}

TEST_CASE("uniform density injection makes the reciprocal estimate exact") {
    const auto sample = sample_sphere(2, 300, 13);
    density_field truth;
    truth.dimension = 2;
    truth.values.assign(300, 1.0 / (4.0 * M_PI));
    const double rho_bar = mean_ball_density(truth, *sample.exact_distances, 0, 0.5);
    CHECK(rho_bar == doctest::Approx(1.0 / (4.0 * M_PI)).epsilon(1e-12));
}

TEST_CASE("default bandwidth: two points and a 1D grid oracle") {
    point_cloud two;
    two.n_points = 2;
    two.ambient_dim = 1;
    two.coordinates = {0.0, 1.0};
    CHECK(default_bandwidth(pairwise_euclidean(two)) == 1.0);

    // 100-point grid with spacing s: direct recomputation of the rule
    const double s = 0.25;
    point_cloud grid;
    grid.n_points = 100;
    grid.ambient_dim = 1;
    grid.coordinates.resize(100);
    for (std::size_t i = 0; i < 100; ++i) grid.coordinates[i] = s * static_cast<double>(i);
    const auto d = pairwise_euclidean(grid);
    const double h = default_bandwidth(d);

    double expected = 0.0;
    for (std::size_t i = 0; i < 100; ++i) {
        std::vector<double> dists;
        for (std::size_t j = 0; j < 100; ++j)
            if (j != i) dists.push_back(std::abs(grid.coordinates[i] - grid.coordinates[j]));
        std::sort(dists.begin(), dists.end());
        expected += dists[9]; // ceil(sqrt(100)) = 10th nearest neighbor
    }
    expected /= 100.0;
    CHECK(h == doctest::Approx(expected).epsilon(1e-12));
    CHECK(h > 0.0);
    // interior points see the 10th neighbor at 5s, boundary points farther out
    CHECK(h >= 5.0 * s);
    CHECK(h <= 10.0 * s);
}

} // TEST_SUITE
