#include "curvkit/common.hpp"
#include "curvkit/rng.hpp"
#include "curvkit/samplers.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <functional>

using namespace curvkit;

namespace {

// ---- numerical differential-geometry oracle -----------------------------
// Gaussian curvature of a parametric surface from central finite differences
// of the embedding, evaluated in long double so the 1e-8 comparison against
// the closed forms is meaningful.

using surface_fn = std::function<std::array<long double, 3>(long double, long double)>;

std::array<long double, 3> sub(const std::array<long double, 3>& a,
                               const std::array<long double, 3>& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

std::array<long double, 3> scale(const std::array<long double, 3>& a, long double s) {
    return {a[0] * s, a[1] * s, a[2] * s};
}

long double dot(const std::array<long double, 3>& a, const std::array<long double, 3>& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

std::array<long double, 3> cross(const std::array<long double, 3>& a,
                                 const std::array<long double, 3>& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double numeric_gaussian_curvature(const surface_fn& f, long double u, long double v) {
    const long double h = 1e-4L;
    const auto fu = scale(sub(f(u + h, v), f(u - h, v)), 0.5L / h);
    const auto fv = scale(sub(f(u, v + h), f(u, v - h)), 0.5L / h);
    const auto center = f(u, v);
    const auto fuu = scale(sub(sub(f(u + h, v), scale(center, 2.0L)), scale(f(u - h, v), -1.0L)),
                           1.0L / (h * h));
    const auto fvv = scale(sub(sub(f(u, v + h), scale(center, 2.0L)), scale(f(u, v - h), -1.0L)),
                           1.0L / (h * h));
    const auto fuv = scale(sub(sub(f(u + h, v + h), f(u + h, v - h)),
                               sub(f(u - h, v + h), f(u - h, v - h))),
                           0.25L / (h * h));

    const long double E = dot(fu, fu), F = dot(fu, fv), G = dot(fv, fv);
    auto n = cross(fu, fv);
    const long double n_norm = std::sqrt(dot(n, n));
    n = scale(n, 1.0L / n_norm);
    const long double e = dot(n, fuu), ff = dot(n, fuv), g = dot(n, fvv);
    return static_cast<double>((e * g - ff * ff) / (E * G - F * F));
}

std::array<long double, 3> hyperboloid_embedding(long double u, long double theta) {
    const long double ring = 2.0L * std::sqrt(1.0L + u * u);
    return {ring * std::cos(theta), ring * std::sin(theta), u};
}

std::array<long double, 3> torus_embedding(long double theta, long double phi) {
    const long double ring = 2.0L + std::cos(theta);
    return {ring * std::cos(phi), ring * std::sin(phi), std::sin(theta)};
}

} // namespace

TEST_SUITE("manifold_samplers") {

TEST_CASE("samplers are deterministic given a seed") {
    const auto a = sample_sphere(2, 50, 9);
    const auto b = sample_sphere(2, 50, 9);
    CHECK(a.cloud.coordinates == b.cloud.coordinates);
    const auto t1 = sample_torus(50, 3);
    const auto t2 = sample_torus(50, 3);
    CHECK(t1.cloud.coordinates == t2.cloud.coordinates);
}

TEST_CASE("sphere: curvature labels, density, geodesics") {
    const auto s = sample_sphere(2, 200, 1);
    for (double v : s.true_curvature) CHECK(v == 2.0);
    for (double v : s.true_density) CHECK(v == doctest::Approx(1.0 / (4.0 * M_PI)));

    // antipodal pair
    const double north[3] = {0.0, 0.0, 1.0};
    const double south[3] = {0.0, 0.0, -1.0};
    CHECK(sphere_geodesic(north, south, 3) == doctest::Approx(M_PI));

    // points live on the sphere and distances are bounded by pi
    for (std::size_t i = 0; i < s.size(); ++i) {
        double norm2 = 0.0;
        for (std::size_t k = 0; k < 3; ++k) norm2 += s.cloud.point(i)[k] * s.cloud.point(i)[k];
        REQUIRE(norm2 == doctest::Approx(1.0).epsilon(1e-12));
    }
    const auto& d = *s.exact_distances;
    for (std::size_t i = 1; i < s.size(); ++i)
        for (std::size_t j = 0; j < i; ++j) REQUIRE(d(i, j) <= M_PI + 1e-12);
    d.check_triangle_sampled(20000, 2);
}

TEST_CASE("sphere distances match a recomputation from coordinates") {
    const auto s = sample_sphere(3, 120, 5);
    const auto& d = *s.exact_distances;
    for (std::size_t i = 1; i < s.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            REQUIRE(d(i, j) ==
                    doctest::Approx(sphere_geodesic(s.cloud.point(i), s.cloud.point(j), 4))
                        .epsilon(1e-12));
}

TEST_CASE("sphere sampler is symmetric: Monte-Carlo first-coordinate mean") {
    // 1e5 draws accumulated across batches; each batch is a real sampler call
    double sum = 0.0, sum_sq = 0.0;
    std::size_t total = 0;
    for (std::uint64_t batch = 0; batch < 50; ++batch) {
        const auto s = sample_sphere(3, 2000, 400 + batch);
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double x1 = s.cloud.point(i)[0];
            sum += x1;
            sum_sq += x1 * x1;
            ++total;
        }
    }
    const double mean = sum / static_cast<double>(total);
    const double var = sum_sq / static_cast<double>(total) - mean * mean;
    const double stderr_mean = std::sqrt(var / static_cast<double>(total));
    CHECK(std::abs(mean) <= 3.0 * stderr_mean);
}

TEST_CASE("euclidean disk: labels, mask geometry, area fraction") {
    const auto s = sample_euclidean_disk(4000, 21);
    for (double v : s.true_curvature) CHECK(v == 0.0);

    for (std::size_t idx : s.evaluation_mask.indices) {
        const double* p = s.cloud.point(idx);
        REQUIRE(p[0] * p[0] + p[1] * p[1] <= 1.0 + 1e-12);
    }
    // all points fall inside radius 2
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double* p = s.cloud.point(i);
        REQUIRE(p[0] * p[0] + p[1] * p[1] <= 4.0 + 1e-12);
    }

    // area ratio: P(|x| <= 1) = 1/4, binomial 3-sigma band
    const double frac = static_cast<double>(s.evaluation_mask.size()) / 4000.0;
    const double sigma = std::sqrt(0.25 * 0.75 / 4000.0);
    CHECK(std::abs(frac - 0.25) <= 3.0 * sigma);

    // exact distances are Euclidean
    point_cloud two;
    two.n_points = 2;
    two.ambient_dim = 2;
    two.coordinates = {0.0, 0.0, 2.0, 0.0};
    CHECK(pairwise_euclidean(two)(0, 1) == 2.0);
}

TEST_CASE("poincare disk: labels, closed-form distance, metric axioms") {
    const auto s = sample_poincare_disk(300, 33);
    CHECK(!s.embeddable);
    for (double v : s.true_curvature) CHECK(v == -2.0);

    const double origin[2] = {0.0, 0.0};
    const double half[2] = {0.5, 0.0};
    CHECK(poincare_geodesic(origin, half) == doctest::Approx(std::log(3.0)).epsilon(1e-12));

    const auto& d = *s.exact_distances;
    rng gen(12);
    for (int t = 0; t < 500; ++t) {
        const auto i = static_cast<std::size_t>(gen.below(300));
        const auto j = static_cast<std::size_t>(gen.below(300));
        REQUIRE(d(i, j) == d(j, i));
        REQUIRE(d(i, i) == 0.0);
        REQUIRE(d(i, j) ==
                doctest::Approx(poincare_geodesic(s.cloud.point(i), s.cloud.point(j)))
                    .epsilon(1e-12));
    }
    d.check_triangle_sampled(5000, 3);

    // mask: hyperbolic radius <= 1 means model radius <= tanh(1/2)
    for (std::size_t idx : s.evaluation_mask.indices) {
        const double* p = s.cloud.point(idx);
        REQUIRE(std::sqrt(p[0] * p[0] + p[1] * p[1]) <= std::tanh(0.5) + 1e-12);
    }

    // all samples stay within hyperbolic radius 2
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double* p = s.cloud.point(i);
        REQUIRE(std::sqrt(p[0] * p[0] + p[1] * p[1]) <= std::tanh(1.0) + 1e-12);
    }
}

TEST_CASE("torus: closed-form curvature and embedding consistency") {
    CHECK(torus_scalar_curvature(0.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(torus_scalar_curvature(M_PI) == doctest::Approx(-2.0).epsilon(1e-12));

    // independent oracle: S = 2K with K from finite differences of the embedding
    for (double theta : {0.0, 0.9, M_PI / 2 + 0.2, M_PI, 4.5}) {
        const double k_num = numeric_gaussian_curvature(torus_embedding, theta, 0.7);
        CHECK(torus_scalar_curvature(theta) == doctest::Approx(2.0 * k_num).epsilon(1e-7));
    }

    const auto s = sample_torus(2000, 17);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double* p = s.cloud.point(i);
        // recover theta from the embedding and cross-check the stored label
        const double ring = std::sqrt(p[0] * p[0] + p[1] * p[1]);
        const double cos_theta = ring - 2.0;
        const double recomputed = 2.0 * cos_theta / (2.0 + cos_theta);
        REQUIRE(s.true_curvature[i] == doctest::Approx(recomputed).epsilon(1e-9));
        // sign pattern: negative exactly on the inner half
        if (std::abs(cos_theta) > 1e-9)
            REQUIRE((s.true_curvature[i] < 0.0) == (cos_theta < 0.0));
    }
}

TEST_CASE("torus tube angle follows the area density (chi-squared, 1% level)") {
    const std::size_t n = 100000;
    const auto s = sample_torus(n, 55);
    constexpr int bins = 36;
    std::array<double, bins> observed{};
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double* p = s.cloud.point(i);
        const double cos_theta = std::sqrt(p[0] * p[0] + p[1] * p[1]) - 2.0;
        const double theta = std::atan2(p[2], cos_theta); // r = 1
        const double wrapped = theta < 0.0 ? theta + 2.0 * M_PI : theta;
        ++observed[static_cast<int>(wrapped / (2.0 * M_PI / bins)) % bins];
    }
    double chi2 = 0.0;
    for (int b = 0; b < bins; ++b) {
        const double lo = 2.0 * M_PI * b / bins;
        const double hi = 2.0 * M_PI * (b + 1) / bins;
        // integral of (2 + cos t)/(4 pi) over the bin
        const double expected =
            n * ((2.0 * (hi - lo) + std::sin(hi) - std::sin(lo)) / (4.0 * M_PI));
        chi2 += (observed[b] - expected) * (observed[b] - expected) / expected;
    }
    CHECK(chi2 < 57.342); // chi-squared 99th percentile, 35 dof
}

TEST_CASE("hyperboloid: mask, curvature signs, numeric oracle at z=0") {
    const auto s = sample_hyperboloid(3000, 77);
    CHECK(s.evaluation_mask.size() == 3000);
    for (std::size_t idx : s.evaluation_mask.indices)
        REQUIRE(std::abs(s.cloud.point(idx)[2]) <= 1.0);
    for (std::size_t i = 0; i < s.size(); ++i) {
        REQUIRE(std::abs(s.cloud.point(i)[2]) <= 2.0);
        REQUIRE(s.true_curvature[i] < 0.0);
        REQUIRE(std::abs(s.true_curvature[i]) <= 2.0 + 1e-12); // |S| peaks at z = 0
        // points satisfy x^2/4 + y^2/4 - z^2 = 1
        const double* p = s.cloud.point(i);
        REQUIRE(p[0] * p[0] / 4.0 + p[1] * p[1] / 4.0 - p[2] * p[2] ==
                doctest::Approx(1.0).epsilon(1e-9));
    }

    const double k0 = numeric_gaussian_curvature(hyperboloid_embedding, 0.0, 1.3);
    CHECK(std::abs(k0 - (-1.0)) <= 1e-8);
    CHECK(hyperboloid_scalar_curvature(0.0) == doctest::Approx(2.0 * k0).epsilon(1e-8));
    for (double z : {0.3, 0.8, 1.4}) {
        const double k_num = numeric_gaussian_curvature(hyperboloid_embedding, z, 0.4);
        CHECK(hyperboloid_scalar_curvature(z) == doctest::Approx(2.0 * k_num).epsilon(1e-6));
    }
}

TEST_CASE("noise: exact at sigma=0, matched std, errors on poincare") {
    const auto clean = sample_sphere(2, 500, 4);
    const auto zero = add_noise(clean, {0.0, 9});
    CHECK(zero.cloud.coordinates == clean.cloud.coordinates);
    CHECK(!zero.exact_distances.has_value());
    CHECK(zero.true_curvature == clean.true_curvature);

    const double sigma = 0.01;
    const auto big = sample_sphere(2, 10000, 6);
    const auto noisy = add_noise(big, {sigma, 10});
    double sum_sq = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < noisy.cloud.coordinates.size(); ++i) {
        const double delta = noisy.cloud.coordinates[i] - big.cloud.coordinates[i];
        sum_sq += delta * delta;
        ++count;
    }
    const double sd = std::sqrt(sum_sq / static_cast<double>(count));
    CHECK(std::abs(sd - sigma) <= 0.05 * sigma);

    const auto poincare = sample_poincare_disk(50, 2);
    CHECK_THROWS_AS(add_noise(poincare, {0.01, 3}), error);
}

TEST_CASE("sample_manifold dispatch") {
    CHECK(sample_manifold("sphere5", 10, 1).cloud.ambient_dim == 6);
    CHECK(sample_manifold("disk", 10, 1).manifold_tag == "disk");
    CHECK_THROWS_AS(sample_manifold("klein", 10, 1), error);
}

} // TEST_SUITE
