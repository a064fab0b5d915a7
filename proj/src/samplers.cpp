#include "curvkit/samplers.hpp"

#include "curvkit/common.hpp"
#include "curvkit/parallel.hpp"
#include "curvkit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace curvkit {

namespace {

constexpr double TORUS_TUBE_RADIUS = 1.0;
constexpr double TORUS_CENTER_RADIUS = 2.0;
constexpr double DISK_RADIUS = 2.0;
constexpr double HYPERBOLIC_RADIUS = 2.0;

distance_matrix exact_matrix(const point_cloud& cloud,
                             double (*metric)(const double*, const double*, std::size_t)) {
    distance_matrix m(cloud.n_points);
    auto& tri = m.mutable_lower_triangle();
    parallel_for(1, cloud.n_points, [&](std::size_t i) {
        double* row = tri.data() + distance_matrix::tri_index(i, 0);
        for (std::size_t j = 0; j < i; ++j)
            row[j] = metric(cloud.point(i), cloud.point(j), cloud.ambient_dim);
    });
    return m;
}

double poincare_metric_adapter(const double* u, const double* v, std::size_t) {
    return poincare_geodesic(u, v);
}

} // namespace

void labeled_sample::validate() const {
    const std::size_t n = true_curvature.size();
    if (true_density.size() != n) throw error("labeled_sample: label size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(true_curvature[i])) throw error("labeled_sample: non-finite curvature");
        if (!(true_density[i] > 0.0)) throw error("labeled_sample: non-positive density");
    }
    if (cloud.n_points > 0 && cloud.n_points != n)
        throw error("labeled_sample: cloud size mismatch");
    if (exact_distances && exact_distances->size() != n)
        throw error("labeled_sample: distance matrix size mismatch");
    evaluation_mask.validate(n);
}

double sphere_volume(std::size_t n) {
    const double half = 0.5 * static_cast<double>(n + 1);
    return std::exp(std::log(2.0) + half * std::log(M_PI) - std::lgamma(half));
}

double sphere_geodesic(const double* x, const double* y, std::size_t ambient_dim) {
    double dot = 0.0;
    for (std::size_t k = 0; k < ambient_dim; ++k) dot += x[k] * y[k];
    return std::acos(std::clamp(dot, -1.0, 1.0));
}

double poincare_geodesic(const double* u, const double* v) {
    const double du = u[0] - v[0];
    const double dv = u[1] - v[1];
    const double diff2 = du * du + dv * dv;
    const double nu = 1.0 - (u[0] * u[0] + u[1] * u[1]);
    const double nv = 1.0 - (v[0] * v[0] + v[1] * v[1]);
    return std::acosh(1.0 + 2.0 * diff2 / (nu * nv));
}

double torus_scalar_curvature(double theta) {
    const double r = TORUS_TUBE_RADIUS;
    const double R = TORUS_CENTER_RADIUS;
    return 2.0 * std::cos(theta) / (r * (R + r * std::cos(theta)));
}

double hyperboloid_scalar_curvature(double z) {
    const double t = 1.0 + 5.0 * z * z;
    return -2.0 / (t * t);
}

labeled_sample sample_sphere(std::size_t n, std::size_t count, std::uint64_t seed) {
    if (n < 1) throw error("sample_sphere: dimension must be >= 1");
    if (count < 2) throw error("sample_sphere: need at least 2 points");
    const std::size_t ambient = n + 1;

    labeled_sample s;
    s.manifold_tag = "sphere" + std::to_string(n);
    s.cloud.n_points = count;
    s.cloud.ambient_dim = ambient;
    s.cloud.coordinates.resize(count * ambient);

    rng gen(seed);
    for (std::size_t i = 0; i < count; ++i) {
        double* p = s.cloud.point(i);
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (std::size_t k = 0; k < ambient; ++k) {
                p[k] = gen.normal();
                norm2 += p[k] * p[k];
            }
        } while (norm2 == 0.0);
        const double inv = 1.0 / std::sqrt(norm2);
        for (std::size_t k = 0; k < ambient; ++k) p[k] *= inv;
    }

    s.exact_distances = exact_matrix(s.cloud, &sphere_geodesic);
    s.true_curvature.assign(count, static_cast<double>(n) * static_cast<double>(n - 1));
    s.true_density.assign(count, 1.0 / sphere_volume(n));
    s.evaluation_mask = evaluation_set::all(count);
    return s;
}

labeled_sample sample_euclidean_disk(std::size_t count, std::uint64_t seed) {
    if (count < 2) throw error("sample_euclidean_disk: need at least 2 points");
    labeled_sample s;
    s.manifold_tag = "disk";
    s.cloud.n_points = count;
    s.cloud.ambient_dim = 2;
    s.cloud.coordinates.resize(count * 2);

    rng gen(seed);
    for (std::size_t i = 0; i < count; ++i) {
        const double radius = DISK_RADIUS * std::sqrt(gen.uniform());
        const double angle = gen.uniform(0.0, 2.0 * M_PI);
        double* p = s.cloud.point(i);
        p[0] = radius * std::cos(angle);
        p[1] = radius * std::sin(angle);
        if (p[0] * p[0] + p[1] * p[1] <= 1.0) s.evaluation_mask.indices.push_back(i);
    }

    s.exact_distances = pairwise_euclidean(s.cloud);
    s.true_curvature.assign(count, 0.0);
    s.true_density.assign(count, 1.0 / (M_PI * DISK_RADIUS * DISK_RADIUS));
    return s;
}

labeled_sample sample_poincare_disk(std::size_t count, std::uint64_t seed) {
    if (count < 2) throw error("sample_poincare_disk: need at least 2 points");
    labeled_sample s;
    s.manifold_tag = "poincare";
    s.embeddable = false;
    s.cloud.n_points = count;
    s.cloud.ambient_dim = 2;
    s.cloud.coordinates.resize(count * 2);

    // Inverse-CDF sampling of the hyperbolic radial coordinate:
    // P[rho_h <= t] = (cosh t - 1)/(cosh 2 - 1) on [0, 2].
    rng gen(seed);
    const double cosh_max = std::cosh(HYPERBOLIC_RADIUS);
    const double eval_model_radius = std::tanh(0.5); // hyperbolic radius 1
    for (std::size_t i = 0; i < count; ++i) {
        const double rho_h = std::acosh(1.0 + gen.uniform() * (cosh_max - 1.0));
        const double angle = gen.uniform(0.0, 2.0 * M_PI);
        const double model_r = std::tanh(0.5 * rho_h);
        double* p = s.cloud.point(i);
        p[0] = model_r * std::cos(angle);
        p[1] = model_r * std::sin(angle);
        if (model_r <= eval_model_radius) s.evaluation_mask.indices.push_back(i);
    }

    s.exact_distances = exact_matrix(s.cloud, &poincare_metric_adapter);
    s.true_curvature.assign(count, -2.0);
    s.true_density.assign(count, 1.0 / (2.0 * M_PI * (cosh_max - 1.0)));
    return s;
}

labeled_sample sample_torus(std::size_t count, std::uint64_t seed) {
    if (count < 2) throw error("sample_torus: need at least 2 points");
    const double r = TORUS_TUBE_RADIUS;
    const double R = TORUS_CENTER_RADIUS;

    labeled_sample s;
    s.manifold_tag = "torus";
    s.cloud.n_points = count;
    s.cloud.ambient_dim = 3;
    s.cloud.coordinates.resize(count * 3);
    s.true_curvature.resize(count);

    rng gen(seed);
    for (std::size_t i = 0; i < count; ++i) {
        // rejection against the area density (R + r cos theta)/(2 pi R)
        double theta;
        do {
            theta = gen.uniform(0.0, 2.0 * M_PI);
        } while (gen.uniform() * (R + r) > R + r * std::cos(theta));
        const double phi = gen.uniform(0.0, 2.0 * M_PI);
        const double ring = R + r * std::cos(theta);
        double* p = s.cloud.point(i);
        p[0] = ring * std::cos(phi);
        p[1] = ring * std::sin(phi);
        p[2] = r * std::sin(theta);
        s.true_curvature[i] = torus_scalar_curvature(theta);
    }

    s.true_density.assign(count, 1.0 / (4.0 * M_PI * M_PI * r * R));
    s.evaluation_mask = evaluation_set::all(count);
    return s;
}

labeled_sample sample_hyperboloid(std::size_t count, std::uint64_t seed) {
    if (count < 2) throw error("sample_hyperboloid: need at least 2 points");

    labeled_sample s;
    s.manifold_tag = "hyperboloid";
    s.cloud.ambient_dim = 3;

    // Area element in the (u, theta) chart is 2*sqrt(1+5u^2) du dtheta;
    // rejection against the max at |u| = 2. Sampling continues until the
    // requested number of points lies in the |z| <= 1 evaluation band.
    rng gen(seed);
    const double max_density = std::sqrt(21.0);
    std::size_t in_band = 0;
    while (in_band < count) {
        double u;
        do {
            u = gen.uniform(-2.0, 2.0);
        } while (gen.uniform() * max_density > std::sqrt(1.0 + 5.0 * u * u));
        const double theta = gen.uniform(0.0, 2.0 * M_PI);
        const double ring = 2.0 * std::sqrt(1.0 + u * u);
        const std::size_t idx = s.cloud.n_points;
        s.cloud.coordinates.push_back(ring * std::cos(theta));
        s.cloud.coordinates.push_back(ring * std::sin(theta));
        s.cloud.coordinates.push_back(u);
        ++s.cloud.n_points;
        s.true_curvature.push_back(hyperboloid_scalar_curvature(u));
        if (std::abs(u) <= 1.0) {
            s.evaluation_mask.indices.push_back(idx);
            ++in_band;
        }
    }

    // Uniform pdf over the |z| <= 2 band: area = 4 pi * int_{-2}^{2} sqrt(1+5u^2) du.
    const double su = std::sqrt(5.0);
    const double integral = 2.0 * std::sqrt(21.0) + std::asinh(2.0 * su) / su;
    s.true_density.assign(s.cloud.n_points, 1.0 / (4.0 * M_PI * integral));
    return s;
}

labeled_sample sample_manifold(const std::string& name, std::size_t count, std::uint64_t seed) {
    if (name == "disk") return sample_euclidean_disk(count, seed);
    if (name == "poincare") return sample_poincare_disk(count, seed);
    if (name == "torus") return sample_torus(count, seed);
    if (name == "hyperboloid") return sample_hyperboloid(count, seed);
    if (name.rfind("sphere", 0) == 0) {
        const std::string dim = name.substr(6);
        char* end = nullptr;
        const long n = std::strtol(dim.c_str(), &end, 10);
        if (!dim.empty() && end && *end == '\0' && n >= 1)
            return sample_sphere(static_cast<std::size_t>(n), count, seed);
    }
    throw error("unknown manifold '" + name + "'");
}

labeled_sample add_noise(const labeled_sample& sample, const noise_spec& spec) {
    if (!sample.embeddable)
        throw error("add_noise: sample has no Euclidean embedding");
    if (spec.sigma < 0.0) throw error("add_noise: sigma must be >= 0");
    labeled_sample noisy = sample;
    noisy.exact_distances.reset();
    noisy.manifold_tag = sample.manifold_tag + "+noise";
    rng gen(spec.seed);
    for (double& c : noisy.cloud.coordinates) c += spec.sigma * gen.normal();
    return noisy;
}

} // namespace curvkit
