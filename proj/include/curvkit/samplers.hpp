#pragma once

#include "curvkit/distance_matrix.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace curvkit {

/// Isotropic Gaussian perturbation of an embedded cloud.
struct noise_spec {
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

/// A sampled point cloud with exact geodesics (when the manifold admits a
/// closed form) and closed-form ground-truth scalar curvature, used to
/// validate the estimation pipeline.
struct labeled_sample {
    point_cloud cloud;
    /// False when the stored coordinates are model coordinates rather than
    /// an isometric Euclidean embedding (Poincare disk): the Euclidean
    /// pipeline (pairwise_euclidean, noise, knn on chords) must not be used.
    bool embeddable = true;
    std::optional<distance_matrix> exact_distances;
    std::vector<double> true_curvature; // S(x) per point
    std::vector<double> true_density;   // rho(x) per point (uniform: 1/vol(M))
    std::string manifold_tag;
    evaluation_set evaluation_mask;

    std::size_t size() const { return true_curvature.size(); }
    void validate() const;
};

/// Surface area of the unit n-sphere S^n: 2 pi^((n+1)/2) / Gamma((n+1)/2).
double sphere_volume(std::size_t n);

/// Uniform points on the unit n-sphere (normalized Gaussian draws) with
/// exact geodesic distances arccos(<x,y>) and S = n(n-1).
labeled_sample sample_sphere(std::size_t n, std::size_t count, std::uint64_t seed);

/// Uniform points in the radius-2 planar disk; S = 0; exact distances are
/// Euclidean; curvature is evaluated only inside the unit disk.
labeled_sample sample_euclidean_disk(std::size_t count, std::uint64_t seed);

/// Uniform (w.r.t. hyperbolic area) points in the hyperbolic disk of radius 2,
/// stored in Poincare model coordinates; S = -2; exact hyperbolic distances;
/// curvature is evaluated only within hyperbolic radius 1. Not embeddable.
labeled_sample sample_poincare_disk(std::size_t count, std::uint64_t seed);

/// Area-uniform points on the torus with tube radius 1 and center radius 2;
/// S(theta) = 2 cos(theta) / (1 * (2 + cos(theta))); no exact distances.
labeled_sample sample_torus(std::size_t count, std::uint64_t seed);

/// Area-uniform points on the one-sheet hyperboloid x^2/4 + y^2/4 - z^2 = 1
/// restricted to |z| <= 2, sampled until `count` points satisfy |z| <= 1;
/// S(z) = -2/(1+5z^2)^2; evaluation restricted to |z| <= 1.
labeled_sample sample_hyperboloid(std::size_t count, std::uint64_t seed);

/// Adds N(0, sigma^2) independently to every coordinate. Drops exact
/// distances; ground-truth labels are retained for scoring. Throws for
/// non-embeddable samples.
labeled_sample add_noise(const labeled_sample& sample, const noise_spec& spec);

/// Dispatch by manifold name: sphere2, sphere3, sphere5, sphere7, disk,
/// poincare, torus, hyperboloid (or sphereN for any N >= 1).
labeled_sample sample_manifold(const std::string& name, std::size_t count, std::uint64_t seed);

/// Geodesic distance helpers (also used to cross-check stored matrices).
double sphere_geodesic(const double* x, const double* y, std::size_t ambient_dim);
double poincare_geodesic(const double* u, const double* v);

/// Closed-form scalar curvature of the torus (tube angle theta) and the
/// hyperboloid (height z).
double torus_scalar_curvature(double theta);
double hyperboloid_scalar_curvature(double z);

} // namespace curvkit
