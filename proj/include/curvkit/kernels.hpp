#pragma once

#include <cstddef>

namespace curvkit::kernels {

/// Row kernels behind the estimator inner loops. Each operates on a
/// contiguous distance row (and a parallel density row where applicable).
/// A scalar reference implementation always exists; SIMD variants are
/// selected at runtime and must agree with the reference (counts exactly,
/// sums to ~1e-13 relative; see the equivalence tests).
struct ops {
    /// |{ i : d[i] <= r }|
    std::size_t (*count_leq)(const double* d, std::size_t n, double r);

    /// sum of recip[i] over { i : d[i] <= r }
    double (*sum_recip_leq)(const double* d, const double* recip,
                            std::size_t n, double r);

    /// sum of exp(-(d[i]*inv_h)^2 / 2)
    double (*gaussian_sum)(const double* d, std::size_t n, double inv_h);

    /// sum of (1 - u^2)^2 over { i : u = d[i]*inv_h <= 1 }
    double (*biweight_sum)(const double* d, std::size_t n, double inv_h);

    const char* name;
};

/// Portable reference implementation.
const ops& scalar_ops();

/// AVX2+FMA implementation, or nullptr when not compiled in.
const ops* avx2_ops();

/// Implementation chosen at startup: AVX2 when the CPU supports it,
/// scalar otherwise. CURVKIT_SIMD={auto|scalar|avx2} overrides.
const ops& active();

} // namespace curvkit::kernels
