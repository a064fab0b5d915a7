#include "curvkit/kernels.hpp"

#include <cmath>

namespace curvkit::kernels {

namespace {

std::size_t count_leq_scalar(const double* d, std::size_t n, double r) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (d[i] <= r) ++count;
    return count;
}

double sum_recip_leq_scalar(const double* d, const double* recip,
                            std::size_t n, double r) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (d[i] <= r) sum += recip[i];
    return sum;
}

double gaussian_sum_scalar(const double* d, std::size_t n, double inv_h) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = d[i] * inv_h;
        sum += std::exp(-0.5 * u * u);
    }
    return sum;
}

double biweight_sum_scalar(const double* d, std::size_t n, double inv_h) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = d[i] * inv_h;
        if (u <= 1.0) {
            const double t = 1.0 - u * u;
            sum += t * t;
        }
    }
    return sum;
}

} // namespace

const ops& scalar_ops() {
    static const ops table{
        &count_leq_scalar,
        &sum_recip_leq_scalar,
        &gaussian_sum_scalar,
        &biweight_sum_scalar,
        "scalar",
    };
    return table;
}

} // namespace curvkit::kernels
