#include "curvkit/kernels.hpp"

#include "curvkit/common.hpp"

#include <cstdlib>
#include <cstring>

namespace curvkit::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const ops* resolve() {
    const char* mode = std::getenv("CURVKIT_SIMD");
    if (mode && std::strcmp(mode, "scalar") == 0) return &scalar_ops();
    if (mode && std::strcmp(mode, "avx2") == 0) {
        const ops* simd = avx2_ops();
        if (simd && cpu_has_avx2()) return simd;
        warn("CURVKIT_SIMD=avx2 requested but AVX2 is unavailable; using scalar kernels");
        return &scalar_ops();
    }
    // auto
    const ops* simd = avx2_ops();
    if (simd && cpu_has_avx2()) return simd;
    return &scalar_ops();
}

} // namespace

const ops& active() {
    static const ops* chosen = resolve();
    return *chosen;
}

} // namespace curvkit::kernels
