#include "enkf_lab/simd/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#define ENKF_LAB_HAVE_AVX2_PATH 1
#include <immintrin.h>
#else
#define ENKF_LAB_HAVE_AVX2_PATH 0
#endif

namespace enkf_lab::simd {

#if ENKF_LAB_HAVE_AVX2_PATH

namespace {

#define AVX2_FN __attribute__((target("avx2")))

struct Drift {
    __m256d x, y, z;
};

AVX2_FN inline Drift lorenz(__m256d sigma, __m256d r, __m256d b, __m256d x, __m256d y, __m256d z) {
    return {
        _mm256_mul_pd(sigma, _mm256_sub_pd(y, x)),
        _mm256_sub_pd(_mm256_sub_pd(_mm256_mul_pd(r, x), _mm256_mul_pd(x, z)), y),
        _mm256_sub_pd(_mm256_mul_pd(x, y), _mm256_mul_pd(b, z)),
    };
}

// v + s·k
AVX2_FN inline __m256d step(__m256d v, __m256d s, __m256d k) {
    return _mm256_add_pd(v, _mm256_mul_pd(s, k));
}

// ((k1 + 2·k2) + 2·k3) + k4
AVX2_FN inline __m256d combine(__m256d k1, __m256d k2, __m256d k3, __m256d k4) {
    const __m256d two = _mm256_set1_pd(2.0);
    return _mm256_add_pd(
        _mm256_add_pd(_mm256_add_pd(k1, _mm256_mul_pd(two, k2)), _mm256_mul_pd(two, k3)), k4);
}

AVX2_FN void lorenz_rk4_avx2(const LorenzCoefficients& p, double* xs, double* ys, double* zs,
                             std::size_t count, double h, std::size_t substeps) {
    const __m256d sigma = _mm256_set1_pd(p.sigma);
    const __m256d r = _mm256_set1_pd(p.r);
    const __m256d b = _mm256_set1_pd(p.b);
    const __m256d vh = _mm256_set1_pd(h);
    const __m256d half_h = _mm256_set1_pd(0.5 * h);
    const __m256d h6 = _mm256_set1_pd(h / 6.0);

    const std::size_t vec_end = count - count % 4;
    for (std::size_t i = 0; i < vec_end; i += 4) {
        __m256d x = _mm256_loadu_pd(xs + i);
        __m256d y = _mm256_loadu_pd(ys + i);
        __m256d z = _mm256_loadu_pd(zs + i);
        for (std::size_t s = 0; s < substeps; ++s) {
            const Drift k1 = lorenz(sigma, r, b, x, y, z);
            const Drift k2 = lorenz(sigma, r, b, step(x, half_h, k1.x), step(y, half_h, k1.y),
                                    step(z, half_h, k1.z));
            const Drift k3 = lorenz(sigma, r, b, step(x, half_h, k2.x), step(y, half_h, k2.y),
                                    step(z, half_h, k2.z));
            const Drift k4 =
                lorenz(sigma, r, b, step(x, vh, k3.x), step(y, vh, k3.y), step(z, vh, k3.z));
            x = step(x, h6, combine(k1.x, k2.x, k3.x, k4.x));
            y = step(y, h6, combine(k1.y, k2.y, k3.y, k4.y));
            z = step(z, h6, combine(k1.z, k2.z, k3.z, k4.z));
        }
        _mm256_storeu_pd(xs + i, x);
        _mm256_storeu_pd(ys + i, y);
        _mm256_storeu_pd(zs + i, z);
    }
    if (vec_end < count)
        scalar_kernels().lorenz_rk4(p, xs + vec_end, ys + vec_end, zs + vec_end, count - vec_end,
                                    h, substeps);
}

AVX2_FN double finish_lanes(__m256d acc, const double* tail, std::size_t tail_count) {
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    for (std::size_t i = 0; i < tail_count; ++i) lane[i] += tail[i];
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

AVX2_FN double striped_sum_avx2(const double* a, std::size_t count) {
    __m256d acc = _mm256_setzero_pd();
    const std::size_t vec_end = count - count % 4;
    for (std::size_t i = 0; i < vec_end; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
    return finish_lanes(acc, a + vec_end, count - vec_end);
}

AVX2_FN double striped_centered_dot_avx2(const double* a, double mean_a, const double* b,
                                         double mean_b, std::size_t count) {
    const __m256d ma = _mm256_set1_pd(mean_a);
    const __m256d mb = _mm256_set1_pd(mean_b);
    __m256d acc = _mm256_setzero_pd();
    const std::size_t vec_end = count - count % 4;
    for (std::size_t i = 0; i < vec_end; i += 4) {
        const __m256d da = _mm256_sub_pd(_mm256_loadu_pd(a + i), ma);
        const __m256d db = _mm256_sub_pd(_mm256_loadu_pd(b + i), mb);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(da, db));
    }
    double tail[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = vec_end; i < count; ++i) tail[i - vec_end] = (a[i] - mean_a) * (b[i] - mean_b);
    return finish_lanes(acc, tail, count - vec_end);
}

AVX2_FN void axpy_avx2(double alpha, const double* x, double* y, std::size_t count) {
    const __m256d va = _mm256_set1_pd(alpha);
    const std::size_t vec_end = count - count % 4;
    for (std::size_t i = 0; i < vec_end; i += 4)
        _mm256_storeu_pd(y + i, step(_mm256_loadu_pd(y + i), va, _mm256_loadu_pd(x + i)));
    for (std::size_t i = vec_end; i < count; ++i) y[i] += alpha * x[i];
}

#undef AVX2_FN

}  // namespace

const KernelTable* avx2_kernels() {
    static const KernelTable table{
        "avx2", lorenz_rk4_avx2, striped_sum_avx2, striped_centered_dot_avx2, axpy_avx2,
    };
    static const bool supported = __builtin_cpu_supports("avx2");
    return supported ? &table : nullptr;
}

#else

const KernelTable* avx2_kernels() { return nullptr; }

#endif

}  // namespace enkf_lab::simd
