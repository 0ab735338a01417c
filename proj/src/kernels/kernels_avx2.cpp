// AVX2+FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma; it must only be entered after the runtime cpuid check in
// kernels_dispatch.cpp.

#include "mtfl/kernels/kernels.hpp"

#if defined(MTFL_HAVE_AVX2)

#include <cmath>
#include <immintrin.h>

namespace mtfl::kernels {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

const __m256d kAbsMask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
const __m256d kSignMask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x8000000000000000ULL));

} // namespace

double dot_avx2(const double *x, const double *y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i)
        acc += x[i] * y[i];
    return acc;
}

double sum_sq_avx2(const double *x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d v0 = _mm256_loadu_pd(x + i);
        __m256d v1 = _mm256_loadu_pd(x + i + 4);
        acc0 = _mm256_fmadd_pd(v0, v0, acc0);
        acc1 = _mm256_fmadd_pd(v1, v1, acc1);
    }
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        acc0 = _mm256_fmadd_pd(v, v, acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i)
        acc += x[i] * x[i];
    return acc;
}

double sum_abs_avx2(const double *x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, _mm256_and_pd(_mm256_loadu_pd(x + i), kAbsMask));
    double out = hsum(acc);
    for (; i < n; ++i)
        out += std::fabs(x[i]);
    return out;
}

void axpy_avx2(double a, const double *x, double *y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i)
        y[i] += a * x[i];
}

void scal_avx2(double a, double *x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i)
        x[i] *= a;
}

void sub_avx2(const double *x, const double *y, double *z, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(z + i, _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i)
        z[i] = x[i] - y[i];
}

void soft_threshold_avx2(const double *x, double tau, double *out, std::size_t n) {
    const __m256d vtau = _mm256_set1_pd(tau);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        __m256d mag = _mm256_sub_pd(_mm256_and_pd(v, kAbsMask), vtau);
        mag = _mm256_max_pd(mag, zero);
        __m256d sign = _mm256_and_pd(v, kSignMask);
        _mm256_storeu_pd(out + i, _mm256_or_pd(mag, sign));
    }
    for (; i < n; ++i) {
        const double mag = std::fabs(x[i]) - tau;
        out[i] = mag > 0.0 ? std::copysign(mag, x[i]) : 0.0;
    }
}

namespace {

// Shared row update: c[0..n) += a * b[0..n), two vectors per step.
inline void row_fma(double a, const double *b, double *c, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t j = 0;
    for (; j + 8 <= n; j += 8) {
        __m256d c0 = _mm256_loadu_pd(c + j);
        __m256d c1 = _mm256_loadu_pd(c + j + 4);
        c0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b + j), c0);
        c1 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b + j + 4), c1);
        _mm256_storeu_pd(c + j, c0);
        _mm256_storeu_pd(c + j + 4, c1);
    }
    for (; j + 4 <= n; j += 4) {
        __m256d c0 = _mm256_loadu_pd(c + j);
        c0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b + j), c0);
        _mm256_storeu_pd(c + j, c0);
    }
    for (; j < n; ++j)
        c[j] += a * b[j];
}

inline void scale_row(double beta, double *c, std::size_t n) {
    if (beta == 0.0) {
        for (std::size_t j = 0; j < n; ++j)
            c[j] = 0.0;
    } else if (beta != 1.0) {
        scal_avx2(beta, c, n);
    }
}

} // namespace

void gemm_nn_avx2(std::size_t m, std::size_t k, std::size_t n, const double *a, std::size_t lda,
                  const double *b, std::size_t ldb, double beta, double *c, std::size_t ldc) {
    for (std::size_t i = 0; i < m; ++i) {
        double *ci = c + i * ldc;
        scale_row(beta, ci, n);
        const double *ai = a + i * lda;
        for (std::size_t l = 0; l < k; ++l) {
            if (ai[l] == 0.0)
                continue;
            row_fma(ai[l], b + l * ldb, ci, n);
        }
    }
}

void gemm_tn_avx2(std::size_t m, std::size_t k, std::size_t n, const double *a, std::size_t lda,
                  const double *b, std::size_t ldb, double beta, double *c, std::size_t ldc) {
    for (std::size_t i = 0; i < m; ++i)
        scale_row(beta, c + i * ldc, n);
    for (std::size_t l = 0; l < k; ++l) {
        const double *al = a + l * lda;
        const double *bl = b + l * ldb;
        for (std::size_t i = 0; i < m; ++i) {
            if (al[i] == 0.0)
                continue;
            row_fma(al[i], bl, c + i * ldc, n);
        }
    }
}

} // namespace mtfl::kernels

#endif // MTFL_HAVE_AVX2
