#include "mtfl/kernels/kernels.hpp"

#include <cmath>

namespace mtfl::kernels {

double dot_ref(const double *x, const double *y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += x[i] * y[i];
    return acc;
}

double sum_sq_ref(const double *x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += x[i] * x[i];
    return acc;
}

double sum_abs_ref(const double *x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += std::fabs(x[i]);
    return acc;
}

void axpy_ref(double a, const double *x, double *y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        y[i] += a * x[i];
}

void scal_ref(double a, double *x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        x[i] *= a;
}

void sub_ref(const double *x, const double *y, double *z, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        z[i] = x[i] - y[i];
}

void soft_threshold_ref(const double *x, double tau, double *out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double mag = std::fabs(x[i]) - tau;
        out[i] = mag > 0.0 ? std::copysign(mag, x[i]) : 0.0;
    }
}

// Outer-product update order: for each row of A, stream the matching row
// of B through C's row. Keeps B and C accesses unit-stride in row-major
// storage; the AVX2 variant mirrors this loop structure.
void gemm_nn_ref(std::size_t m, std::size_t k, std::size_t n, const double *a, std::size_t lda,
                 const double *b, std::size_t ldb, double beta, double *c, std::size_t ldc) {
    for (std::size_t i = 0; i < m; ++i) {
        double *ci = c + i * ldc;
        if (beta == 0.0) {
            for (std::size_t j = 0; j < n; ++j)
                ci[j] = 0.0;
        } else if (beta != 1.0) {
            for (std::size_t j = 0; j < n; ++j)
                ci[j] *= beta;
        }
        const double *ai = a + i * lda;
        for (std::size_t l = 0; l < k; ++l) {
            const double ail = ai[l];
            if (ail == 0.0)
                continue;
            const double *bl = b + l * ldb;
            for (std::size_t j = 0; j < n; ++j)
                ci[j] += ail * bl[j];
        }
    }
}

void gemm_tn_ref(std::size_t m, std::size_t k, std::size_t n, const double *a, std::size_t lda,
                 const double *b, std::size_t ldb, double beta, double *c, std::size_t ldc) {
    for (std::size_t i = 0; i < m; ++i) {
        double *ci = c + i * ldc;
        if (beta == 0.0) {
            for (std::size_t j = 0; j < n; ++j)
                ci[j] = 0.0;
        } else if (beta != 1.0) {
            for (std::size_t j = 0; j < n; ++j)
                ci[j] *= beta;
        }
    }
    // A is k x m; accumulate row l of B into row A(l,i)'s target.
    for (std::size_t l = 0; l < k; ++l) {
        const double *al = a + l * lda;
        const double *bl = b + l * ldb;
        for (std::size_t i = 0; i < m; ++i) {
            const double ali = al[i];
            if (ali == 0.0)
                continue;
            double *ci = c + i * ldc;
            for (std::size_t j = 0; j < n; ++j)
                ci[j] += ali * bl[j];
        }
    }
}

} // namespace mtfl::kernels
