#pragma once

#include <cstddef>
#include <string>

// Data-parallel inner loops used by the solvers and the scoring code.
// Every kernel exists in a scalar reference form (`*_ref`) and, on x86-64
// with AVX2+FMA, a vector form (`*_avx2`). The namespace-level function
// pointers are bound once at startup to the best variant the CPU
// supports; MTFL_SIMD=scalar|avx2|auto overrides the pick. The two
// variants are equivalence-tested against each other.
//
// GEMM kernels operate on row-major storage with explicit leading
// dimensions. They compute C = beta*C + A*B (or A^T*B); alpha is folded
// into A by callers where needed.

namespace mtfl::kernels {

using DotFn = double (*)(const double *x, const double *y, std::size_t n);
using SumSqFn = double (*)(const double *x, std::size_t n);
using SumAbsFn = double (*)(const double *x, std::size_t n);
using AxpyFn = void (*)(double a, const double *x, double *y, std::size_t n);
using ScalFn = void (*)(double a, double *x, std::size_t n);
using SubFn = void (*)(const double *x, const double *y, double *z, std::size_t n);
using SoftThresholdFn = void (*)(const double *x, double tau, double *out, std::size_t n);
using GemmFn = void (*)(std::size_t m, std::size_t k, std::size_t n, const double *a,
                        std::size_t lda, const double *b, std::size_t ldb, double beta, double *c,
                        std::size_t ldc);

extern DotFn dot;                       // sum_i x[i]*y[i]
extern SumSqFn sum_sq;                  // sum_i x[i]^2
extern SumAbsFn sum_abs;                // sum_i |x[i]|
extern AxpyFn axpy;                     // y += a*x
extern ScalFn scal;                     // x *= a
extern SubFn sub;                       // z = x - y
extern SoftThresholdFn soft_threshold;  // out = sign(x)*max(|x|-tau, 0)
extern GemmFn gemm_nn;                  // C(mxn) = beta*C + A(mxk)*B(kxn)
extern GemmFn gemm_tn;                  // C(mxn) = beta*C + A(kxm)^T*B(kxn)

// Reference implementations (always available; used directly in
// equivalence tests).
double dot_ref(const double *x, const double *y, std::size_t n);
double sum_sq_ref(const double *x, std::size_t n);
double sum_abs_ref(const double *x, std::size_t n);
void axpy_ref(double a, const double *x, double *y, std::size_t n);
void scal_ref(double a, double *x, std::size_t n);
void sub_ref(const double *x, const double *y, double *z, std::size_t n);
void soft_threshold_ref(const double *x, double tau, double *out, std::size_t n);
void gemm_nn_ref(std::size_t m, std::size_t k, std::size_t n, const double *a, std::size_t lda,
                 const double *b, std::size_t ldb, double beta, double *c, std::size_t ldc);
void gemm_tn_ref(std::size_t m, std::size_t k, std::size_t n, const double *a, std::size_t lda,
                 const double *b, std::size_t ldb, double beta, double *c, std::size_t ldc);

#if defined(MTFL_HAVE_AVX2)
double dot_avx2(const double *x, const double *y, std::size_t n);
double sum_sq_avx2(const double *x, std::size_t n);
double sum_abs_avx2(const double *x, std::size_t n);
void axpy_avx2(double a, const double *x, double *y, std::size_t n);
void scal_avx2(double a, double *x, std::size_t n);
void sub_avx2(const double *x, const double *y, double *z, std::size_t n);
void soft_threshold_avx2(const double *x, double tau, double *out, std::size_t n);
void gemm_nn_avx2(std::size_t m, std::size_t k, std::size_t n, const double *a, std::size_t lda,
                  const double *b, std::size_t ldb, double beta, double *c, std::size_t ldc);
void gemm_tn_avx2(std::size_t m, std::size_t k, std::size_t n, const double *a, std::size_t lda,
                  const double *b, std::size_t ldb, double beta, double *c, std::size_t ldc);
#endif

enum class Isa { scalar, avx2 };

/// Bind the function pointers. Called once automatically before main();
/// safe to call again (tests use it to force a lane).
void select(Isa isa);

/// Variant chosen by the startup dispatch: honors MTFL_SIMD, otherwise
/// picks the widest ISA the CPU reports.
Isa detect();

Isa active();
std::string isa_name(Isa isa);
bool cpu_has_avx2();

} // namespace mtfl::kernels
