#include "mtfl/kernels/kernels.hpp"

#include <cstdlib>
#include <cstring>

#include "mtfl/core/log.hpp"

namespace mtfl::kernels {

DotFn dot = dot_ref;
SumSqFn sum_sq = sum_sq_ref;
SumAbsFn sum_abs = sum_abs_ref;
AxpyFn axpy = axpy_ref;
ScalFn scal = scal_ref;
SubFn sub = sub_ref;
SoftThresholdFn soft_threshold = soft_threshold_ref;
GemmFn gemm_nn = gemm_nn_ref;
GemmFn gemm_tn = gemm_tn_ref;

namespace {
Isa g_active = Isa::scalar;
}

bool cpu_has_avx2() {
#if defined(MTFL_HAVE_AVX2)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

void select(Isa isa) {
#if defined(MTFL_HAVE_AVX2)
    if (isa == Isa::avx2 && cpu_has_avx2()) {
        dot = dot_avx2;
        sum_sq = sum_sq_avx2;
        sum_abs = sum_abs_avx2;
        axpy = axpy_avx2;
        scal = scal_avx2;
        sub = sub_avx2;
        soft_threshold = soft_threshold_avx2;
        gemm_nn = gemm_nn_avx2;
        gemm_tn = gemm_tn_avx2;
        g_active = Isa::avx2;
        return;
    }
#endif
    dot = dot_ref;
    sum_sq = sum_sq_ref;
    sum_abs = sum_abs_ref;
    axpy = axpy_ref;
    scal = scal_ref;
    sub = sub_ref;
    soft_threshold = soft_threshold_ref;
    gemm_nn = gemm_nn_ref;
    gemm_tn = gemm_tn_ref;
    g_active = Isa::scalar;
}

Isa detect() {
    const char *env = std::getenv("MTFL_SIMD");
    if (env != nullptr) {
        if (std::strcmp(env, "scalar") == 0)
            return Isa::scalar;
        if (std::strcmp(env, "avx2") == 0) {
            if (cpu_has_avx2())
                return Isa::avx2;
            log::warn("MTFL_SIMD=avx2 requested but CPU lacks AVX2; using scalar kernels");
            return Isa::scalar;
        }
        if (std::strcmp(env, "auto") != 0)
            log::warn("unknown MTFL_SIMD value '", env, "'; using auto");
    }
    return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

Isa active() { return g_active; }

std::string isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

namespace {
struct AutoSelect {
    AutoSelect() { select(detect()); }
};
const AutoSelect auto_select_once{};
} // namespace

} // namespace mtfl::kernels
