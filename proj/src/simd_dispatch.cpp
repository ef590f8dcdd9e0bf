#include "conecalc/simd.hpp"

#include <cstdlib>
#include <cstring>

namespace conecalc::simd {

namespace {

struct KernelTable {
    Backend backend;
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*scale)(double, double*, std::size_t);
    double (*weighted_dot)(const double*, const double*, const double*, std::size_t);
    double (*weighted_sq_sum)(const double*, const double*, std::size_t);
    double (*max_abs_scaled)(const double*, const double*, std::size_t);
};

constexpr KernelTable kScalarTable = {
    Backend::Scalar,
    detail::dot_scalar,
    detail::axpy_scalar,
    detail::scale_scalar,
    detail::weighted_dot_scalar,
    detail::weighted_sq_sum_scalar,
    detail::max_abs_scaled_scalar,
};

#if defined(__x86_64__) || defined(_M_X64)
constexpr KernelTable kAvx2Table = {
    Backend::Avx2,
    detail::dot_avx2,
    detail::axpy_avx2,
    detail::scale_avx2,
    detail::weighted_dot_avx2,
    detail::weighted_sq_sum_avx2,
    detail::max_abs_scaled_avx2,
};
#endif

const KernelTable& resolve() {
    static const KernelTable& table = []() -> const KernelTable& {
        const char* env = std::getenv("CONECALC_SIMD");
        if (env && std::strcmp(env, "scalar") == 0) return kScalarTable;
#if defined(__x86_64__) || defined(_M_X64)
        if (env && std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return kAvx2Table;
        if ((!env || std::strcmp(env, "auto") == 0) && cpu_has_avx2()) return kAvx2Table;
#endif
        return kScalarTable;
    }();
    return table;
}

}  // namespace

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend active_backend() { return resolve().backend; }

const char* backend_name() {
    return resolve().backend == Backend::Avx2 ? "avx2" : "scalar";
}

double dot(const double* x, const double* y, std::size_t n) {
    return resolve().dot(x, y, n);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    resolve().axpy(a, x, y, n);
}

void scale(double a, double* x, std::size_t n) {
    resolve().scale(a, x, n);
}

double weighted_dot(const double* w, const double* x, const double* y, std::size_t n) {
    return resolve().weighted_dot(w, x, y, n);
}

double weighted_sq_sum(const double* w, const double* x, std::size_t n) {
    return resolve().weighted_sq_sum(w, x, n);
}

double max_abs_scaled(const double* s, const double* x, std::size_t n) {
    return resolve().max_abs_scaled(s, x, n);
}

}  // namespace conecalc::simd
