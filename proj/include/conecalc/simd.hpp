#pragma once

#include <cstddef>

// Data-parallel inner-loop kernels. Every kernel has a scalar reference
// implementation and (on x86-64) an AVX2+FMA variant; the active variant is
// chosen once at runtime from CPU capabilities, overridable through the
// CONECALC_SIMD environment variable ("scalar", "avx2", "auto").
//
// The scalar kernels are the semantic reference: the SIMD variants must agree
// with them up to floating-point reassociation of the accumulators, which the
// equivalence test suite pins down.

namespace conecalc::simd {

enum class Backend { Scalar, Avx2 };

// Active backend after dispatch (resolves on first kernel call).
Backend active_backend();
const char* backend_name();

// True if the host CPU can run the AVX2 variants.
bool cpu_has_avx2();

// sum_i x[i]*y[i]
double dot(const double* x, const double* y, std::size_t n);

// y[i] += a*x[i]
void axpy(double a, const double* x, double* y, std::size_t n);

// x[i] *= a
void scale(double a, double* x, std::size_t n);

// sum_i w[i]*x[i]*y[i]   (mass-weighted inner products, quadrature sums)
double weighted_dot(const double* w, const double* x, const double* y, std::size_t n);

// sum_i w[i]*x[i]^2
double weighted_sq_sum(const double* w, const double* x, std::size_t n);

// max_i |s[i]*x[i]|      (weighted sup norms)
double max_abs_scaled(const double* s, const double* x, std::size_t n);

namespace detail {
// Reference implementations, exposed for the equivalence tests.
double dot_scalar(const double* x, const double* y, std::size_t n);
void axpy_scalar(double a, const double* x, double* y, std::size_t n);
void scale_scalar(double a, double* x, std::size_t n);
double weighted_dot_scalar(const double* w, const double* x, const double* y, std::size_t n);
double weighted_sq_sum_scalar(const double* w, const double* x, std::size_t n);
double max_abs_scaled_scalar(const double* s, const double* x, std::size_t n);

#if defined(__x86_64__) || defined(_M_X64)
double dot_avx2(const double* x, const double* y, std::size_t n);
void axpy_avx2(double a, const double* x, double* y, std::size_t n);
void scale_avx2(double a, double* x, std::size_t n);
double weighted_dot_avx2(const double* w, const double* x, const double* y, std::size_t n);
double weighted_sq_sum_avx2(const double* w, const double* x, std::size_t n);
double max_abs_scaled_avx2(const double* s, const double* x, std::size_t n);
#endif
}  // namespace detail

}  // namespace conecalc::simd
