#pragma once

#include <cstddef>

// Small data-parallel kernels used by the time-stepping convolution and the
// dense Jacobian algebra. A scalar reference implementation always exists;
// on x86-64 an AVX2/FMA variant is selected once at startup.

namespace fracwest::kernels {

/// Sum of a[i]*b[i], i = 0..n-1.
double dot(const double* a, const double* b, std::size_t n);

/// y[i] += alpha * x[i], i = 0..n-1.
void axpy(double alpha, const double* x, double* y, std::size_t n);

/// Name of the dispatched backend ("scalar" or "avx2").
const char* active_backend();

// Reference implementations, always available (equivalence tests compare
// the dispatched kernels against these).
double dot_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);

#if defined(__x86_64__) || defined(_M_X64)
double dot_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
#endif

} // namespace fracwest::kernels
