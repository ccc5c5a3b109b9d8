#include "fracwest/kernels.hpp"

namespace fracwest::kernels {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    // Four partial sums so that the scalar path has a fixed association
    // order matching the unrolled SIMD variants' per-lane reduction.
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    double tail = 0.0;
    for (; i < n; ++i) tail += a[i] * b[i];
    return ((s0 + s1) + (s2 + s3)) + tail;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

namespace {

using DotFn = double (*)(const double*, const double*, std::size_t);
using AxpyFn = void (*)(double, const double*, double*, std::size_t);

struct Dispatch {
    DotFn dot;
    AxpyFn axpy;
    const char* name;
};

Dispatch select_backend() {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return {dot_avx2, axpy_avx2, "avx2"};
#endif
    return {dot_scalar, axpy_scalar, "scalar"};
}

const Dispatch g_dispatch = select_backend();

} // namespace

double dot(const double* a, const double* b, std::size_t n) {
    return g_dispatch.dot(a, b, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    g_dispatch.axpy(alpha, x, y, n);
}

const char* active_backend() { return g_dispatch.name; }

} // namespace fracwest::kernels
