#include "lmbias/simd/kernels.hpp"

namespace lmbias::simd::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sum_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

CentralMoments central_moments_scalar(const double* x, std::size_t n, double mean) {
    CentralMoments m;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - mean;
        const double d2 = d * d;
        m.m2 += d2;
        m.m3 += d2 * d;
        m.m4 += d2 * d2;
    }
    return m;
}

}  // namespace

const KernelTable scalar_table{Isa::Scalar, dot_scalar, sum_scalar, axpy_scalar,
                               central_moments_scalar};

}  // namespace lmbias::simd::detail
