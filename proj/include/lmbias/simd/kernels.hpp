#pragma once

// Double-precision reduction and update kernels used by the numeric inner
// loops (QR least squares, Monte Carlo moments, autocorrelation).
//
// Every kernel has a scalar reference implementation. Wider variants are
// selected once at startup from the CPU feature set; setting the environment
// variable LMBIAS_SIMD=scalar forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace lmbias::simd {

enum class Isa { Scalar, Avx2 };

struct CentralMoments {
    double m2 = 0.0;  // sum of (x - mean)^2
    double m3 = 0.0;  // sum of (x - mean)^3
    double m4 = 0.0;  // sum of (x - mean)^4
};

struct KernelTable {
    Isa isa;
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*sum)(const double* x, std::size_t n);
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    CentralMoments (*central_moments)(const double* x, std::size_t n, double mean);
};

std::string_view isa_name(Isa isa);
bool isa_supported(Isa isa);

// Table picked for this process.
const KernelTable& active();

// Table for a specific ISA; throws std::runtime_error if unsupported here.
const KernelTable& table_for(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active().axpy(alpha, x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}

inline CentralMoments central_moments(std::span<const double> x, double mean) {
    return active().central_moments(x.data(), x.size(), mean);
}

namespace detail {
extern const KernelTable scalar_table;
#if defined(LMBIAS_HAVE_AVX2_TU)
extern const KernelTable avx2_table;
#endif
}  // namespace detail

}  // namespace lmbias::simd
