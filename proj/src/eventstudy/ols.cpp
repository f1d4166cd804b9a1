#include "lmbias/eventstudy/ols.hpp"

#include <cmath>

#include <fmt/format.h>

#include "lmbias/simd/kernels.hpp"

namespace lmbias::eventstudy {

OlsResult least_squares(const DesignMatrix& x, std::span<const double> y, double rank_tolerance) {
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();
    if (y.size() != n) throw ValidationError(fmt::format("response has {} rows, design has {}", y.size(), n));
    if (n < p) throw RankDeficientError(fmt::format("{} observations for {} regressors", n, p));

    DesignMatrix qr = x;
    std::vector<double> qty(y.begin(), y.end());
    std::vector<double> diag(p, 0.0);
    std::vector<double> v(n, 0.0);

    for (std::size_t k = 0; k < p; ++k) {
        const double original_norm = std::sqrt(simd::dot(x.column(k), x.column(k)));
        auto col = qr.column(k).subspan(k);
        const double norm = std::sqrt(simd::dot(col, col));
        if (original_norm == 0.0 || norm <= rank_tolerance * original_norm) {
            throw RankDeficientError(fmt::format("design matrix is rank deficient at column {}", k));
        }
        const double alpha = col[0] > 0.0 ? -norm : norm;

        std::span<double> vk(v.data() + k, n - k);
        std::copy(col.begin(), col.end(), vk.begin());
        vk[0] -= alpha;
        const double vnorm2 = simd::dot(vk, vk);

        // Apply H = I - 2 v v' / (v'v) to the trailing columns and to y.
        for (std::size_t j = k + 1; j < p; ++j) {
            auto cj = qr.column(j).subspan(k);
            simd::axpy(-2.0 * simd::dot(vk, cj) / vnorm2, vk, cj);
        }
        std::span<double> yk(qty.data() + k, n - k);
        simd::axpy(-2.0 * simd::dot(vk, yk) / vnorm2, vk, yk);
        diag[k] = alpha;
    }

    OlsResult out;
    out.coefficients.assign(p, 0.0);
    for (std::size_t ii = p; ii-- > 0;) {
        double acc = qty[ii];
        for (std::size_t j = ii + 1; j < p; ++j) acc -= qr(ii, j) * out.coefficients[j];
        out.coefficients[ii] = acc / diag[ii];
    }

    out.residuals.assign(y.begin(), y.end());
    for (std::size_t j = 0; j < p; ++j) simd::axpy(-out.coefficients[j], x.column(j), out.residuals);
    out.ssr = simd::dot(out.residuals, out.residuals);
    out.residual_variance = n > p ? out.ssr / static_cast<double>(n - p) : 0.0;
    return out;
}

}  // namespace lmbias::eventstudy
