#include "lmbias/eventstudy/stats.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "lmbias/simd/kernels.hpp"

namespace lmbias::eventstudy {
namespace {

double two_sided_t_p(double t, double dof) {
    if (std::isnan(t)) return 1.0;
    if (std::isinf(t)) return 0.0;
    const boost::math::students_t dist(dof);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

}  // namespace

std::string stars_for(double p_value) {
    if (p_value < 0.05) return "**";
    if (p_value < 0.1) return "*";
    return "";
}

SampleMoments sample_moments(std::span<const double> x) {
    SampleMoments m;
    if (x.empty()) return m;
    const double n = static_cast<double>(x.size());
    m.mean = simd::sum(x) / n;
    if (x.size() > 1) m.variance = simd::central_moments(x, m.mean).m2 / (n - 1.0);
    return m;
}

std::optional<TestResult> one_sample_t(std::span<const double> sample) {
    if (sample.size() < 2) return std::nullopt;
    const auto m = sample_moments(sample);
    const double n = static_cast<double>(sample.size());
    TestResult r;
    r.dof = n - 1.0;
    if (m.variance == 0.0) {
        if (m.mean == 0.0) {
            r.statistic = 0.0;
            r.p_value = 1.0;
        } else {
            r.statistic = std::copysign(std::numeric_limits<double>::infinity(), m.mean);
            r.p_value = 0.0;
        }
    } else {
        r.statistic = m.mean / std::sqrt(m.variance / n);
        r.p_value = two_sided_t_p(r.statistic, r.dof);
    }
    r.stars = stars_for(r.p_value);
    return r;
}

std::optional<TestResult> welch_t(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) return std::nullopt;
    const auto ma = sample_moments(a);
    const auto mb = sample_moments(b);
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double va = ma.variance / na;
    const double vb = mb.variance / nb;
    const double diff = ma.mean - mb.mean;
    TestResult r;
    if (va + vb == 0.0) {
        r.dof = na + nb - 2.0;
        r.statistic = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
        r.p_value = diff == 0.0 ? 1.0 : 0.0;
    } else {
        r.statistic = diff / std::sqrt(va + vb);
        r.dof = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
        r.p_value = two_sided_t_p(r.statistic, r.dof);
    }
    r.stars = stars_for(r.p_value);
    return r;
}

std::optional<TestResult> sign_test(std::span<const double> sample) {
    std::size_t pos = 0;
    std::size_t nonzero = 0;
    for (const double v : sample) {
        if (v == 0.0) continue;
        ++nonzero;
        if (v > 0.0) ++pos;
    }
    if (nonzero < 2) return std::nullopt;
    const boost::math::binomial_distribution<double> dist(static_cast<double>(nonzero), 0.5);
    const double k = static_cast<double>(std::min(pos, nonzero - pos));
    TestResult r;
    r.statistic = static_cast<double>(pos);
    r.dof = static_cast<double>(nonzero);
    r.p_value = std::min(1.0, 2.0 * boost::math::cdf(dist, k));
    r.stars = stars_for(r.p_value);
    return r;
}

double lag1_autocorrelation(std::span<const double> x) {
    if (x.size() < 3) return 0.0;
    const double mean = simd::sum(x) / static_cast<double>(x.size());
    std::vector<double> centered(x.begin(), x.end());
    for (auto& v : centered) v -= mean;
    const double denom = simd::dot(centered, centered);
    if (denom == 0.0) return 0.0;
    const std::span<const double> c(centered);
    return simd::dot(c.first(c.size() - 1), c.subspan(1)) / denom;
}

}  // namespace lmbias::eventstudy
