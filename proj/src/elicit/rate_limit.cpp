#include "lmbias/elicit/rate_limit.hpp"

#include <algorithm>
#include <thread>

namespace lmbias::elicit {

TokenBucket::TokenBucket(double rate_per_second, double burst)
    : rate_(rate_per_second), burst_(std::max(1.0, burst)), tokens_(std::max(1.0, burst)), last_(Clock::now()) {}

void TokenBucket::refill(Clock::time_point now) {
    const std::chrono::duration<double> dt = now - last_;
    tokens_ = std::min(burst_, tokens_ + dt.count() * rate_);
    last_ = now;
}

bool TokenBucket::try_acquire() {
    if (rate_ <= 0.0) return true;
    std::lock_guard lock(mu_);
    refill(Clock::now());
    if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return true;
    }
    return false;
}

void TokenBucket::acquire() {
    if (rate_ <= 0.0) return;
    while (true) {
        std::chrono::duration<double> wait{0.0};
        {
            std::lock_guard lock(mu_);
            refill(Clock::now());
            if (tokens_ >= 1.0) {
                tokens_ -= 1.0;
                return;
            }
            wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
        }
        std::this_thread::sleep_for(wait);
    }
}

}  // namespace lmbias::elicit
