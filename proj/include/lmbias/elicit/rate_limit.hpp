#pragma once

#include <chrono>
#include <mutex>

namespace lmbias::elicit {

// Token bucket shared by all workers talking to one backend.
class TokenBucket {
public:
    // rate <= 0 disables limiting.
    TokenBucket(double rate_per_second, double burst);

    void acquire();
    bool try_acquire();

private:
    using Clock = std::chrono::steady_clock;
    void refill(Clock::time_point now);

    double rate_;
    double burst_;
    double tokens_;
    Clock::time_point last_;
    std::mutex mu_;
};

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{500};
    double multiplier = 2.0;
};

}  // namespace lmbias::elicit
