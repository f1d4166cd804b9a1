#pragma once

#include <atomic>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lmbias/corpus/cache.hpp"
#include "lmbias/corpus/types.hpp"
#include "lmbias/elicit/backend.hpp"
#include "lmbias/elicit/prompts.hpp"
#include "lmbias/elicit/rate_limit.hpp"
#include "lmbias/elicit/records.hpp"
#include "lmbias/elicit/score.hpp"

namespace lmbias::elicit {

struct ElicitOptions {
    GenerationParams params;
    ParseOptions parse;
    RetryPolicy retry;
    std::size_t max_in_flight = 4;
    bool fail_fast = false;
};

struct PairOutcome {
    ScoreOutcome unnamed;
    ScoreOutcome named;
};

struct ElicitSummary {
    std::size_t docs = 0;
    std::size_t valid_pairs = 0;
    std::size_t excluded = 0;  // records with at least one no-response
    std::size_t failed = 0;    // docs with no record because a request failed
    std::size_t backend_requests = 0;
    std::size_t cache_hits = 0;
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
};

struct ElicitRun {
    std::vector<BiasRecord> records;
    ElicitSummary summary;
};

class ElicitError : public Error {
public:
    using Error::Error;
};

// Scores documents with a backend, reading and filling the response cache.
// The two prompts of a pair are independent single-turn requests.
class Elicitor {
public:
    Elicitor(Backend& backend, ResponseCache* cache, TemplateSet templates, ElicitOptions options,
             TokenBucket* limiter = nullptr);

    CacheKey cache_key(const std::string& prompt) const;

    // Throws ElicitError (carrying the prompt's cache key) once retries are
    // exhausted; never invents a score.
    PairOutcome elicit_pair(const PerformanceDoc& doc);

    // Records come back sorted by (company_id, fiscal_period) whatever the
    // completion order. Per-doc failures are collected in the summary unless
    // fail_fast is set, in which case the first one is rethrown.
    ElicitRun run(std::span<const PerformanceDoc> docs);

    std::size_t backend_requests() const { return requests_.load(); }
    std::size_t cache_hits() const { return cache_hits_.load(); }

private:
    std::string fetch(const std::string& prompt);

    Backend& backend_;
    ResponseCache* cache_;
    TemplateSet templates_;
    ElicitOptions options_;
    TokenBucket* limiter_;
    std::atomic<std::size_t> requests_{0};
    std::atomic<std::size_t> cache_hits_{0};
};

ElicitRun run_elicitation(Backend& backend, ResponseCache* cache, std::span<const PerformanceDoc> docs,
                          const TemplateSet& templates, const ElicitOptions& options, TokenBucket* limiter = nullptr);

}  // namespace lmbias::elicit
