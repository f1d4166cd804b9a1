#include "lmbias/elicit/runner.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include <fmt/format.h>

#include "lmbias/corpus/io.hpp"

namespace lmbias::elicit {

Elicitor::Elicitor(Backend& backend, ResponseCache* cache, TemplateSet templates, ElicitOptions options,
                   TokenBucket* limiter)
    : backend_(backend), cache_(cache), templates_(std::move(templates)), options_(std::move(options)), limiter_(limiter) {
    templates_.validate();
    options_.params.validate();
    if (options_.retry.max_attempts < 1) throw ConfigError("retry attempts must be >= 1");
}

CacheKey Elicitor::cache_key(const std::string& prompt) const {
    const auto max_tokens = std::to_string(options_.params.max_tokens);
    const auto temperature = format_double(options_.params.temperature);
    return CacheKey::from_fields({"lmbias-chat/v1", backend_.id(), options_.params.model_id, max_tokens, temperature, prompt});
}

std::string Elicitor::fetch(const std::string& prompt) {
    const auto key = cache_key(prompt);
    if (cache_ != nullptr) {
        if (auto hit = cache_->get(key)) {
            cache_hits_.fetch_add(1);
            return *std::move(hit);
        }
    }

    const auto request = ChatRequest::single_user_turn(options_.params, prompt);
    auto backoff = options_.retry.initial_backoff;
    for (int attempt = 1;; ++attempt) {
        try {
            if (limiter_ != nullptr) limiter_->acquire();
            requests_.fetch_add(1);
            auto raw = backend_.complete(request);
            if (cache_ != nullptr) cache_->put(key, raw);
            return raw;
        } catch (const TransportError& e) {
            if (!e.retryable() || attempt >= options_.retry.max_attempts) {
                throw ElicitError(fmt::format("prompt {}: {} (after {} attempt{})", key.hex(), e.what(), attempt,
                                              attempt == 1 ? "" : "s"));
            }
        }
        std::this_thread::sleep_for(backoff);
        backoff = std::chrono::duration_cast<std::chrono::milliseconds>(backoff * options_.retry.multiplier);
    }
}

PairOutcome Elicitor::elicit_pair(const PerformanceDoc& doc) {
    const auto prompts = build_prompts(doc, templates_);
    const auto raw_unnamed = fetch(prompts.unnamed);
    const auto raw_named = fetch(prompts.named);
    return {parse_score(raw_unnamed, options_.parse), parse_score(raw_named, options_.parse)};
}

ElicitRun Elicitor::run(std::span<const PerformanceDoc> docs) {
    std::vector<std::optional<BiasRecord>> slots(docs.size());
    std::vector<std::string> errors(docs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    std::exception_ptr first_failure;
    std::mutex failure_mu;

    const auto requests_before = requests_.load();
    const auto hits_before = cache_hits_.load();

    auto worker = [&] {
        while (!abort.load()) {
            const auto i = next.fetch_add(1);
            if (i >= docs.size()) return;
            const auto& doc = docs[i];
            try {
                auto pair = elicit_pair(doc);
                slots[i] = BiasRecord::make(doc.company_id, doc.fiscal_period, options_.params.model_id,
                                            std::move(pair.unnamed), std::move(pair.named));
            } catch (const Error& e) {
                errors[i] = fmt::format("{} {}: {}", doc.company_id, doc.fiscal_period, e.what());
                if (options_.fail_fast) {
                    std::lock_guard lock(failure_mu);
                    if (!first_failure) first_failure = std::current_exception();
                    abort.store(true);
                }
            }
        }
    };

    const auto n_workers = std::max<std::size_t>(1, std::min(options_.max_in_flight, docs.size()));
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
        worker();
    }
    if (first_failure) std::rethrow_exception(first_failure);

    ElicitRun out;
    out.summary.docs = docs.size();
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (docs[i].company_name.size() > 0 && docs[i].text.find(docs[i].company_name) != std::string::npos) {
            out.summary.warnings.push_back(fmt::format("{} {}: text mentions the company name; unnamed prompt is not anonymous",
                                                       docs[i].company_id, docs[i].fiscal_period));
        }
        if (slots[i]) {
            if (slots[i]->beta) {
                ++out.summary.valid_pairs;
            } else {
                ++out.summary.excluded;
            }
            out.records.push_back(*std::move(slots[i]));
        } else {
            ++out.summary.failed;
            out.summary.errors.push_back(std::move(errors[i]));
        }
    }
    sort_records(out.records);
    out.summary.backend_requests = requests_.load() - requests_before;
    out.summary.cache_hits = cache_hits_.load() - hits_before;
    return out;
}

ElicitRun run_elicitation(Backend& backend, ResponseCache* cache, std::span<const PerformanceDoc> docs,
                          const TemplateSet& templates, const ElicitOptions& options, TokenBucket* limiter) {
    Elicitor elicitor(backend, cache, templates, options, limiter);
    return elicitor.run(docs);
}

}  // namespace lmbias::elicit
