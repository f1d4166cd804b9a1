#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "lmbias/corpus/cache.hpp"
#include "lmbias/elicit/http_backend.hpp"
#include "lmbias/elicit/mock_backend.hpp"
#include "lmbias/elicit/prompts.hpp"
#include "lmbias/elicit/rate_limit.hpp"
#include "lmbias/elicit/records.hpp"
#include "lmbias/elicit/runner.hpp"
#include "lmbias/elicit/score.hpp"
#include "lmbias/error.hpp"
#include "support.hpp"

using namespace lmbias;
using namespace lmbias::elicit;

namespace {

PerformanceDoc make_doc(std::string company_id, std::string name, std::string text, std::string period = "FY2022") {
    PerformanceDoc d;
    d.company_id = std::move(company_id);
    d.company_name = std::move(name);
    d.announcement_at = Timestamp{lmbias::testing::ymd(2023, 5, 10), std::nullopt, std::nullopt};
    d.fiscal_period = std::move(period);
    d.text = std::move(text);
    return d;
}

// Replies chosen per prompt; can fail a set number of times first.
class ScriptedBackend final : public Backend {
public:
    std::function<std::string(const std::string& prompt)> reply = [](const std::string&) { return "3"; };
    std::atomic<int> failures_left{0};
    bool retryable = true;
    std::atomic<int> calls{0};

    std::string id() const override { return "scripted"; }
    std::string complete(const ChatRequest& request) override {
        ++calls;
        if (failures_left.fetch_sub(1) > 0) throw TransportError("injected", retryable);
        return reply(request.messages.at(0).content);
    }
};

ElicitOptions fast_options() {
    ElicitOptions o;
    o.params.model_id = "m";
    o.retry.initial_backoff = std::chrono::milliseconds{0};
    o.max_in_flight = 3;
    return o;
}

bool is_named(const std::string& prompt) { return prompt.find("financial performance of ") != std::string::npos; }

}  // namespace

TEST_SUITE("prompts") {
    TEST_CASE("placeholders are filled") {
        const auto pair = build_prompts(make_doc("1", "ACME", "Sales rose."), TemplateSet::standard());
        CHECK(pair.unnamed.size() >= 11);
        CHECK(pair.unnamed.substr(pair.unnamed.size() - 11) == "Sales rose.");
        CHECK(pair.named.find("financial performance of ACME") != std::string::npos);
        CHECK(pair.unnamed.find("ACME") == std::string::npos);
        CHECK_FALSE(pair.unnamed_mentions_company);
    }

    TEST_CASE("empty company name is rejected") {
        CHECK_THROWS_AS(build_prompts(make_doc("1", "", "Sales rose."), TemplateSet::standard()), ValidationError);
    }

    TEST_CASE("building twice is byte-identical") {
        const auto doc = make_doc("1", "ACME", "Sales rose.");
        CHECK(build_prompts(doc, TemplateSet::standard()) == build_prompts(doc, TemplateSet::standard()));
    }

    TEST_CASE("text naming the company is flagged") {
        CHECK(build_prompts(make_doc("1", "ACME", "ACME sales rose."), TemplateSet::standard()).unnamed_mentions_company);
    }

    TEST_CASE("templates missing a placeholder are rejected") {
        TemplateSet t = TemplateSet::standard();
        t.named = "Rate {text}";
        CHECK_THROWS_AS(t.validate(), ConfigError);
        t = TemplateSet::standard();
        t.unnamed = "Rate {company_name}: {text}";
        CHECK_THROWS_AS(t.validate(), ConfigError);
        t = TemplateSet::standard();
        t.unnamed = "Rate this";
        CHECK_THROWS_AS(t.validate(), ConfigError);
        t = TemplateSet::standard();
        t.named = "{text} {text} {company_name}";
        CHECK_THROWS_AS(t.validate(), ConfigError);
    }

    TEST_CASE("template file loads") {
        lmbias::testing::TempDir dir;
        lmbias::testing::write_text(dir / "t.json",
                                    R"({"name":"ja","unnamed":"評価: {text}","named":"{company_name} の評価: {text}"})");
        const auto t = TemplateSet::load(dir / "t.json");
        CHECK(t.name == "ja");
        const auto pair = build_prompts(make_doc("1", "トヨタ", "増収"), t);
        CHECK(pair.named == "トヨタ の評価: 増収");
        lmbias::testing::write_text(dir / "bad.json", R"({"name":"x","unnamed":"{text}"})");
        CHECK_THROWS_AS(TemplateSet::load(dir / "bad.json"), ConfigError);
    }

    TEST_CASE("match_template inverts rendering") {
        const auto t = TemplateSet::standard();
        const auto doc = make_doc("1", "Sony Group", "Revenue fell.");
        const auto m = match_template(t.named, build_prompts(doc, t).named);
        REQUIRE(m);
        CHECK(m->at("company_name") == "Sony Group");
        CHECK(m->at("text") == "Revenue fell.");
        CHECK_FALSE(match_template(t.named, build_prompts(doc, t).unnamed));
    }
}

TEST_SUITE("score parsing") {
    TEST_CASE("documented examples") {
        CHECK(parse_score("4") == ScoreOutcome::valid(4));
        CHECK(parse_score("I would rate this 2 out of 5") == ScoreOutcome::valid(2));
        CHECK_FALSE(parse_score("Cannot determine sentiment.").is_valid());
        CHECK_FALSE(parse_score("Score: 7").is_valid());
        CHECK(parse_score("3.5") == ScoreOutcome::valid(3));
        CHECK_FALSE(parse_score("2023 was a good year: 4").is_valid());
        CHECK_FALSE(parse_score("").is_valid());
        CHECK(parse_score("05") == ScoreOutcome::valid(5));
        CHECK(parse_score("-3") == ScoreOutcome::valid(3));
        CHECK(parse_score("５").is_valid() == false);  // full-width digits are not ASCII
    }

    TEST_CASE("scan past invalid is opt-in") {
        ParseOptions scan{true};
        CHECK(parse_score("Score: 7, adjusted 4", scan) == ScoreOutcome::valid(4));
        CHECK_FALSE(parse_score("Score: 7, adjusted 4").is_valid());
        CHECK_FALSE(parse_score("0 9", scan).is_valid());
    }

    TEST_CASE("raw text is kept") {
        CHECK(parse_score("Rating: 4").raw() == "Rating: 4");
        CHECK(parse_score("none").raw() == "none");
    }

    TEST_CASE("bias is named minus unnamed") {
        CHECK(compute_bias(ScoreOutcome::valid(3), ScoreOutcome::valid(4)) == 1);
        CHECK(compute_bias(ScoreOutcome::valid(5), ScoreOutcome::valid(1)) == -4);
        CHECK_FALSE(compute_bias(ScoreOutcome::no_response("x"), ScoreOutcome::valid(4)));
        CHECK_FALSE(compute_bias(ScoreOutcome::valid(4), ScoreOutcome::no_response("")));
    }
}

TEST_SUITE("records") {
    TEST_CASE("json round trip") {
        std::vector<BiasRecord> recs{
            BiasRecord::make("B", "FY1", "m", ScoreOutcome::valid(2), ScoreOutcome::valid(5)),
            BiasRecord::make("A", "FY1", "m", ScoreOutcome::no_response("?"), ScoreOutcome::valid(5)),
        };
        sort_records(recs);
        CHECK(recs[0].company_id == "A");
        CHECK(to_json_line(recs[1]) ==
              R"({"beta":3,"company_id":"B","fiscal_period":"FY1","model_id":"m","s_b":5,"s_u":2})");
        std::stringstream ss;
        write_bias(ss, recs);
        CHECK(parse_bias_jsonl(ss) == recs);
    }

    TEST_CASE("inconsistent beta is rejected") {
        std::istringstream in(R"({"beta":1,"company_id":"B","fiscal_period":"FY1","model_id":"m","s_b":5,"s_u":2})");
        CHECK_THROWS_AS(parse_bias_jsonl(in), ValidationError);
        std::istringstream out_of_range(
            R"({"beta":null,"company_id":"B","fiscal_period":"FY1","model_id":"m","s_b":6,"s_u":2})");
        CHECK_THROWS(parse_bias_jsonl(out_of_range));
    }
}

TEST_SUITE("mock backend") {
    TEST_CASE("scores follow the keyword rule") {
        CHECK(MockBackend::base_score("Sales rose.") == 4);
        CHECK(MockBackend::base_score("Sales fell and profits declined.") == 1);
        CHECK(MockBackend::base_score("Nothing notable.") == 3);
        CHECK(MockBackend::base_score("record growth, higher gains, strong") == 5);
        for (const char* name : {"A", "Sony", "Toyota Motor", ""}) {
            const int off = MockBackend::company_offset(name);
            CHECK(off >= -1);
            CHECK(off <= 1);
        }
    }

    TEST_CASE("named score adds the company offset") {
        MockBackend mock(TemplateSet::standard());
        const auto doc = make_doc("1", "Kyoto Tools", "Nothing notable.");
        const auto pair = build_prompts(doc, TemplateSet::standard());
        GenerationParams p{"mock"};
        CHECK(mock.complete(ChatRequest::single_user_turn(p, pair.unnamed)) == "3");
        CHECK(mock.complete(ChatRequest::single_user_turn(p, pair.named)) ==
              std::to_string(3 + MockBackend::company_offset("Kyoto Tools")));
        CHECK(mock.calls() == 2);
    }

    TEST_CASE("undetermined texts are declined") {
        MockBackend mock(TemplateSet::standard());
        const auto pair = build_prompts(make_doc("1", "X", "Outlook undetermined."), TemplateSet::standard());
        CHECK_FALSE(parse_score(mock.complete(ChatRequest::single_user_turn({"mock"}, pair.named))).is_valid());
        CHECK_FALSE(parse_score(mock.complete(ChatRequest::single_user_turn({"mock"}, "hello"))).is_valid());
    }

    TEST_CASE("wire format") {
        MockBackend mock(TemplateSet::standard());
        const auto pair = build_prompts(make_doc("1", "X", "Sales rose."), TemplateSet::standard());
        const auto body = ChatRequest::single_user_turn({"mock-1", 10, 0.0}, pair.unnamed).to_json();
        CHECK(body["model"] == "mock-1");
        CHECK(body["messages"][0]["role"] == "user");
        CHECK(body["max_tokens"] == 10);
        const auto reply = mock.handle(body);
        CHECK(reply["choices"][0]["message"]["content"] == "4");
        CHECK_THROWS_AS(ChatRequest::from_json(nlohmann::json{{"model", "x"}}), ParseError);
    }
}

TEST_SUITE("elicitor") {
    TEST_CASE("fixed reply gives valid pair") {
        ScriptedBackend backend;
        Elicitor e(backend, nullptr, TemplateSet::standard(), fast_options());
        const auto out = e.elicit_pair(make_doc("1", "ACME", "Sales rose."));
        CHECK(out.unnamed == ScoreOutcome::valid(3));
        CHECK(out.named == ScoreOutcome::valid(3));
        CHECK(backend.calls == 2);
    }

    TEST_CASE("empty named reply is no response") {
        ScriptedBackend backend;
        backend.reply = [](const std::string& p) { return is_named(p) ? std::string() : std::string("4"); };
        Elicitor e(backend, nullptr, TemplateSet::standard(), fast_options());
        const auto out = e.elicit_pair(make_doc("1", "ACME", "Sales rose."));
        CHECK(out.unnamed == ScoreOutcome::valid(4));
        CHECK_FALSE(out.named.is_valid());
    }

    TEST_CASE("cache is consulted before the backend") {
        lmbias::testing::TempDir dir;
        ResponseCache cache(dir.path());
        ScriptedBackend backend;
        Elicitor e(backend, &cache, TemplateSet::standard(), fast_options());
        const auto doc = make_doc("1", "ACME", "Sales rose.");
        const auto pair = build_prompts(doc, TemplateSet::standard());
        cache.put(e.cache_key(pair.unnamed), "Rating: 2");
        cache.put(e.cache_key(pair.named), "5");
        const auto out = e.elicit_pair(doc);
        CHECK(backend.calls == 0);
        CHECK(out.unnamed == parse_score("Rating: 2"));
        CHECK(out.named == parse_score("5"));
        CHECK(e.cache_hits() == 2);
    }

    TEST_CASE("cache key depends on model and parameters") {
        ScriptedBackend backend;
        auto o1 = fast_options();
        auto o2 = fast_options();
        o2.params.temperature = 0.5;
        auto o3 = fast_options();
        o3.params.model_id = "other";
        Elicitor e1(backend, nullptr, TemplateSet::standard(), o1);
        Elicitor e2(backend, nullptr, TemplateSet::standard(), o2);
        Elicitor e3(backend, nullptr, TemplateSet::standard(), o3);
        CHECK_FALSE(e1.cache_key("p") == e2.cache_key("p"));
        CHECK_FALSE(e1.cache_key("p") == e3.cache_key("p"));
        CHECK(e1.cache_key("p") == Elicitor(backend, nullptr, TemplateSet::standard(), o1).cache_key("p"));
    }

    TEST_CASE("retryable failures are retried") {
        ScriptedBackend backend;
        backend.failures_left = 2;
        Elicitor e(backend, nullptr, TemplateSet::standard(), fast_options());
        CHECK(e.elicit_pair(make_doc("1", "ACME", "x")).unnamed == ScoreOutcome::valid(3));
        CHECK(backend.calls == 4);
    }

    TEST_CASE("exhausted retries raise with the prompt key") {
        ScriptedBackend backend;
        backend.failures_left = 100;
        Elicitor e(backend, nullptr, TemplateSet::standard(), fast_options());
        const auto doc = make_doc("1", "ACME", "x");
        const auto key = e.cache_key(build_prompts(doc, TemplateSet::standard()).unnamed);
        try {
            e.elicit_pair(doc);
            FAIL("expected ElicitError");
        } catch (const ElicitError& err) {
            CHECK(std::string(err.what()).find(key.hex()) != std::string::npos);
        }
        CHECK(backend.calls == 3);
    }

    TEST_CASE("non-retryable failures are not retried") {
        ScriptedBackend backend;
        backend.failures_left = 1;
        backend.retryable = false;
        Elicitor e(backend, nullptr, TemplateSet::standard(), fast_options());
        CHECK_THROWS_AS(e.elicit_pair(make_doc("1", "ACME", "x")), ElicitError);
        CHECK(backend.calls == 1);
    }

    TEST_CASE("batch of three with one no-response") {
        lmbias::testing::TempDir dir;
        ResponseCache cache(dir.path());
        MockBackend mock(TemplateSet::standard());
        const std::vector<PerformanceDoc> docs{make_doc("3", "Gamma", "Sales rose."),
                                               make_doc("1", "Alpha", "Profit fell."),
                                               make_doc("2", "Beta", "Outlook undetermined.")};
        const auto run1 = run_elicitation(mock, &cache, docs, TemplateSet::standard(), fast_options());
        REQUIRE(run1.records.size() == 3);
        CHECK(run1.records[0].company_id == "1");
        CHECK(run1.records[1].company_id == "2");
        CHECK_FALSE(run1.records[1].beta);
        CHECK(run1.records[0].beta);
        CHECK(run1.summary.valid_pairs == 2);
        CHECK(run1.summary.excluded == 1);
        CHECK(run1.summary.backend_requests == 6);

        const auto run2 = run_elicitation(mock, &cache, docs, TemplateSet::standard(), fast_options());
        CHECK(run2.records == run1.records);
        CHECK(run2.summary.backend_requests == 0);
        CHECK(run2.summary.cache_hits == 6);
        CHECK(mock.calls() == 6);
    }

    TEST_CASE("failures are collected, or rethrown with fail-fast") {
        ScriptedBackend backend;
        backend.retryable = false;
        backend.reply = [](const std::string& p) -> std::string {
            if (p.find("boom") != std::string::npos) throw TransportError("down", false);
            return "3";
        };
        const std::vector<PerformanceDoc> docs{make_doc("1", "A", "fine"), make_doc("2", "B", "boom"),
                                               make_doc("3", "C", "fine")};
        const auto run = run_elicitation(backend, nullptr, docs, TemplateSet::standard(), fast_options());
        CHECK(run.records.size() == 2);
        CHECK(run.summary.failed == 1);
        CHECK(run.summary.errors.size() == 1);

        auto opts = fast_options();
        opts.fail_fast = true;
        CHECK_THROWS_AS(run_elicitation(backend, nullptr, docs, TemplateSet::standard(), opts), ElicitError);
    }

    TEST_CASE("output order is independent of worker count") {
        MockBackend mock(TemplateSet::standard());
        std::vector<PerformanceDoc> docs;
        for (int i = 0; i < 40; ++i) {
            docs.push_back(make_doc("C" + std::to_string(i), "Name" + std::to_string(i), i % 2 ? "rose" : "fell"));
        }
        auto serial = fast_options();
        serial.max_in_flight = 1;
        auto wide = fast_options();
        wide.max_in_flight = 8;
        CHECK(run_elicitation(mock, nullptr, docs, TemplateSet::standard(), serial).records ==
              run_elicitation(mock, nullptr, docs, TemplateSet::standard(), wide).records);
    }
}

TEST_SUITE("rate limit") {
    TEST_CASE("burst then empty") {
        TokenBucket bucket(1.0, 2.0);
        CHECK(bucket.try_acquire());
        CHECK(bucket.try_acquire());
        CHECK_FALSE(bucket.try_acquire());
    }

    TEST_CASE("unlimited") {
        TokenBucket bucket(0.0, 1.0);
        for (int i = 0; i < 100; ++i) CHECK(bucket.try_acquire());
    }
}

TEST_SUITE("http backend") {
    // Local server speaking the chat-completion protocol in front of the
    // mock scorer, with switchable failure modes.
    struct LocalServer {
        httplib::Server server;
        MockBackend mock{TemplateSet::standard()};
        std::atomic<int> status_override{0};
        std::atomic<int> hits{0};
        std::string last_auth;
        std::mutex mu;
        int port = 0;
        std::thread thread;

        LocalServer() {
            server.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
                ++hits;
                {
                    std::lock_guard lock(mu);
                    last_auth = req.get_header_value("Authorization");
                }
                if (const int s = status_override.load(); s != 0) {
                    res.status = s;
                    res.set_content("{\"error\":\"x\"}", "application/json");
                    return;
                }
                const auto body = nlohmann::json::parse(req.body);
                res.set_content(mock.handle(body).dump(), "application/json");
            });
            port = server.bind_to_any_port("127.0.0.1");
            thread = std::thread([this] { server.listen_after_bind(); });
            server.wait_until_ready();
        }
        ~LocalServer() {
            server.stop();
            thread.join();
        }
        std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions"; }
    };

    TEST_CASE("round trip through the wire protocol") {
        LocalServer srv;
        ::setenv("LMBIAS_TEST_KEY", "secret-token", 1);
        HttpBackend http({"local", srv.endpoint(), "LMBIAS_TEST_KEY", std::chrono::seconds{5}});
        const auto pair = build_prompts(make_doc("1", "X", "Sales rose."), TemplateSet::standard());
        CHECK(http.complete(ChatRequest::single_user_turn({"mock"}, pair.unnamed)) == "4");
        std::lock_guard lock(srv.mu);
        CHECK(srv.last_auth == "Bearer secret-token");
    }

    TEST_CASE("server errors are retryable, client errors are not") {
        LocalServer srv;
        HttpBackend http({"local", srv.endpoint(), "", std::chrono::seconds{5}});
        const auto req = ChatRequest::single_user_turn({"mock"}, "x");
        for (int status : {429, 500, 503}) {
            srv.status_override = status;
            try {
                http.complete(req);
                FAIL("expected TransportError");
            } catch (const TransportError& e) {
                CHECK(e.retryable());
            }
        }
        srv.status_override = 400;
        try {
            http.complete(req);
            FAIL("expected TransportError");
        } catch (const TransportError& e) {
            CHECK_FALSE(e.retryable());
        }
    }

    TEST_CASE("elicitor retries through a flaky server") {
        LocalServer srv;
        HttpBackend http({"local", srv.endpoint(), "", std::chrono::seconds{5}});
        srv.status_override = 503;
        auto opts = fast_options();
        std::thread healer([&] {
            while (srv.hits.load() < 1) std::this_thread::sleep_for(std::chrono::milliseconds{1});
            srv.status_override = 0;
        });
        opts.retry.initial_backoff = std::chrono::milliseconds{20};
        opts.retry.max_attempts = 5;
        Elicitor e(http, nullptr, TemplateSet::standard(), opts);
        const auto out = e.elicit_pair(make_doc("1", "X", "Sales rose."));
        healer.join();
        CHECK(out.unnamed == ScoreOutcome::valid(4));
        CHECK(e.backend_requests() >= 3);
    }

    TEST_CASE("connection refused is retryable") {
        HttpBackend http({"dead", "http://127.0.0.1:1/v1/chat/completions", "", std::chrono::seconds{1}});
        try {
            http.complete(ChatRequest::single_user_turn({"m"}, "x"));
            FAIL("expected TransportError");
        } catch (const TransportError& e) {
            CHECK(e.retryable());
        }
    }

    TEST_CASE("configuration errors") {
        CHECK_THROWS_AS(HttpBackend({"x", "ftp://host/path", "", std::chrono::seconds{1}}), ConfigError);
        CHECK_THROWS_AS(HttpBackend({"x", "no-scheme", "", std::chrono::seconds{1}}), ConfigError);
        ::unsetenv("LMBIAS_SURELY_UNSET");
        CHECK_THROWS_AS(HttpBackend({"x", "http://h/p", "LMBIAS_SURELY_UNSET", std::chrono::seconds{1}}), ConfigError);
    }
}
