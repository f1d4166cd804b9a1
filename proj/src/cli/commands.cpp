#include "lmbias/cli/commands.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "lmbias/analytics/analytics.hpp"
#include "lmbias/analytics/render.hpp"
#include "lmbias/cli/config.hpp"
#include "lmbias/corpus/cache.hpp"
#include "lmbias/corpus/calendar.hpp"
#include "lmbias/corpus/dates.hpp"
#include "lmbias/corpus/io.hpp"
#include "lmbias/elicit/http_backend.hpp"
#include "lmbias/elicit/mock_backend.hpp"
#include "lmbias/elicit/records.hpp"
#include "lmbias/elicit/runner.hpp"
#include "lmbias/error.hpp"
#include "lmbias/eventstudy/eventstudy.hpp"
#include "lmbias/eventstudy/render.hpp"
#include "lmbias/market/model.hpp"
#include "lmbias/market/simulate.hpp"

namespace lmbias::cli {
namespace {

namespace fs = std::filesystem;

class AnalysisFailure : public Error {
public:
    using Error::Error;
};

struct Globals {
    std::string config;
    std::uint64_t seed = 42;
    std::string cache;
};

RunConfig load_config(const Globals& g) {
    if (g.config.empty()) return RunConfig{};
    return RunConfig::load(g.config);
}

// Prefix loader errors with the file they came from.
template <class F>
auto load_input(const fs::path& path, F&& loader) {
    try {
        return loader(path);
    } catch (const ParseError& e) {
        throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
    } catch (const IoError&) {
        throw;
    } catch (const ValidationError& e) {
        throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw IoError(fmt::format("cannot create '{}': {}", path.parent_path().string(), ec.message()));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
    out << content;
    out.flush();
    if (!out) throw IoError(fmt::format("short write on '{}'", path.string()));
}

bool same_file(const fs::path& a, const fs::path& b) {
    std::error_code ec;
    return fs::exists(a, ec) && fs::exists(b, ec) && fs::equivalent(a, b, ec);
}

std::vector<elicit::BiasRecord> load_bias_files(const std::vector<std::string>& files, std::ostream& err) {
    std::vector<elicit::BiasRecord> all;
    for (const auto& f : files) {
        auto recs = load_input(f, elicit::load_bias);
        if (recs.empty()) fmt::print(err, "warning: {}: no records\n", f);
        all.insert(all.end(), std::make_move_iterator(recs.begin()), std::make_move_iterator(recs.end()));
    }
    elicit::sort_records(all);
    return all;
}

DocSet load_docs_warn(const std::string& path, std::ostream& err) {
    auto docs = load_input(path, lmbias::load_docs);
    for (const auto& w : docs.warnings) fmt::print(err, "warning: {}: {}\n", path, w);
    return docs;
}

// ---- elicit ----------------------------------------------------------------

struct ElicitArgs {
    std::string docs;
    std::string backend;
    std::string model;
    std::string out = "bias.jsonl";
    std::string templates;
    double temperature = 0.0;
    int max_tokens = 10;
    std::size_t max_in_flight = 0;
    bool fail_fast = false;
    bool scan_past_invalid = false;
    bool no_cache = false;
};

int cmd_elicit(const Globals& g, const ElicitArgs& a, std::ostream& out, std::ostream& err) {
    const auto cfg = load_config(g);

    elicit::TemplateSet templates = elicit::TemplateSet::standard();
    if (!a.templates.empty()) {
        templates = elicit::TemplateSet::load(a.templates);
    } else if (cfg.templates) {
        templates = elicit::TemplateSet::load(*cfg.templates);
    }
    templates.validate();

    elicit::ElicitOptions opts;
    opts.params.max_tokens = a.max_tokens;
    opts.params.temperature = a.temperature;
    opts.parse.scan_past_invalid = a.scan_past_invalid || cfg.analysis.scan_past_invalid;
    opts.fail_fast = a.fail_fast;

    std::unique_ptr<elicit::Backend> backend;
    std::optional<elicit::TokenBucket> limiter;
    if (a.backend == "mock") {
        backend = std::make_unique<elicit::MockBackend>(templates);
        opts.params.model_id = a.model.empty() ? "mock" : a.model;
    } else {
        const auto it = cfg.backends.find(a.backend);
        if (it == cfg.backends.end()) {
            throw ConfigError(fmt::format("unknown backend '{}' (built in: mock; others must be defined under "
                                          "\"backends\" in the config file)",
                                          a.backend));
        }
        if (a.model.empty()) throw ConfigError(fmt::format("--model is required for backend '{}'", a.backend));
        const auto& spec = it->second;
        backend = std::make_unique<elicit::HttpBackend>(elicit::HttpBackendConfig{
            spec.name, spec.endpoint, spec.api_key_env, std::chrono::seconds(spec.timeout_s)});
        if (spec.rate_limit_per_sec > 0) limiter.emplace(spec.rate_limit_per_sec, std::max(1.0, spec.rate_limit_per_sec));
        opts.retry.max_attempts = spec.retries;
        opts.max_in_flight = spec.max_in_flight;
        opts.params.model_id = a.model;
    }
    if (a.max_in_flight > 0) opts.max_in_flight = a.max_in_flight;
    opts.params.validate();

    const auto docs = load_docs_warn(a.docs, err);

    std::optional<ResponseCache> cache;
    if (!a.no_cache) cache.emplace(g.cache.empty() ? cfg.cache_root : fs::path(g.cache));

    elicit::ElicitRun run;
    try {
        run = elicit::run_elicitation(*backend, cache ? &*cache : nullptr, docs.docs, templates, opts,
                                      limiter ? &*limiter : nullptr);
    } catch (const elicit::ElicitError& e) {
        throw AnalysisFailure(e.what());
    }

    std::ostringstream body;
    elicit::write_bias(body, run.records);
    write_file(a.out, body.str());

    for (const auto& w : run.summary.warnings) fmt::print(err, "warning: {}\n", w);
    for (const auto& e : run.summary.errors) fmt::print(err, "error: {}\n", e);
    const auto& s = run.summary;
    fmt::print(out, "elicit: docs={} records={} valid_pairs={} excluded={} failed={} backend_requests={} cache_hits={}\n",
               s.docs, run.records.size(), s.valid_pairs, s.excluded, s.failed, s.backend_requests, s.cache_hits);
    fmt::print(out, "wrote {}\n", a.out);
    return s.failed > 0 ? kAnalysisFailure : kSuccess;
}

// ---- report ----------------------------------------------------------------

struct ReportArgs {
    std::vector<std::string> files;
    std::string format = "text";
    std::string out_dir;
};

int cmd_report(const ReportArgs& a, std::ostream& out, std::ostream& err) {
    const auto records = load_bias_files(a.files, err);
    std::vector<analytics::BiasDistribution> dists;
    for (const auto& group : analytics::split_by_model(records)) dists.push_back(analytics::distribution(group));
    if (dists.empty()) fmt::print(err, "warning: no records; the table is empty\n");

    if (a.format == "latex") {
        out << analytics::render_distribution_latex(dists);
    } else if (a.format == "csv") {
        out << analytics::distribution_csv(dists);
    } else {
        out << analytics::render_distribution_text(dists);
    }
    if (!a.out_dir.empty()) write_file(fs::path(a.out_dir) / "distribution.csv", analytics::distribution_csv(dists));
    return kSuccess;
}

// ---- bias ------------------------------------------------------------------

struct BiasArgs {
    std::vector<std::string> files;
    std::string out;
};

int cmd_bias(const BiasArgs& a, std::ostream& out, std::ostream& err) {
    const auto records = load_bias_files(a.files, err);

    fmt::print(out, "model_id,records,valid,excluded,positive,neutral,negative,mean_beta\n");
    for (const auto& group : analytics::split_by_model(records)) {
        std::array<std::size_t, 3> n{};
        std::size_t valid = 0;
        long sum = 0;
        for (const auto& r : group) {
            if (!r.beta) continue;
            ++valid;
            sum += *r.beta;
            ++n[static_cast<std::size_t>(analytics::classify(*r.beta))];
        }
        const auto mean = valid > 0 ? format_double(static_cast<double>(sum) / static_cast<double>(valid)) : "";
        fmt::print(out, "{},{},{},{},{},{},{},{}\n", group.front().model_id, group.size(), valid, group.size() - valid,
                   n[0], n[1], n[2], mean);
    }

    if (!a.out.empty()) {
        std::string body = "company_id,fiscal_period,model_id,s_u,s_b,beta,group\n";
        const auto cell = [](const elicit::ScoreOutcome& s) { return s.is_valid() ? std::to_string(s.score()) : ""; };
        for (const auto& r : records) {
            body += fmt::format("{},{},{},{},{},{},{}\n", r.company_id, r.fiscal_period, r.model_id, cell(r.s_u),
                                cell(r.s_b), r.beta ? std::to_string(*r.beta) : "",
                                r.beta ? analytics::group_name(analytics::classify(*r.beta)) : "excluded");
        }
        write_file(a.out, body);
    }
    return kSuccess;
}

// ---- exposure --------------------------------------------------------------

struct ExposureArgs {
    std::vector<std::string> bias;
    std::string docs;
    std::string exposures;
    std::string out_dir = ".";
    std::optional<double> bold_threshold;
};

int cmd_exposure(const Globals& g, const ExposureArgs& a, std::ostream& out, std::ostream& err) {
    const auto cfg = load_config(g);
    const fs::path out_path = fs::path(a.out_dir) / "exposures.csv";
    if (same_file(out_path, a.exposures)) {
        throw ConfigError(fmt::format("output '{}' would overwrite the exposure input", out_path.string()));
    }

    const auto records = load_bias_files(a.bias, err);
    const auto docs = load_docs_warn(a.docs, err);
    const auto store = load_input(a.exposures, lmbias::load_exposures);

    std::map<std::pair<std::string, std::string>, const PerformanceDoc*> by_event;
    for (const auto& d : docs.docs) by_event[{d.company_id, d.fiscal_period}] = &d;

    std::size_t unmatched_docs = 0;
    const analytics::ExposureLookup lookup = [&](const elicit::BiasRecord& r) -> std::optional<ExposureVector> {
        const auto it = by_event.find({r.company_id, r.fiscal_period});
        if (it == by_event.end()) {
            ++unmatched_docs;
            return std::nullopt;
        }
        return exposure_at_announcement(*it->second, store);
    };

    analytics::ExposureDisplay display;
    display.bold_threshold = a.bold_threshold.value_or(cfg.analysis.bold_threshold);

    std::vector<analytics::ExposureSummary> summaries;
    std::size_t matched = 0;
    for (const auto& group : analytics::split_by_model(records)) {
        auto s = analytics::exposure_summary(group, lookup);
        for (const auto& ge : s.groups) matched += ge.n;
        if (s.dropped_no_exposure > 0) {
            fmt::print(err, "warning: {}: {} records without an exposure vector\n", s.model_id, s.dropped_no_exposure);
        }
        fmt::print(out, "## {}\n{}\n", s.model_id, analytics::render_exposure_table(s, display));
        summaries.push_back(std::move(s));
    }
    if (unmatched_docs > 0) fmt::print(err, "warning: {} records have no matching document\n", unmatched_docs);
    if (matched == 0) {
        throw AnalysisFailure("no bias records could be joined to an exposure vector");
    }
    fmt::print(out, "## spread (positive - negative)\n{}", analytics::render_spread_table(summaries));
    write_file(out_path, analytics::exposure_csv(summaries));
    fmt::print(out, "wrote {}\n", out_path.string());
    return kSuccess;
}

// ---- eventstudy ------------------------------------------------------------

struct EventStudyArgs {
    std::vector<std::string> bias;
    std::string docs;
    std::string returns;
    std::string factors;
    std::string calendar;
    std::string out_dir = ".";
    std::optional<std::size_t> min_obs;
    std::vector<int> horizons;
    std::string cutoff;
    bool sign_test = false;
    bool exclude_overlapping = false;
};

int cmd_eventstudy(const Globals& g, const EventStudyArgs& a, std::ostream& out, std::ostream& err) {
    auto cfg = load_config(g);
    if (!a.horizons.empty()) cfg.analysis.horizons = a.horizons;
    if (a.min_obs) cfg.analysis.min_obs = *a.min_obs;
    if (a.sign_test) cfg.analysis.significance = eventstudy::TestMethod::Sign;
    if (a.exclude_overlapping) cfg.analysis.exclude_overlapping = true;
    if (!a.cutoff.empty()) cfg.cutoff = parse_clock_time(a.cutoff);
    cfg.validate();

    eventstudy::EventStudyConfig es;
    es.window.min_obs = cfg.analysis.min_obs;
    es.car.horizons = cfg.analysis.horizons;
    es.car.method = cfg.analysis.significance;
    es.car.max_day = std::max(es.window.max_day, cfg.analysis.horizons.back());
    es.window.max_day = es.car.max_day;
    es.day_zero.close_cutoff = cfg.cutoff;
    es.exclude_overlapping = cfg.analysis.exclude_overlapping;

    const auto records = load_bias_files(a.bias, err);
    const auto docs = load_docs_warn(a.docs, err);
    const auto returns = load_input(a.returns, lmbias::load_returns);
    const auto factors = load_input(a.factors, lmbias::load_factors);
    const auto calendar = load_input(a.calendar, lmbias::load_calendar);

    std::vector<eventstudy::EventStudyResult> results;
    std::size_t used = 0;
    std::size_t skipped = 0;
    for (const auto& group : analytics::split_by_model(records)) {
        auto run = eventstudy::run_event_study(group, docs.docs, returns, factors, calendar, es);
        used += run.events_used;
        skipped += run.skipped.size();
        for (const auto& s : run.skipped) {
            fmt::print(err, "skipped {} [{}]: {}\n", s.event_id, group.front().model_id, s.reason);
        }
        for (auto& r : run.results) results.push_back(std::move(r));
    }
    if (used == 0) {
        throw AnalysisFailure(fmt::format("no events after joins ({} records, {} skipped)", records.size(), skipped));
    }

    out << eventstudy::render_car_tables(results);
    const fs::path dir(a.out_dir);
    write_file(dir / "car_table.csv", eventstudy::car_table_csv(results));
    write_file(dir / "car_path.csv", eventstudy::car_path_csv(results, es.car.max_day));
    fmt::print(out, "events used: {}, skipped: {}\nwrote {} and {}\n", used, skipped, (dir / "car_table.csv").string(),
               (dir / "car_path.csv").string());
    return kSuccess;
}

// ---- simulate / verify-theorem ---------------------------------------------

void add_param_flags(CLI::App* sub, market::MarketParams& p) {
    sub->add_option("--mu", p.mu, "fraction of biased investors")->capture_default_str();
    sub->add_option("--gamma", p.gamma, "risk aversion")->capture_default_str();
    sub->add_option("--r", p.r, "risk-free rate")->capture_default_str();
    sub->add_option("--theta", p.theta, "AR coefficient of the bias variance")->capture_default_str();
    sub->add_option("--sigma2-eta", p.sigma2_eta, "variance of the innovation")->capture_default_str();
    sub->add_option("--beta-hat", p.beta_hat, "long-run mean bias")->capture_default_str();
}

struct SimulateArgs {
    market::MarketParams params;
    std::optional<double> beta0;
    std::optional<double> sigma2_0;
    std::size_t horizon = 250;
    std::size_t paths = 100;
    std::string out = "paths.csv";
};

int cmd_simulate(const Globals& g, const SimulateArgs& a, std::ostream& out, std::ostream& err) {
    a.params.validate();
    market::MarketState init;
    init.beta_t = a.beta0.value_or(a.params.beta_hat);
    // stationary mean of the variance process unless given
    init.sigma2_beta_t = a.sigma2_0.value_or(a.params.sigma2_eta / (1.0 - a.params.theta));
    if (init.sigma2_beta_t < 0) throw ValidationError("--sigma2-0 must be >= 0");

    const auto e = market::simulate_paths(a.params, init, a.horizon, a.paths, g.seed);
    std::ostringstream body;
    market::write_paths_csv(body, e);
    write_file(a.out, body.str());

    double mean_p = 0.0;
    for (double v : e.p_star) mean_p += v;
    mean_p /= static_cast<double>(e.p_star.size());
    const auto k = market::derived_constants(a.params);
    fmt::print(out, "simulate: paths={} horizon={} seed={} A={:.6g} B={:.6g} mean_p_star={:.6f} clamped_fraction={:.4f}\n",
               e.n_paths, e.horizon, g.seed, k.state_loading, k.constant_loading, mean_p, e.clamped_fraction());
    if (e.clamped_fraction() > 0.1) {
        fmt::print(err, "warning: {:.1f}% of variance draws were negative and clamped to 0\n", 100 * e.clamped_fraction());
    }
    fmt::print(out, "wrote {}\n", a.out);
    return kSuccess;
}

struct VerifyArgs {
    std::vector<double> mu{0.0, 0.3, 0.7};
    std::vector<double> gamma{0.5, 1.0, 2.0};
    std::vector<double> theta{0.2, 0.5, 0.8};
    std::vector<double> r{0.01, 0.05, 0.1};
    double sigma2_eta = 0.0;
    double beta_t = 0.03;
    double beta_hat = 0.02;
    double sigma2_beta = 0.01;
    std::size_t draws = 1'000'000;
    double perturb_a = 0.0;
    double tolerance = 1e-10;
    double fixed_point_tolerance = 1e-12;
    double z = 3.0;
    std::string out;
};

int cmd_verify(const Globals& g, const VerifyArgs& a, std::ostream& out, std::ostream& err) {
    const market::MarketState state{a.beta_t, a.sigma2_beta};
    if (a.sigma2_eta > 0 && a.draws < 10'000) throw ConfigError("--draws must be at least 10000");
    if (a.perturb_a != 0.0) fmt::print(err, "warning: loading A perturbed by {}; failures are expected\n", a.perturb_a);

    std::string csv = "mu,gamma,theta,r,closed_form,clearing,residual,standard_error,fp_state,fp_constant,passed\n";
    fmt::print(out, "{:>5} {:>5} {:>5} {:>5} {:>12} {:>12} {:>10} {:>10} {:>10}  status\n", "mu", "gamma", "theta", "r",
               "closed_form", "residual", "se", "fp_A", "fp_B");
    std::size_t total = 0;
    std::size_t passed = 0;
    for (double mu : a.mu) {
        for (double gamma : a.gamma) {
            for (double theta : a.theta) {
                for (double r : a.r) {
                    market::MarketParams p{mu, gamma, r, theta, a.sigma2_eta, a.beta_hat};
                    p.validate();
                    auto k = market::derived_constants(p);
                    k.state_loading *= 1.0 + a.perturb_a;
                    const auto fp = market::fixed_point_residuals(p, k);
                    const auto rep = a.sigma2_eta == 0.0
                                         ? market::exact_one_step(p, state, k, a.tolerance)
                                         : market::one_step_consistency(p, state, k, a.draws,
                                                                        market::substream_seed(g.seed, total), a.z);
                    const bool ok = rep.passed && std::abs(fp.state) < a.fixed_point_tolerance &&
                                    std::abs(fp.constant) < a.fixed_point_tolerance;
                    ++total;
                    passed += ok ? 1 : 0;
                    fmt::print(out, "{:>5} {:>5} {:>5} {:>5} {:>12.8f} {:>12.3e} {:>10.3e} {:>10.3e} {:>10.3e}  {}\n", mu,
                               gamma, theta, r, rep.closed_form, rep.residual, rep.standard_error, fp.state, fp.constant,
                               ok ? "ok" : "FAIL");
                    csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", format_double(mu), format_double(gamma),
                                       format_double(theta), format_double(r), format_double(rep.closed_form),
                                       format_double(rep.clearing), format_double(rep.residual),
                                       format_double(rep.standard_error), format_double(fp.state),
                                       format_double(fp.constant), ok ? 1 : 0);
                }
            }
        }
    }
    fmt::print(out, "verify-theorem: {}/{} points passed\n", passed, total);
    if (!a.out.empty()) write_file(a.out, csv);
    return passed == total ? kSuccess : kAnalysisFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Company-level sentiment bias toolkit", "lmbias"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "lmbias 0.1.0");

    Globals g;
    app.add_option("--config", g.config, "JSON run configuration");
    app.add_option("--seed", g.seed, "master seed for stochastic commands")->capture_default_str();
    app.add_option("--cache", g.cache, "response cache directory (overrides the config)");

    ElicitArgs ea;
    auto* elicit = app.add_subcommand("elicit", "score documents with a model and write bias.jsonl");
    elicit->add_option("--docs", ea.docs, "documents (JSONL)")->required();
    elicit->add_option("--backend", ea.backend, "'mock' or a backend defined in the config")->required();
    elicit->add_option("--model", ea.model, "model id sent to the backend");
    elicit->add_option("--out", ea.out, "output file")->capture_default_str();
    elicit->add_option("--templates", ea.templates, "prompt template JSON");
    elicit->add_option("--temperature", ea.temperature)->capture_default_str();
    elicit->add_option("--max-tokens", ea.max_tokens)->capture_default_str();
    elicit->add_option("--max-in-flight", ea.max_in_flight, "concurrent requests (default from config, else 4)");
    elicit->add_flag("--fail-fast", ea.fail_fast, "abort on the first failed request");
    elicit->add_flag("--scan-past-invalid", ea.scan_past_invalid, "skip out-of-range integers when parsing");
    elicit->add_flag("--no-cache", ea.no_cache, "bypass the response cache");

    ReportArgs ra;
    auto* report = app.add_subcommand("report", "bias distribution table per model");
    report->add_option("files", ra.files, "bias.jsonl files")->required();
    report->add_option("--format", ra.format)->check(CLI::IsMember({"text", "latex", "csv"}))->capture_default_str();
    report->add_option("--out-dir", ra.out_dir, "also write distribution.csv here");

    BiasArgs ba;
    auto* bias = app.add_subcommand("bias", "per-model bias group summary");
    bias->add_option("files", ba.files, "bias.jsonl files")->required();
    bias->add_option("--out", ba.out, "write per-record groups (CSV)");

    ExposureArgs xa;
    auto* exposure = app.add_subcommand("exposure", "mean factor exposure per bias group");
    exposure->add_option("--bias", xa.bias, "bias.jsonl files")->required();
    exposure->add_option("--docs", xa.docs)->required();
    exposure->add_option("--exposures", xa.exposures, "exposure CSV")->required();
    exposure->add_option("--out-dir", xa.out_dir)->capture_default_str();
    exposure->add_option("--bold-threshold", xa.bold_threshold, "highlight |spread| at or above this");

    EventStudyArgs sa;
    auto* es = app.add_subcommand("eventstudy", "cumulative abnormal returns per bias group");
    es->add_option("--bias", sa.bias, "bias.jsonl files")->required();
    es->add_option("--docs", sa.docs)->required();
    es->add_option("--returns", sa.returns)->required();
    es->add_option("--factors", sa.factors)->required();
    es->add_option("--calendar", sa.calendar)->required();
    es->add_option("--out-dir", sa.out_dir)->capture_default_str();
    es->add_option("--min-obs", sa.min_obs, "minimum estimation-window observations");
    es->add_option("--horizons", sa.horizons, "CAR horizons in trading days")->delimiter(',');
    es->add_option("--cutoff", sa.cutoff, "local close time HH:MM");
    es->add_flag("--sign-test", sa.sign_test, "use the sign test for group CARs");
    es->add_flag("--exclude-overlapping", sa.exclude_overlapping);

    SimulateArgs ma;
    auto* simulate = app.add_subcommand("simulate", "simulate bias, variance and price paths");
    add_param_flags(simulate, ma.params);
    simulate->add_option("--beta0", ma.beta0, "initial bias (default: --beta-hat)");
    simulate->add_option("--sigma2-0", ma.sigma2_0, "initial bias variance (default: stationary mean)");
    simulate->add_option("--horizon", ma.horizon)->capture_default_str();
    simulate->add_option("--paths", ma.paths)->capture_default_str();
    simulate->add_option("--out", ma.out)->capture_default_str();

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify-theorem", "check the closed-form price against market clearing");
    verify->add_option("--mu", va.mu)->delimiter(',')->capture_default_str();
    verify->add_option("--gamma", va.gamma)->delimiter(',')->capture_default_str();
    verify->add_option("--theta", va.theta)->delimiter(',')->capture_default_str();
    verify->add_option("--r", va.r)->delimiter(',')->capture_default_str();
    verify->add_option("--sigma2-eta", va.sigma2_eta, "0 gives the exact check, > 0 Monte Carlo")->capture_default_str();
    verify->add_option("--beta-t", va.beta_t)->capture_default_str();
    verify->add_option("--beta-hat", va.beta_hat)->capture_default_str();
    verify->add_option("--sigma2-beta", va.sigma2_beta)->capture_default_str();
    verify->add_option("--draws", va.draws)->capture_default_str();
    verify->add_option("--tolerance", va.tolerance)->capture_default_str();
    verify->add_option("--z", va.z, "Monte Carlo acceptance in standard errors")->capture_default_str();
    verify->add_option("--perturb-a", va.perturb_a, "debug: scale A by (1 + x)")->group("Debug");
    verify->add_option("--out", va.out, "write the residual report as CSV");

    for (auto* sub : {elicit, report, bias, exposure, es, simulate, verify}) sub->fallthrough();

    std::vector<const char*> argv{"lmbias"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsageError;
    }

    try {
        if (elicit->parsed()) return cmd_elicit(g, ea, out, err);
        if (report->parsed()) return cmd_report(ra, out, err);
        if (bias->parsed()) return cmd_bias(ba, out, err);
        if (exposure->parsed()) return cmd_exposure(g, xa, out, err);
        if (es->parsed()) return cmd_eventstudy(g, sa, out, err);
        if (simulate->parsed()) return cmd_simulate(g, ma, out, err);
        if (verify->parsed()) return cmd_verify(g, va, out, err);
    } catch (const AnalysisFailure& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kAnalysisFailure;
    } catch (const Error& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kUsageError;
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kAnalysisFailure;
    }
    return kUsageError;
}

}  // namespace lmbias::cli
