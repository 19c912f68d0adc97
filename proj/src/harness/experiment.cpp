#include "refine_search/harness/experiment.hpp"

#include "refine_search/core/parallel.hpp"
#include "refine_search/core/trace_io.hpp"
#include "refine_search/gateway/http_backend.hpp"
#include "refine_search/gateway/mock_backend.hpp"
#include "refine_search/strategies/strategies.hpp"

#include <fmt/format.h>
#include <toml.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace refine_search::harness {

namespace fs = std::filesystem;

void ExperimentSpec::validate() const {
    if (dataset.empty()) throw Error("experiment spec needs a dataset");
    if (runs < 1) throw Error("runs must be >= 1");
    if (parallelism < 1) throw Error("parallelism must be >= 1");
    if (strategies.empty()) throw Error("experiment spec needs at least one strategy");
    if (max_failure_fraction < 0.0 || max_failure_fraction > 1.0) throw Error("max_failure_fraction must lie in [0,1]");
    std::set<std::string> labels;
    for (const auto& s : strategies) {
        s.validate();
        if (!labels.insert(s.effective_label()).second) {
            throw Error(fmt::format("duplicate strategy label '{}'", s.effective_label()));
        }
        if (s.budget_k != strategies.front().budget_k) throw Error("all strategies must share one budget_k");
    }
    if (backend.kind != "mock" && backend.kind != "http") throw Error(fmt::format("unknown backend '{}'", backend.kind));
    if (runner.command.empty()) throw Error("sandbox command must not be empty");
}

int ExperimentSpec::budget_k() const { return strategies.empty() ? 0 : strategies.front().budget_k; }

namespace {

nlohmann::json toml_node_to_json(const toml::node& node) {
    if (const auto* t = node.as_table()) {
        nlohmann::json out = nlohmann::json::object();
        for (const auto& [k, v] : *t) out[std::string(k.str())] = toml_node_to_json(v);
        return out;
    }
    if (const auto* a = node.as_array()) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& v : *a) out.push_back(toml_node_to_json(v));
        return out;
    }
    if (const auto* s = node.as_string()) return s->get();
    if (const auto* i = node.as_integer()) return i->get();
    if (const auto* f = node.as_floating_point()) return f->get();
    if (const auto* b = node.as_boolean()) return b->get();
    std::ostringstream text;  // dates and times
    node.visit([&](const auto& v) { text << v; });
    return text.str();
}

fs::path resolve(const fs::path& base, const fs::path& p) {
    if (p.empty() || p.is_absolute() || base.empty()) return p;
    return base / p;
}

std::string safe_id(std::string_view task_id) {
    std::string out(task_id);
    for (char& c : out) {
        if (c == '/' || c == '\\' || c == ':') c = '_';
    }
    return out;
}

}  // namespace

nlohmann::json toml_to_json(std::string_view toml_text) {
    try {
        return toml_node_to_json(toml::parse(toml_text));
    } catch (const toml::parse_error& e) {
        const auto& where = e.source().begin;
        throw Error(fmt::format("TOML parse error at line {}, column {}: {}", where.line, where.column,
                                e.description()));
    }
}

BackendSpec backend_spec_from_json(const nlohmann::json& b, const fs::path& base_dir) {
    BackendSpec spec;
    try {
        spec.kind = b.value("kind", spec.kind);
        if (b.contains("script")) spec.script = resolve(base_dir, b["script"].get<std::string>());
        spec.base_url = b.value("base_url", spec.base_url);
        spec.model = b.value("model", spec.model);
        spec.api_key_env = b.value("api_key_env", spec.api_key_env);
        spec.timeout_ms = b.value("timeout_ms", spec.timeout_ms);
        if (b.contains("templates_dir")) spec.templates_dir = resolve(base_dir, b["templates_dir"].get<std::string>());
        spec.init_prompt_suffixes = b.value("init_prompt_suffixes", spec.init_prompt_suffixes);
    } catch (const nlohmann::json::exception& e) {
        throw Error(fmt::format("invalid backend settings: {}", e.what()));
    }
    return spec;
}

sandbox::RunnerOptions runner_options_from_json(const nlohmann::json& s) {
    sandbox::RunnerOptions o;
    try {
        o.command = s.value("command", o.command);
        o.pool_size = s.value("pool_size", o.pool_size);
        o.grace_ms = s.value("grace_ms", o.grace_ms);
        o.startup_timeout_ms = s.value("startup_timeout_ms", o.startup_timeout_ms);
    } catch (const nlohmann::json::exception& e) {
        throw Error(fmt::format("invalid sandbox settings: {}", e.what()));
    }
    if (o.command.empty()) throw Error("sandbox command is empty");
    if (o.pool_size < 1) throw Error("sandbox pool_size must be >= 1");
    return o;
}

ExperimentSpec experiment_spec_from_json(const nlohmann::json& doc, const fs::path& base_dir) {
    ExperimentSpec spec;
    try {
        spec.dataset = resolve(base_dir, doc.at("dataset").get<std::string>());
        if (doc.contains("format")) spec.format = dataset_format_from_string(doc["format"].get<std::string>());
        spec.runs = doc.value("runs", spec.runs);
        spec.parallelism = doc.value("parallelism", spec.parallelism);
        spec.output_dir = resolve(base_dir, doc.value("output", std::string("out")));
        spec.seed = doc.value("seed", spec.seed);
        spec.validation_per_strategy = doc.value("validation_per_strategy", spec.validation_per_strategy);
        spec.max_failure_fraction = doc.value("max_failure_fraction", spec.max_failure_fraction);
        if (doc.contains("backend")) spec.backend = backend_spec_from_json(doc["backend"], base_dir);
        if (doc.contains("sandbox")) spec.runner = runner_options_from_json(doc["sandbox"]);
        for (const auto& s : doc.at("strategies")) spec.strategies.push_back(strategies::strategy_config_from_json(s));
    } catch (const nlohmann::json::exception& e) {
        throw Error(fmt::format("invalid experiment spec: {}", e.what()));
    }
    spec.validate();
    return spec;
}

nlohmann::json load_spec_document(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(fmt::format("cannot read experiment spec {}", path.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    const auto text = buf.str();
    if (path.extension() == ".toml") return toml_to_json(text);
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(fmt::format("{}: {}", path.string(), e.what()));
    }
}

ExperimentSpec load_experiment_spec(const fs::path& path) {
    return experiment_spec_from_json(load_spec_document(path), path.parent_path());
}

nlohmann::json to_json(const ExperimentSpec& spec) {
    nlohmann::json strategies = nlohmann::json::array();
    for (const auto& s : spec.strategies) strategies.push_back(strategies::to_json(s));
    return {{"dataset", spec.dataset.string()},
            {"runs", spec.runs},
            {"parallelism", spec.parallelism},
            {"output", spec.output_dir.string()},
            {"seed", spec.seed},
            {"validation_per_strategy", spec.validation_per_strategy},
            {"max_failure_fraction", spec.max_failure_fraction},
            {"backend",
             {{"kind", spec.backend.kind},
              {"script", spec.backend.script.string()},
              {"base_url", spec.backend.base_url},
              {"model", spec.backend.model},
              {"api_key_env", spec.backend.api_key_env},
              {"timeout_ms", spec.backend.timeout_ms},
              {"templates_dir", spec.backend.templates_dir.string()},
              {"init_prompt_suffixes", spec.backend.init_prompt_suffixes}}},
            {"sandbox",
             {{"command", spec.runner.command},
              {"pool_size", spec.runner.pool_size},
              {"grace_ms", spec.runner.grace_ms},
              {"startup_timeout_ms", spec.runner.startup_timeout_ms}}},
            {"strategies", strategies}};
}

std::shared_ptr<gateway::Backend> make_backend(const BackendSpec& spec) {
    if (spec.kind == "mock") {
        if (spec.script.empty()) throw Error("mock backend needs a script");
        return std::make_shared<gateway::MockBackend>(gateway::MockScript::load(spec.script));
    }
    if (spec.kind == "http") {
        gateway::HttpBackendOptions o;
        o.base_url = spec.base_url;
        o.model = spec.model;
        if (const char* key = std::getenv(spec.api_key_env.c_str())) o.api_key = key;
        o.timeout = std::chrono::milliseconds(spec.timeout_ms);
        return std::make_shared<gateway::HttpBackend>(std::move(o));
    }
    throw Error(fmt::format("unknown backend '{}'", spec.kind));
}

gateway::Gateway make_gateway(const BackendSpec& spec) {
    auto templates = spec.templates_dir.empty() ? gateway::PromptTemplates::builtin()
                                                : gateway::PromptTemplates::load_directory(spec.templates_dir);
    auto options = spec.kind == "mock" ? gateway::GatewayOptions::for_mock() : gateway::GatewayOptions{};
    options.init_prompt_suffixes = spec.init_prompt_suffixes;
    return gateway::Gateway(make_backend(spec), std::move(templates), std::move(options));
}

fs::path trace_dir(const ExperimentSpec& spec) { return spec.output_dir / "traces"; }

int materialize_hidden_verdicts(SearchTrace& trace, const Task& task, sandbox::Executor& executor, int timeout_ms) {
    int computed = 0;
    for (auto& n : trace.nodes) {
        if (n.hidden_result) continue;
        n.hidden_result = sandbox::hidden_verdict(executor, n.source, task, timeout_ms);
        ++computed;
    }
    return computed;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(fmt::format("cannot write {}", path.string()));
        out << text;
    }
    fs::rename(tmp, path);
}

std::vector<TestCase> load_tests(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(fmt::format("cannot read {}", path.string()));
    return nlohmann::json::parse(in).get<std::vector<TestCase>>();
}

struct Job {
    int run = 0;
    std::size_t strategy = 0;
    std::size_t task = 0;
    fs::path path;
};

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, const gateway::Gateway& gateway,
                                sandbox::Executor& executor, const ProgressFn& progress) {
    spec.validate();
    const auto say = [&](const std::string& msg) {
        if (progress) progress(msg);
    };
    auto tasks = load_dataset(spec.dataset, spec.format);
    if (tasks.empty()) throw Error(fmt::format("dataset {} has no tasks", spec.dataset.string()));
    std::set<std::string> ids;
    for (const auto& t : tasks) {
        validate_task(t);
        if (!ids.insert(t.task_id).second) throw Error(fmt::format("duplicate task id '{}'", t.task_id));
    }
    const auto traces_path = trace_dir(spec);
    const auto validation_path = spec.output_dir / "validation";
    fs::create_directories(traces_path);
    fs::create_directories(validation_path);

    ExperimentResult result;
    std::vector<Job> all_jobs;
    std::vector<std::size_t> pending;
    for (int r = 0; r < spec.runs; ++r) {
        const auto seed = spec.seed + static_cast<std::uint64_t>(r);
        for (std::size_t s = 0; s < spec.strategies.size(); ++s) {
            for (std::size_t t = 0; t < tasks.size(); ++t) {
                Job job{r, s, t, traces_path / trace_file_name(tasks[t].task_id,
                                                                spec.strategies[s].effective_label(), seed)};
                if (!fs::exists(job.path)) pending.push_back(all_jobs.size());
                all_jobs.push_back(std::move(job));
            }
        }
    }
    result.jobs = all_jobs.size();
    result.traces_reused = all_jobs.size() - pending.size();
    say(fmt::format("{} task runs, {} already on disk", all_jobs.size(), result.traces_reused));

    const auto workers = static_cast<std::size_t>(spec.parallelism);
    std::mutex mutex;

    // Shared validation tests, one set per (task, run_seed), cached on disk so
    // resumed experiments score against the same V.
    std::map<std::pair<std::size_t, int>, std::vector<TestCase>> shared_v;
    std::map<std::pair<std::size_t, int>, std::string> v_errors;
    if (!spec.validation_per_strategy) {
        int v_count = 1;
        for (const auto& s : spec.strategies) v_count = std::max(v_count, s.validation_test_count);
        std::vector<std::pair<std::size_t, int>> keys;
        {
            std::set<std::pair<std::size_t, int>> seen;
            for (const auto i : pending) {
                const std::pair key{all_jobs[i].task, all_jobs[i].run};
                if (seen.insert(key).second) keys.push_back(key);
            }
        }
        parallel_for(keys.size(), workers, [&](std::size_t k) {
            const auto [t, r] = keys[k];
            const auto seed = spec.seed + static_cast<std::uint64_t>(r);
            const auto path = validation_path / fmt::format("{}.{}.json", safe_id(tasks[t].task_id), seed);
            try {
                std::vector<TestCase> v;
                if (fs::exists(path)) {
                    v = load_tests(path);
                } else {
                    auto session = gateway.session(tasks[t].task_id);
                    v = session.generate_validation_tests(tasks[t], v_count);
                    write_text(path, nlohmann::json(v).dump(2));
                }
                const std::lock_guard lock(mutex);
                shared_v[keys[k]] = std::move(v);
            } catch (const std::exception& e) {
                const std::lock_guard lock(mutex);
                v_errors[keys[k]] = e.what();
            }
        });
    }

    std::set<std::size_t> failed_jobs;
    parallel_for(pending.size(), workers, [&](std::size_t p) {
        const auto& job = all_jobs[pending[p]];
        Task task = tasks[job.task];
        auto config = spec.strategies[job.strategy];
        config.run_seed = spec.seed + static_cast<std::uint64_t>(job.run);
        try {
            if (!spec.validation_per_strategy) {
                const std::pair key{job.task, job.run};
                std::lock_guard lock(mutex);
                if (const auto it = v_errors.find(key); it != v_errors.end()) {
                    throw Error("validation test generation failed: " + it->second);
                }
                task.validation_tests = shared_v.at(key);
            }
            const strategies::SearchEnv env{gateway, executor};
            auto outcome = strategies::run_strategy(task, config, env);
            materialize_hidden_verdicts(outcome.trace, task, executor, config.timeout_ms);
            save_trace(outcome.trace, job.path);
            const std::lock_guard lock(mutex);
            ++result.traces_generated;
        } catch (const std::exception& e) {
            const std::lock_guard lock(mutex);
            failed_jobs.insert(pending[p]);
            result.failures.push_back({task.task_id, config.effective_label(), config.run_seed, e.what()});
        }
    });
    std::sort(result.failures.begin(), result.failures.end(), [](const TaskFailure& a, const TaskFailure& b) {
        return std::tie(a.label, a.run_seed, a.task_id) < std::tie(b.label, b.run_seed, b.task_id);
    });
    if (!result.failures.empty()) say(fmt::format("warning: {} task runs failed", result.failures.size()));

    // Aggregate from the trace files, which are the source of truth for
    // both fresh and resumed runs.
    std::vector<std::optional<SearchTrace>> loaded(all_jobs.size());
    parallel_for(all_jobs.size(), workers, [&](std::size_t i) {
        if (failed_jobs.contains(i)) return;
        auto trace = load_trace(all_jobs[i].path);
        const auto& job = all_jobs[i];
        if (!trace.hidden_verdicts_complete(trace.nodes.size())) {
            materialize_hidden_verdicts(trace, tasks[job.task], executor, spec.strategies[job.strategy].timeout_ms);
            save_trace(trace, job.path);
        }
        loaded[i] = std::move(trace);
    });

    nlohmann::json strategies_summary = nlohmann::json::array();
    for (std::size_t s = 0; s < spec.strategies.size(); ++s) {
        const auto label = spec.strategies[s].effective_label();
        std::vector<std::vector<SearchTrace>> runs(static_cast<std::size_t>(spec.runs));
        std::size_t failed = 0;
        for (std::size_t i = 0; i < all_jobs.size(); ++i) {
            if (all_jobs[i].strategy != s) continue;
            if (loaded[i]) {
                runs[static_cast<std::size_t>(all_jobs[i].run)].push_back(*loaded[i]);
            } else {
                ++failed;
            }
        }
        std::erase_if(runs, [](const auto& r) { return r.empty(); });
        nlohmann::json entry{{"label", label}, {"config", strategies::to_json(spec.strategies[s])}, {"failed", failed}};
        if (!runs.empty()) {
            auto curve = scaling_curve(label, runs, spec.budget_k());
            write_text(spec.output_dir / fmt::format("curve.{}.csv", label), curve_csv(curve));
            entry["curve"] = to_json(curve);
            entry["runs_aggregated"] = runs.size();
            result.curves.push_back(std::move(curve));
        }
        strategies_summary.push_back(std::move(entry));
    }

    nlohmann::json failures = nlohmann::json::array();
    for (const auto& f : result.failures) {
        failures.push_back({{"task_id", f.task_id}, {"label", f.label}, {"run_seed", f.run_seed}, {"error", f.error}});
    }
    const double failure_fraction = static_cast<double>(result.failures.size()) / static_cast<double>(result.jobs);
    const bool aborted = failure_fraction > spec.max_failure_fraction;
    result.summary = {{"spec", to_json(spec)},
                      {"tasks", tasks.size()},
                      {"jobs", result.jobs},
                      {"traces_generated", result.traces_generated},
                      {"traces_reused", result.traces_reused},
                      {"failure_fraction", failure_fraction},
                      {"aborted", aborted},
                      {"failures", failures},
                      {"strategies", strategies_summary}};
    write_text(spec.output_dir / "summary.json", result.summary.dump(2));
    if (aborted) {
        throw Error(fmt::format("{} of {} task runs failed ({:.1f}% > {:.1f}%); see {}", result.failures.size(),
                                result.jobs, 100.0 * failure_fraction, 100.0 * spec.max_failure_fraction,
                                (spec.output_dir / "summary.json").string()));
    }
    return result;
}

}  // namespace refine_search::harness
