#include "cli_config.hpp"

#include "refine_search/analysis/depth.hpp"
#include "refine_search/analysis/diversity.hpp"
#include "refine_search/core/parallel.hpp"
#include "refine_search/core/trace_io.hpp"
#include "refine_search/harness/experiment.hpp"
#include "refine_search/vspace/checks.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace refine_search;

namespace {

// Thrown by a command that ran to completion but found violations or failures.
struct Unsuccessful {};

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error(fmt::format("cannot write {}", path.string()));
    out << text;
}

void check_format(const std::string& format, std::initializer_list<std::string_view> allowed) {
    for (const auto a : allowed) {
        if (format == a) return;
    }
    throw Error(fmt::format("--format {} is not available for this command", format));
}

std::vector<SearchTrace> load_traces(const std::vector<std::string>& inputs) {
    const auto files = collect_trace_files(inputs);
    if (files.empty()) throw Error("no trace files found");
    std::vector<SearchTrace> traces;
    traces.reserve(files.size());
    for (const auto& f : files) traces.push_back(load_trace(f));
    return traces;
}

// ---- shared experiment settings ------------------------------------------

struct Overrides {
    std::string spec;
    std::optional<int> jobs;
    std::optional<std::uint64_t> seed;
    std::optional<int> runs;
    std::string output;
    std::string runner;
    std::string backend;
    std::string base_url;
    std::string model;

    void add_to(CLI::App& cmd, bool spec_required) {
        auto* opt = cmd.add_option("--spec", spec, "experiment spec (.toml or .json)")->check(CLI::ExistingFile);
        if (spec_required) opt->required();
        cmd.add_option("--jobs", jobs, "worker threads (default: machine parallelism, at most 8)")
            ->check(CLI::PositiveNumber);
        cmd.add_option("--seed", seed, "base seed; run r uses seed + r");
        cmd.add_option("--runs", runs, "independent runs per task")->check(CLI::PositiveNumber);
        cmd.add_option("--output", output, "output directory");
        cmd.add_option("--runner", runner, "exec-runner command line");
        cmd.add_option("--backend", backend, "mock | http");
        cmd.add_option("--base-url", base_url, "chat completions base URL");
        cmd.add_option("--model", model, "model name for the http backend");
    }

    [[nodiscard]] std::map<std::string, std::string> flags() const {
        std::map<std::string, std::string> f;
        if (jobs) f["/parallelism"] = std::to_string(*jobs);
        if (seed) f["/seed"] = std::to_string(*seed);
        if (runs) f["/runs"] = std::to_string(*runs);
        if (!output.empty()) f["/output"] = fs::absolute(output).string();
        if (!runner.empty()) f["/sandbox/command"] = runner;
        if (!backend.empty()) f["/backend/kind"] = backend;
        if (!base_url.empty()) f["/backend/base_url"] = base_url;
        if (!model.empty()) f["/backend/model"] = model;
        return f;
    }

    [[nodiscard]] fs::path base_dir() const { return spec.empty() ? fs::current_path() : fs::path(spec).parent_path(); }

    [[nodiscard]] cli::ResolvedConfig resolve() const {
        const json doc = spec.empty() ? json::object() : harness::load_spec_document(spec);
        auto resolved = cli::resolve_config(doc, flags(), cli::process_env());
        // one runner per worker unless the spec sizes the pool itself
        const json::json_pointer pool("/sandbox/pool_size");
        if (!resolved.doc.contains(pool)) resolved.doc[pool] = resolved.doc.at("/parallelism"_json_pointer);
        return resolved;
    }
};

// ---- run ------------------------------------------------------------------

void print_curves(const harness::ExperimentResult& result, const std::string& format) {
    if (format == "json") {
        std::cout << result.summary.dump(2) << "\n";
        return;
    }
    if (format == "csv") {
        std::cout << "label,j,mean,ci_half_width\n";
        for (const auto& c : result.curves) {
            for (const auto& p : c.points) std::cout << fmt::format("{},{},{:.6f},{:.6f}\n", c.label, p.j, p.mean, p.half_width);
        }
        return;
    }
    std::size_t width = 8;
    for (const auto& c : result.curves) width = std::max(width, c.label.size());
    std::cout << fmt::format("{:<{}}  {:>16}  {:>16}\n", "strategy", width, "Pass@1", "Pass@k");
    for (const auto& c : result.curves) {
        if (c.points.empty()) continue;
        const auto& a = c.points.front();
        const auto& b = c.points.back();
        std::cout << fmt::format("{:<{}}  {:>16}  {:>16}\n", c.label, width,
                                 fmt::format("{:.3f} ± {:.3f}", a.mean, a.half_width),
                                 fmt::format("{:.3f} ± {:.3f}", b.mean, b.half_width));
    }
    std::cout << fmt::format("traces: {} generated, {} reused; failures: {}\n", result.traces_generated,
                             result.traces_reused, result.failures.size());
    for (const auto& f : result.failures) {
        std::cout << fmt::format("  failed {} [{}] seed {}: {}\n", f.task_id, f.label, f.run_seed, f.error);
    }
}

int cmd_run(const Overrides& o, const std::string& format, bool quiet) {
    check_format(format, {"table", "json", "csv"});
    const auto resolved = o.resolve();
    const auto spec = harness::experiment_spec_from_json(resolved.doc, o.base_dir());
    const auto gateway = harness::make_gateway(spec.backend);
    sandbox::RunnerPool pool(spec.runner);
    harness::ProgressFn progress;
    if (!quiet) progress = [](std::string_view msg) { std::cerr << msg << "\n"; };
    const auto result = harness::run_experiment(spec, gateway, pool, progress);
    print_curves(result, format);
    if (!result.failures.empty()) throw Unsuccessful{};
    return 0;
}

// ---- eval -----------------------------------------------------------------

int cmd_eval(const Overrides& o, const std::string& dataset_arg, const std::string& dataset_format,
             const std::vector<std::string>& inputs, int timeout_ms, const std::string& format) {
    check_format(format, {"table", "json"});
    const auto resolved = o.resolve();
    fs::path dataset = dataset_arg;
    auto fmt_kind = DatasetFormat::autodetect;
    if (dataset.empty()) {
        if (!resolved.doc.contains("dataset")) throw Error("eval needs --dataset or a --spec naming one");
        dataset = o.base_dir() / resolved.doc["dataset"].get<std::string>();
        if (resolved.doc.contains("format")) fmt_kind = dataset_format_from_string(resolved.doc["format"].get<std::string>());
    }
    if (!dataset_format.empty()) fmt_kind = dataset_format_from_string(dataset_format);
    std::map<std::string, Task> tasks;
    for (auto& t : load_dataset(dataset, fmt_kind)) {
        auto id = t.task_id;
        tasks.emplace(std::move(id), std::move(t));
    }
    const auto files = collect_trace_files(inputs);
    if (files.empty()) throw Error("no trace files found");

    auto runner = harness::runner_options_from_json(resolved.doc.value("sandbox", json::object()));
    sandbox::RunnerPool pool(runner);
    std::vector<int> computed(files.size(), 0);
    std::vector<std::string> errors(files.size());
    parallel_for(files.size(), static_cast<std::size_t>(resolved.doc.at("parallelism").get<int>()), [&](std::size_t i) {
        try {
            auto trace = load_trace(files[i]);
            const auto it = tasks.find(trace.task_id);
            if (it == tasks.end()) throw Error(fmt::format("task {} not in dataset", trace.task_id));
            computed[i] = harness::materialize_hidden_verdicts(trace, it->second, pool, timeout_ms);
            if (computed[i] > 0) save_trace(trace, files[i]);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    int total = 0;
    int updated = 0;
    json failed = json::array();
    for (std::size_t i = 0; i < files.size(); ++i) {
        total += computed[i];
        updated += computed[i] > 0 ? 1 : 0;
        if (!errors[i].empty()) failed.push_back({{"file", files[i].string()}, {"error", errors[i]}});
    }
    if (format == "json") {
        std::cout << json{{"traces", files.size()}, {"updated", updated}, {"verdicts", total}, {"failed", failed}}.dump(2)
                  << "\n";
    } else {
        std::cout << fmt::format("{} trace(s), {} updated, {} verdict(s) computed, {} failed\n", files.size(), updated,
                                 total, failed.size());
        for (const auto& f : failed) std::cout << fmt::format("  {}: {}\n", f["file"].get<std::string>(), f["error"].get<std::string>());
    }
    if (!failed.empty()) throw Unsuccessful{};
    return 0;
}

// ---- doctor ---------------------------------------------------------------

int cmd_doctor(const Overrides& o, const std::string& format) {
    check_format(format, {"table", "json"});
    const auto resolved = o.resolve();
    json report{{"settings", json::array()}, {"checks", json::array()}};
    for (const auto& s : resolved.settings) report["settings"].push_back({{"key", s.path.substr(1)}, {"value", s.value}, {"source", s.source}});
    const auto backend = harness::backend_spec_from_json(resolved.doc.value("backend", json::object()), o.base_dir());
    report["settings"].push_back({{"key", "api_key"},
                                  {"value", std::getenv(backend.api_key_env.c_str()) ? "set" : "unset"},
                                  {"source", "env " + backend.api_key_env}});

    const auto check = [&](const std::string& name, const std::function<std::string()>& fn) {
        const auto start = std::chrono::steady_clock::now();
        json entry{{"name", name}};
        try {
            entry["detail"] = fn();
            entry["ok"] = true;
        } catch (const std::exception& e) {
            entry["detail"] = e.what();
            entry["ok"] = false;
        }
        entry["ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
        report["checks"].push_back(entry);
    };
    check("backend", [&] {
        const auto b = harness::make_backend(backend);
        if (backend.kind == "mock") return b->describe();
        gateway::GenerationRequest req;
        req.role = gateway::Role::scout_insight;
        req.messages = {{gateway::Speaker::system, "Reply with the single word: ready"},
                        {gateway::Speaker::user, "ping"}};
        req.params = {0.0, 8, std::nullopt};
        const auto reply = b->complete(req, {"doctor", 1, std::nullopt});
        return fmt::format("{} replied {} chars", b->describe(), reply.size());
    });
    check("runner", [&] {
        auto runner = harness::runner_options_from_json(resolved.doc.value("sandbox", json::object()));
        runner.pool_size = 1;
        sandbox::RunnerPool pool(runner);
        const auto ok = pool.evaluate("x = 1", {{"ok", "assert x == 1", TestKind::assertion}}, 5000);
        const auto bad = pool.evaluate("x = 1", {{"bad", "assert x == 2", TestKind::assertion}}, 5000);
        if (!ok.all_passed() || bad.passed() != 0) throw Error("runner returned wrong verdicts on a known pair");
        if (pool.restarts() > 0) throw Error("runner restarted during the probe");
        return fmt::format("handshake ok, verdicts ok ({})", fmt::join(runner.command, " "));
    });

    bool healthy = true;
    for (const auto& c : report["checks"]) healthy = healthy && c["ok"].get<bool>();
    report["healthy"] = healthy;
    if (format == "json") {
        std::cout << report.dump(2) << "\n";
    } else {
        std::cout << "precedence: flags > spec > env > defaults\n";
        for (const auto& s : report["settings"]) {
            std::cout << fmt::format("  {:<18} {:<40} [{}]\n", s["key"].get<std::string>(),
                                     s["value"].is_null() ? std::string("-") : s["value"].is_string() ? s["value"].get<std::string>() : s["value"].dump(),
                                     s["source"].get<std::string>());
        }
        for (const auto& c : report["checks"]) {
            std::cout << fmt::format("{} {:<8} {} ({} ms)\n", c["ok"].get<bool>() ? "ok  " : "FAIL",
                                     c["name"].get<std::string>(), c["detail"].get<std::string>(),
                                     c["ms"].get<long long>());
        }
    }
    if (!healthy) throw Unsuccessful{};
    return 0;
}

// ---- analyze --------------------------------------------------------------

int cmd_depth(const std::vector<std::string>& inputs, const std::string& which, const std::string& out_dir,
              const std::string& format) {
    check_format(format, {"table", "csv", "json"});
    const auto traces = load_traces(inputs);
    std::vector<std::pair<std::string, std::vector<analysis::DepthTable>>> tables;
    if (which == "first-correct" || which == "both") {
        try {
            tables.emplace_back("first_correct", analysis::tables_by_label(traces, analysis::first_correct_depth_table));
        } catch (const Error& e) {
            throw Error(fmt::format("{} (run `refine-search eval` to materialize hidden verdicts)", e.what()));
        }
    }
    if (which == "max" || which == "both") tables.emplace_back("max", analysis::tables_by_label(traces, analysis::max_depth_table));

    json doc = json::object();
    for (const auto& [name, t] : tables) {
        if (!out_dir.empty()) write_file(fs::path(out_dir) / fmt::format("depth.{}.csv", name), analysis::tables_csv(t));
        if (format == "csv") {
            std::cout << fmt::format("# {}\n", name) << analysis::tables_csv(t);
        } else if (format == "table") {
            std::cout << fmt::format("{} depth (% of counted traces)\n", name == "max" ? "maximum" : "first-correct")
                      << analysis::tables_text(t) << "\n";
        }
        for (const auto& x : t) doc[name].push_back(analysis::to_json(x));
    }
    if (format == "json") std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_diversity(const std::vector<std::string>& inputs, const std::string& label, const std::string& embeddings,
                  const std::string& endpoint, const std::string& model, const std::string& api_key_env,
                  const std::string& out_dir, const std::string& format) {
    check_format(format, {"table", "csv", "json"});
    auto traces = load_traces(inputs);
    std::set<std::string> labels;
    for (const auto& t : traces) labels.insert(t.label);
    if (!label.empty()) {
        std::erase_if(traces, [&](const SearchTrace& t) { return t.label != label; });
        if (traces.empty()) throw Error(fmt::format("no traces with label {}", label));
    } else if (labels.size() > 1) {
        throw Error(fmt::format("traces mix {} strategy labels; pick one with --label", labels.size()));
    }
    std::unique_ptr<analysis::EmbeddingSource> source;
    if (!embeddings.empty()) {
        source = std::make_unique<analysis::EmbeddingFile>(embeddings);
    } else {
        const char* key = std::getenv(api_key_env.c_str());
        source = std::make_unique<analysis::EmbeddingEndpoint>(endpoint, model, key ? key : "");
    }
    const auto groups = analysis::embed_directions(traces, *source);
    const std::vector<std::pair<std::string, const std::vector<std::vector<analysis::Vector>>*>> views = {
        {"by_step", &groups.by_step}, {"by_initial_code", &groups.by_initial_code}};
    json doc = json::object();
    for (const auto& [name, g] : views) {
        if (g->empty()) throw Error("traces contain no refinement directions");
        std::vector<std::string> axis;
        for (std::size_t i = 0; i < g->size(); ++i) {
            axis.push_back(name == "by_step" ? fmt::format("s{}", i + 1) : fmt::format("c{}", i + 1));
        }
        const auto m = analysis::diversity_matrix(*g, axis);
        const auto title = name == "by_step" ? "direction similarity by refinement step"
                                             : "direction similarity by initial code";
        const auto csv = analysis::matrix_csv(m, name);
        write_file(fs::path(out_dir) / fmt::format("diversity.{}.csv", name), csv);
        write_file(fs::path(out_dir) / fmt::format("diversity.{}.svg", name), analysis::matrix_svg(m, title));
        if (format == "csv") std::cout << csv;
        if (format == "table") {
            std::cout << title << "\n";
            for (std::size_t i = 0; i < m.labels.size(); ++i) {
                std::cout << fmt::format("  {:>4}", m.labels[i]);
                for (const double v : m.values[i]) std::cout << fmt::format(" {:6.3f}", v);
                std::cout << (m.singleton[i] ? "  (single direction)\n" : "\n");
            }
        }
        doc[name] = analysis::to_json(m, name);
    }
    if (format == "json") std::cout << doc.dump(2) << "\n";
    return 0;
}

// ---- vspace ---------------------------------------------------------------

int cmd_campaign(const vspace::CampaignOptions& options, const std::string& out_file, const std::string& format) {
    check_format(format, {"table", "json"});
    const auto report = vspace::run_campaign(options);
    const auto doc = vspace::to_json(report);
    if (!out_file.empty()) write_file(out_file, doc.dump(2) + "\n");
    if (format == "json") {
        std::cout << doc.dump(2) << "\n";
    } else {
        std::cout << fmt::format("{:<22} {:>7} {:>10} {:>10} {:>11}\n", "section", "models", "histories", "checks",
                                 "violations");
        for (const auto& s : report.sections) {
            std::cout << fmt::format("{:<22} {:>7} {:>10} {:>10} {:>11}\n", s.name, s.models, s.histories, s.checks,
                                     s.violations);
        }
        std::cout << fmt::format("total violations: {}; elapsed {:.2f} s\n", report.total_violations(),
                                 static_cast<double>(report.elapsed.count()) / 1000.0);
    }
    if (report.total_violations() > 0) throw Unsuccessful{};
    return 0;
}

std::string set_text(const vspace::VersionSpaceModel& m, vspace::Bits s) {
    std::vector<std::string> names;
    for (const int d : vspace::members(s)) names.push_back(m.directions[static_cast<std::size_t>(d)]);
    return names.empty() ? "∅" : fmt::format("{{{}}}", fmt::join(names, ", "));
}

int cmd_demo(const std::string& format) {
    check_format(format, {"table", "json"});
    using namespace vspace;
    const auto model = drifting_interpretation_model();
    const auto history = drifting_interpretation_history();
    std::vector<Bits> single;
    std::vector<Bits> prefix;
    for (std::size_t t = 0; t < history.size(); ++t) {
        single.push_back(consistent_directions(model, history[t].code, history[t].e));
        prefix.push_back(linear_version_space(model, History(history.begin(), history.begin() + static_cast<long>(t) + 1)));
    }
    const Rational alpha{1, 2};
    const Rational epsilon{1, 10};
    const Rational delta{1, 5};
    const auto w = window_limit(alpha, delta, epsilon);
    const bool reproduced =
        prefix.back() == 0 && std::all_of(single.begin(), single.end(), [](Bits b) { return b != 0; }) && w &&
        *w == Rational{3};

    if (format == "json") {
        json steps = json::array();
        for (std::size_t t = 0; t < history.size(); ++t) {
            steps.push_back({{"t", t + 1},
                             {"code", model.codes[static_cast<std::size_t>(history[t].code)]},
                             {"counterexample", model.counterexamples[static_cast<std::size_t>(history[t].e)]},
                             {"consistent", set_text(model, single[t])},
                             {"version_space", set_text(model, prefix[t])}});
        }
        std::cout << json{{"model", model_to_json(model)},
                          {"steps", steps},
                          {"window_example",
                           {{"alpha", format_rational(alpha)},
                            {"epsilon", format_rational(epsilon)},
                            {"delta", format_rational(delta)},
                            {"w_max", w ? format_rational(*w) : "inf"}}},
                          {"reproduced", reproduced}}
                         .dump(2)
                  << "\n";
    } else {
        std::cout << "Drifting interpretation: two codes read the same counterexample in opposite ways.\n";
        for (std::size_t t = 0; t < history.size(); ++t) {
            std::cout << fmt::format("  t={}  observe {} on {}: consistent {}   Ṽ_{} = {}\n", t + 1,
                                     model.counterexamples[static_cast<std::size_t>(history[t].e)],
                                     model.codes[static_cast<std::size_t>(history[t].code)], set_text(model, single[t]),
                                     t + 1, set_text(model, prefix[t]));
        }
        std::cout << fmt::format("Window limit: alpha = {}, epsilon = {}, delta = {}  ->  w_max = {}\n",
                                 format_rational(alpha), format_rational(epsilon), format_rational(delta),
                                 w ? format_rational(*w) : "inf");
    }
    if (!reproduced) throw Unsuccessful{};
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Refinement-search experiments, trace analysis and version-space checks", "refine-search"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    bool error_json = false;
    bool quiet = false;
    std::string format = "table";
    app.add_flag("--error-json", error_json, "on failure, print {\"error\": ...} to stdout");
    app.add_flag("-q,--quiet", quiet, "no progress output");
    app.add_option("--format", format, "report format: json | csv | table")
        ->check(CLI::IsMember({"json", "csv", "table"}))
        ->capture_default_str();
    std::function<int()> action;

    Overrides run_o;
    auto* run = app.add_subcommand("run", "run an experiment spec; writes traces, curves and summary.json");
    run_o.add_to(*run, true);
    run->callback([&] { action = [&] { return cmd_run(run_o, format, quiet); }; });

    Overrides eval_o;
    std::string eval_dataset;
    std::string eval_format;
    std::vector<std::string> eval_inputs;
    int eval_timeout = sandbox::kDefaultTimeoutMs;
    auto* eval = app.add_subcommand("eval", "materialize hidden-test verdicts in existing traces");
    eval_o.add_to(*eval, false);
    eval->add_option("--dataset", eval_dataset, "dataset JSONL (default: the spec's)")->check(CLI::ExistingFile);
    eval->add_option("--dataset-format", eval_format, "native | humaneval | mbpp | autodetect");
    eval->add_option("--timeout-ms", eval_timeout, "per-test timeout")->check(CLI::PositiveNumber);
    eval->add_option("traces", eval_inputs, "trace files or directories")->required();
    eval->callback([&] { action = [&] { return cmd_eval(eval_o, eval_dataset, eval_format, eval_inputs, eval_timeout, format); }; });

    Overrides doctor_o;
    auto* doctor = app.add_subcommand("doctor", "show effective settings and check backend and runner");
    doctor_o.add_to(*doctor, false);
    doctor->callback([&] { action = [&] { return cmd_doctor(doctor_o, format); }; });

    auto* analyze = app.add_subcommand("analyze", "trace analyses");
    analyze->require_subcommand(1);
    std::vector<std::string> depth_inputs;
    std::string depth_which = "both";
    std::string depth_out;
    auto* depth = analyze->add_subcommand("depth", "depth distributions of first-correct and deepest nodes");
    depth->add_option("traces", depth_inputs, "trace files or directories")->required();
    depth->add_option("--table", depth_which, "first-correct | max | both")
        ->check(CLI::IsMember({"first-correct", "max", "both"}));
    depth->add_option("--out", depth_out, "also write depth.<table>.csv here");
    depth->callback([&] { action = [&] { return cmd_depth(depth_inputs, depth_which, depth_out, format); }; });

    std::vector<std::string> div_inputs;
    std::string div_label;
    std::string div_file;
    std::string div_endpoint;
    std::string div_model = "text-embedding-3-small";
    std::string div_key_env = "REFINE_SEARCH_API_KEY";
    std::string div_out = ".";
    auto* diversity = analyze->add_subcommand("diversity", "direction similarity heatmaps (CSV and SVG)");
    diversity->add_option("traces", div_inputs, "trace files or directories")->required();
    diversity->add_option("--label", div_label, "strategy label to analyze");
    auto* file_opt = diversity->add_option("--embeddings", div_file, "JSONL of {text_hash, vector}")->check(CLI::ExistingFile);
    auto* endpoint_opt = diversity->add_option("--endpoint", div_endpoint, "embeddings API base URL");
    file_opt->excludes(endpoint_opt);
    diversity->add_option("--embedding-model", div_model, "model for --endpoint")->capture_default_str();
    diversity->add_option("--api-key-env", div_key_env, "environment variable holding the API key")->capture_default_str();
    diversity->add_option("--out", div_out, "directory for diversity.<grouping>.{csv,svg}")->capture_default_str();
    diversity->callback([&] {
        if (div_file.empty() && div_endpoint.empty()) throw CLI::RequiredError("--embeddings or --endpoint");
        action = [&] {
            return cmd_diversity(div_inputs, div_label, div_file, div_endpoint, div_model, div_key_env, div_out, format);
        };
    });

    auto* vs = app.add_subcommand("vspace", "version-space checks");
    vs->require_subcommand(1);
    vspace::CampaignOptions camp;
    std::string camp_epsilon = "1/10";
    std::string camp_out;
    std::optional<std::size_t> camp_jobs;
    auto* campaign = vs->add_subcommand("campaign", "randomized verification over seeded models");
    campaign->add_option("--seed", camp.seed, "model seed")->capture_default_str();
    campaign->add_option("--models", camp.models, "models per section")->check(CLI::PositiveNumber)->capture_default_str();
    campaign->add_option("--max-size", camp.max_size, "largest |D|, |C| and |E|")
        ->check(CLI::Range(1, 8))
        ->capture_default_str();
    campaign->add_option("--epsilon", camp_epsilon, "window threshold, e.g. 0.1 or 1/10")->capture_default_str();
    campaign->add_option("--jobs", camp_jobs, "worker threads")->check(CLI::PositiveNumber);
    campaign->add_option("--out", camp_out, "also write the JSON report here");
    campaign->callback([&] {
        action = [&] {
            camp.epsilon = vspace::parse_rational(camp_epsilon);
            camp.threads = camp_jobs.value_or(default_jobs());
            return cmd_campaign(camp, camp_out, format);
        };
    });
    auto* demo = vs->add_subcommand("demo", "drifting-interpretation instance and a window-limit example");
    demo->callback([&] { action = [&] { return cmd_demo(format); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    try {
        return action();
    } catch (const Unsuccessful&) {
        return 1;
    } catch (const std::exception& e) {
        if (error_json) {
            std::cout << json{{"error", {{"message", e.what()}}}}.dump() << "\n";
        } else {
            std::cerr << "error: " << e.what() << "\n";
        }
        return 1;
    }
}
