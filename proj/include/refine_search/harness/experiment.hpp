#pragma once

#include "refine_search/core/dataset.hpp"
#include "refine_search/gateway/gateway.hpp"
#include "refine_search/harness/stats.hpp"
#include "refine_search/sandbox/sandbox.hpp"
#include "refine_search/strategies/config.hpp"

#include <filesystem>
#include <functional>
#include <memory>

namespace refine_search::harness {

struct BackendSpec {
    std::string kind = "mock";  // mock | http
    std::filesystem::path script;
    std::string base_url;
    std::string model;
    std::string api_key_env = "REFINE_SEARCH_API_KEY";
    int timeout_ms = 60000;
    std::filesystem::path templates_dir;
    std::vector<std::string> init_prompt_suffixes;
};

struct ExperimentSpec {
    std::filesystem::path dataset;
    DatasetFormat format = DatasetFormat::autodetect;
    std::vector<strategies::StrategyConfig> strategies;
    int runs = 1;
    int parallelism = 1;
    std::filesystem::path output_dir = "out";
    /// Run r uses run_seed = seed + r.
    std::uint64_t seed = 0;
    BackendSpec backend;
    sandbox::RunnerOptions runner;
    /// Validation tests are generated once per (task, run_seed) and shared by
    /// every strategy unless this is set.
    bool validation_per_strategy = false;
    double max_failure_fraction = 0.10;

    /// Throws on runs < 1, parallelism < 1, no strategies, duplicate labels,
    /// or strategies with different budgets.
    void validate() const;
    [[nodiscard]] int budget_k() const;
};

/// Reads a TOML or JSON spec (chosen by extension). Relative paths are
/// resolved against the spec file's directory.
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);
/// The raw spec document, TOML converted to JSON.
nlohmann::json load_spec_document(const std::filesystem::path& path);
ExperimentSpec experiment_spec_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
nlohmann::json to_json(const ExperimentSpec& spec);

/// The `backend` and `sandbox` tables of a spec on their own.
BackendSpec backend_spec_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
sandbox::RunnerOptions runner_options_from_json(const nlohmann::json& doc);

/// TOML document as the equivalent JSON value.
nlohmann::json toml_to_json(std::string_view toml_text);

std::shared_ptr<gateway::Backend> make_backend(const BackendSpec& spec);
gateway::Gateway make_gateway(const BackendSpec& spec);

struct TaskFailure {
    std::string task_id;
    std::string label;
    std::uint64_t run_seed = 0;
    std::string error;
};

struct ExperimentResult {
    std::vector<ScalingCurve> curves;
    std::vector<TaskFailure> failures;
    std::size_t traces_generated = 0;
    std::size_t traces_reused = 0;
    std::size_t jobs = 0;
    nlohmann::json summary;
};

std::filesystem::path trace_dir(const ExperimentSpec& spec);

using ProgressFn = std::function<void(std::string_view message)>;

/// Runs every (run, strategy, task) combination whose trace file is not yet
/// on disk, materializes hidden verdicts, persists traces, then writes
/// `curve.<label>.csv` and `summary.json`. Failed task runs are excluded
/// from the curves; more than `max_failure_fraction` failures throws after
/// the summary is written.
ExperimentResult run_experiment(const ExperimentSpec& spec, const gateway::Gateway& gateway,
                                sandbox::Executor& executor, const ProgressFn& progress = {});

/// Fills missing hidden verdicts by running each node against the task's
/// hidden tests. Returns the number of verdicts computed.
int materialize_hidden_verdicts(SearchTrace& trace, const Task& task, sandbox::Executor& executor, int timeout_ms);

}  // namespace refine_search::harness
