#pragma once

#include "refine_search/core/types.hpp"
#include "refine_search/gateway/gateway.hpp"
#include "refine_search/sandbox/sandbox.hpp"
#include "refine_search/strategies/config.hpp"

namespace refine_search::strategies {

struct SearchOutcome {
    SearchTrace trace;
    /// Shared information at the end of the run (empty for BoN, linear, tree).
    SharedInformation info;
    int refinements = 0;
    /// Code-generation calls the gateway session recorded; equals the node count.
    int code_generations = 0;
    std::vector<TestCase> validation_tests;
};

/// Everything a strategy run needs besides the task and its configuration.
struct SearchEnv {
    const gateway::Gateway& gateway;
    sandbox::Executor& executor;
};

/// Each run opens its own gateway session, so runs of different tasks may
/// proceed in parallel. If `task.validation_tests` is non-empty those tests
/// are used as V; otherwise V is generated first. Gateway and sandbox errors
/// propagate.
SearchOutcome run_bon(const Task& task, const StrategyConfig& config, const SearchEnv& env);
SearchOutcome run_linear(const Task& task, const StrategyConfig& config, const SearchEnv& env);
SearchOutcome run_tree(const Task& task, const StrategyConfig& config, const SearchEnv& env);
SearchOutcome run_sfs(const Task& task, const StrategyConfig& config, const SearchEnv& env);
SearchOutcome run_irtd(const Task& task, const StrategyConfig& config, const SearchEnv& env);

/// Dispatches on `config.kind`.
SearchOutcome run_strategy(const Task& task, const StrategyConfig& config, const SearchEnv& env);

/// Text shown to the model about a candidate's validation run.
std::string render_feedback(const sandbox::ExecResult& result, const std::vector<TestCase>& tests,
                            FeedbackDetail detail);

}  // namespace refine_search::strategies
