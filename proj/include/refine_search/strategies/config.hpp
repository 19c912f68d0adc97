#pragma once

#include "refine_search/core/types.hpp"

#include <nlohmann/json.hpp>

namespace refine_search::strategies {

/// What reflections see about a failing candidate.
enum class FeedbackDetail { counts, failures };

std::string_view to_string(FeedbackDetail detail);
FeedbackDetail feedback_detail_from_string(std::string_view text);

struct StrategyConfig {
    StrategyKind kind = StrategyKind::bon;
    std::string label;  // empty: the kind name
    int budget_k = 16;
    int n_init = 1;
    int m_directions = 3;
    double uct_c = 1.0;
    int validation_test_count = 6;
    std::uint64_t run_seed = 0;
    bool early_stop = true;
    int timeout_ms = 5000;
    FeedbackDetail feedback_detail = FeedbackDetail::failures;

    [[nodiscard]] std::string effective_label() const;

    /// Throws on n_init < 1, budget_k < n_init, uct_c < 0, and on settings a
    /// strategy cannot honour (linear and tree start from one code).
    void validate() const;

    /// Named configurations with k = 16: bon, linear, tree, sfs (5 initial
    /// codes), no_foresting (sfs with 1), irtd1, irtd3, irtd5.
    static StrategyConfig preset(std::string_view name);
};

/// Accepts either `{"preset": name, ...overrides}` or explicit fields, with
/// `strategy` naming the kind.
StrategyConfig strategy_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const StrategyConfig& config);

}  // namespace refine_search::strategies
