#include "refine_search/strategies/config.hpp"

#include <fmt/format.h>

namespace refine_search::strategies {

std::string_view to_string(FeedbackDetail detail) {
    return detail == FeedbackDetail::counts ? "counts" : "failures";
}

FeedbackDetail feedback_detail_from_string(std::string_view text) {
    if (text == "counts") return FeedbackDetail::counts;
    if (text == "failures") return FeedbackDetail::failures;
    throw Error(fmt::format("unknown feedback_detail '{}'", text));
}

std::string StrategyConfig::effective_label() const {
    return label.empty() ? std::string(to_string(kind)) : label;
}

void StrategyConfig::validate() const {
    const auto fail = [&](const std::string& what) {
        throw Error(fmt::format("strategy {}: {}", effective_label(), what));
    };
    if (n_init < 1) fail("n_init must be >= 1");
    if (budget_k < n_init) fail("budget_k must be >= n_init");
    if (m_directions < 1) fail("m_directions must be >= 1");
    if (uct_c < 0.0) fail("uct_c must be >= 0");
    if (validation_test_count < 1) fail("validation_test_count must be >= 1");
    if (timeout_ms <= 0) fail("timeout_ms must be > 0");
    if ((kind == StrategyKind::linear || kind == StrategyKind::tree) && n_init != 1) fail("n_init must be 1");
    for (const char c : effective_label()) {
        if (c == '/' || c == '.' || c == ' ') fail("label may not contain '/', '.' or spaces");
    }
}

StrategyConfig StrategyConfig::preset(std::string_view name) {
    StrategyConfig c;
    c.label = std::string(name);
    if (name == "bon") {
        c.kind = StrategyKind::bon;
    } else if (name == "linear") {
        c.kind = StrategyKind::linear;
    } else if (name == "tree") {
        c.kind = StrategyKind::tree;
    } else if (name == "sfs") {
        c.kind = StrategyKind::sfs;
        c.n_init = 5;
    } else if (name == "no_foresting") {
        c.kind = StrategyKind::sfs;
        c.n_init = 1;
    } else if (name == "irtd1" || name == "irtd3" || name == "irtd5") {
        c.kind = StrategyKind::irtd;
        c.n_init = name.back() - '0';
    } else {
        throw Error(fmt::format("unknown strategy preset '{}'", name));
    }
    return c;
}

StrategyConfig strategy_config_from_json(const nlohmann::json& doc) {
    StrategyConfig c;
    if (doc.contains("preset")) {
        c = StrategyConfig::preset(doc["preset"].get<std::string>());
    } else if (doc.contains("strategy")) {
        c.kind = strategy_kind_from_string(doc["strategy"].get<std::string>());
    } else {
        throw Error("strategy entry needs \"preset\" or \"strategy\"");
    }
    if (doc.contains("strategy") && doc.contains("preset")) {
        c.kind = strategy_kind_from_string(doc["strategy"].get<std::string>());
    }
    c.label = doc.value("label", c.label);
    c.budget_k = doc.value("budget_k", c.budget_k);
    c.n_init = doc.value("n_init", c.n_init);
    c.m_directions = doc.value("m_directions", c.m_directions);
    c.uct_c = doc.value("uct_c", c.uct_c);
    c.validation_test_count = doc.value("validation_test_count", c.validation_test_count);
    c.run_seed = doc.value("run_seed", c.run_seed);
    c.early_stop = doc.value("early_stop", c.early_stop);
    c.timeout_ms = doc.value("timeout_ms", c.timeout_ms);
    if (doc.contains("feedback_detail")) {
        c.feedback_detail = feedback_detail_from_string(doc["feedback_detail"].get<std::string>());
    }
    c.validate();
    return c;
}

nlohmann::json to_json(const StrategyConfig& c) {
    return {{"strategy", to_string(c.kind)},
            {"label", c.effective_label()},
            {"budget_k", c.budget_k},
            {"n_init", c.n_init},
            {"m_directions", c.m_directions},
            {"uct_c", c.uct_c},
            {"validation_test_count", c.validation_test_count},
            {"run_seed", c.run_seed},
            {"early_stop", c.early_stop},
            {"timeout_ms", c.timeout_ms},
            {"feedback_detail", to_string(c.feedback_detail)}};
}

}  // namespace refine_search::strategies
