#include "refine_search/core/types.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <set>

namespace refine_search {

std::string_view to_string(TestKind kind) {
    switch (kind) {
        case TestKind::assertion: return "assertion";
        case TestKind::io_pair: return "io_pair";
    }
    return "assertion";
}

TestKind test_kind_from_string(std::string_view text) {
    if (text == "assertion") return TestKind::assertion;
    if (text == "io_pair") return TestKind::io_pair;
    throw Error(fmt::format("unknown test kind '{}'", text));
}

std::string_view to_string(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::bon: return "bon";
        case StrategyKind::linear: return "linear";
        case StrategyKind::tree: return "tree";
        case StrategyKind::sfs: return "sfs";
        case StrategyKind::irtd: return "irtd";
    }
    return "bon";
}

StrategyKind strategy_kind_from_string(std::string_view text) {
    if (text == "bon") return StrategyKind::bon;
    if (text == "linear") return StrategyKind::linear;
    if (text == "tree") return StrategyKind::tree;
    if (text == "sfs") return StrategyKind::sfs;
    if (text == "irtd") return StrategyKind::irtd;
    throw Error(fmt::format("unknown strategy '{}'", text));
}

void validate_task(const Task& task) {
    if (task.task_id.empty()) throw Error("task has an empty task_id");
    if (task.hidden_tests.empty()) {
        throw Error(fmt::format("task {} has no hidden tests", task.task_id));
    }
    auto check_unique = [&](const std::vector<TestCase>& tests, std::string_view which) {
        std::set<std::string> seen;
        for (const auto& t : tests) {
            if (!seen.insert(t.test_id).second) {
                throw Error(fmt::format("task {}: duplicate {} test id '{}'", task.task_id, which, t.test_id));
            }
        }
        return seen;
    };
    const auto hidden = check_unique(task.hidden_tests, "hidden");
    check_unique(task.validation_tests, "validation");
    for (const auto& t : task.validation_tests) {
        if (hidden.contains(t.test_id)) {
            throw Error(fmt::format("task {}: validation test '{}' collides with a hidden test", task.task_id,
                                    t.test_id));
        }
    }
}

SharedInformation SharedInformation::appended(SharedInfoEntry entry) const {
    SharedInformation next = *this;
    next.entries_.push_back(std::move(entry));
    next.rendered_ = render(next.entries_);
    return next;
}

std::optional<SharedInfoEntry> SharedInformation::best_entry() const {
    if (entries_.empty()) return std::nullopt;
    const auto it = std::max_element(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) {
        return a.score_delta < b.score_delta;
    });
    return *it;
}

std::string SharedInformation::render(const std::vector<SharedInfoEntry>& entries) {
    std::string out;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        out += fmt::format("{}. Direction: {}\n   Score change: {:+.3f}\n   Outcome: {}\n", i + 1, e.direction_text,
                           e.score_delta, e.outcome_summary);
    }
    return out;
}

const CandidateNode& SearchTrace::node(int node_id) const {
    if (node_id < 1 || static_cast<std::size_t>(node_id) > nodes.size()) {
        throw Error(fmt::format("trace {}: no node {}", task_id, node_id));
    }
    return nodes[static_cast<std::size_t>(node_id - 1)];
}

bool SearchTrace::hidden_verdicts_complete(std::size_t prefix) const {
    const auto n = std::min(prefix, nodes.size());
    return std::all_of(nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(n),
                       [](const CandidateNode& c) { return c.hidden_result.has_value(); });
}

void validate_trace(const SearchTrace& trace) {
    const auto fail = [&](const std::string& what) {
        throw Error(fmt::format("trace {} ({}): {}", trace.task_id, trace.label, what));
    };
    if (static_cast<int>(trace.nodes.size()) > trace.budget_k) fail("more nodes than budget");
    for (std::size_t i = 0; i < trace.nodes.size(); ++i) {
        const auto& n = trace.nodes[i];
        if (n.node_id != static_cast<int>(i) + 1) fail(fmt::format("node at index {} has id {}", i, n.node_id));
        if (n.validation_score < 0.0 || n.validation_score > 1.0) fail("validation score outside [0,1]");
        if (!n.parent) {
            if (n.depth != 1) fail(fmt::format("root node {} has depth {}", n.node_id, n.depth));
            continue;
        }
        if (*n.parent < 1 || *n.parent >= n.node_id) fail(fmt::format("node {} has bad parent", n.node_id));
        const auto& p = trace.nodes[static_cast<std::size_t>(*n.parent - 1)];
        if (n.depth != p.depth + 1) fail(fmt::format("node {} depth does not follow its parent", n.node_id));
    }
    if (trace.terminated_early) {
        const bool last_passed = !trace.nodes.empty() && trace.nodes.back().passed_all_validation;
        if (!last_passed && static_cast<int>(trace.nodes.size()) != trace.budget_k) {
            fail("terminated early without a validation pass");
        }
    }
}

std::optional<int> first_correct_depth(const SearchTrace& trace, const CorrectnessFn& correct) {
    // nodes are stored in node_id order, so the first hit is the minimal id
    for (const auto& n : trace.nodes) {
        if (correct(n.node_id)) return n.depth;
    }
    return std::nullopt;
}

std::optional<int> first_correct_depth(const SearchTrace& trace) {
    if (!trace.hidden_verdicts_complete(trace.nodes.size())) {
        throw Error(fmt::format("unevaluated trace {}", trace.task_id));
    }
    return first_correct_depth(trace, [&](int id) { return *trace.node(id).hidden_result; });
}

int max_depth(const SearchTrace& trace) {
    if (trace.nodes.empty()) throw Error("empty trace");
    int best = 1;
    for (const auto& n : trace.nodes) best = std::max(best, n.depth);
    return best;
}

}  // namespace refine_search
