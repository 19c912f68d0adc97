#include "refine_search/strategies/strategies.hpp"

#include "refine_search/core/random.hpp"
#include "refine_search/gateway/parsing.hpp"
#include "refine_search/strategies/tree.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <limits>
#include <map>

namespace refine_search::strategies {

std::string render_feedback(const sandbox::ExecResult& result, const std::vector<TestCase>& tests,
                            FeedbackDetail detail) {
    std::string out = fmt::format("Passed {}/{} validation tests.", result.passed(), result.per_test.size());
    if (detail == FeedbackDetail::counts) return out;
    std::map<std::string, const TestCase*> by_id;
    for (const auto& t : tests) by_id[t.test_id] = &t;
    for (const auto& o : result.per_test) {
        if (o.status == sandbox::TestStatus::pass) continue;
        const auto it = by_id.find(o.test_id);
        out += fmt::format("\n- {}: {}", to_string(o.status), it == by_id.end() ? o.test_id : it->second->payload);
        if (o.detail && !o.detail->empty()) out += fmt::format("\n  {}", *o.detail);
    }
    return out;
}

namespace {

using gateway::Role;

/// State shared by every strategy: the session, the trace under
/// construction, per-node feedback, and the budget/termination rules.
class SearchRun {
public:
    SearchRun(const Task& task, const StrategyConfig& config, const SearchEnv& env)
        : task_(task),
          config_(config),
          env_(env),
          session_(env.gateway.session(task.task_id)),
          // Seeded by kind rather than label so identically configured
          // variants (sfs with one root vs no_foresting) make the same draws.
          rng_(derive_seed(config.run_seed, task.task_id + "/" + std::string(to_string(config.kind)))) {
        config_.validate();
        trace_.task_id = task.task_id;
        trace_.strategy = config.kind;
        trace_.label = config.effective_label();
        trace_.budget_k = config.budget_k;
        trace_.run_seed = config.run_seed;
        if (task_.validation_tests.empty()) {
            task_.validation_tests = session_.generate_validation_tests(task_, config.validation_test_count);
        }
    }

    [[nodiscard]] bool stopped() const { return trace_.terminated_early || remaining() == 0; }
    [[nodiscard]] int remaining() const { return config_.budget_k - static_cast<int>(trace_.nodes.size()); }
    [[nodiscard]] const StrategyConfig& config() const { return config_; }
    [[nodiscard]] const CandidateNode& node(int id) const { return trace_.node(id); }
    Rng& rng() { return rng_; }

    int add_initial() {
        auto codes = session_.generate_initial_codes(task_, 1, SharedInformation{});
        return add(std::move(codes.front()), std::nullopt, std::nullopt);
    }

    int add_refinement(int parent, const TextualDirection& direction) {
        auto code = session_.refine_code(task_, node(parent).source, feedback_.at(parent), direction);
        ++refinements_;
        TextualDirection used = direction;
        used.used = true;
        return add(std::move(code), parent, std::move(used));
    }

    /// Up to m directions for `id`. Falls back to one regeneration, then the
    /// best past direction in `info`, then the unparsed response text.
    std::vector<TextualDirection> directions(int id, int m, const SharedInformation& info) {
        const auto& fb = feedback_.at(id);
        std::string raw;
        const auto attempt = [&]() -> std::vector<TextualDirection> {
            try {
                return session_.generate_directions(task_, node(id).source, fb, info, m);
            } catch (const gateway::DirectionParseError& e) {
                raw = e.raw();
                return {};
            }
        };
        auto dirs = attempt();
        if (static_cast<int>(dirs.size()) < m) {
            auto again = attempt();
            if (again.size() > dirs.size()) dirs = std::move(again);
        }
        if (static_cast<int>(dirs.size()) < m) {
            if (const auto best = info.best_entry()) {
                const bool present = std::any_of(dirs.begin(), dirs.end(),
                                                 [&](const auto& d) { return d.text == best->direction_text; });
                if (!present) dirs.push_back({best->direction_text, std::nullopt, false});
            }
        }
        if (dirs.empty()) {
            auto text = gateway::trim(raw);
            if (text.empty()) throw gateway::GatewayError("no directions available");
            dirs.push_back({std::move(text), std::nullopt, false});
        }
        for (auto& d : dirs) d.feedback = fb;
        return dirs;
    }

    SharedInformation update(int parent, int child, const TextualDirection& direction, Role role,
                             const SharedInformation& info) {
        const auto& p = node(parent);
        const auto& c = node(child);
        return session_.update_shared_info(task_, p.source, info, direction, c.source, p.validation_score,
                                           c.validation_score, role);
    }

    SearchOutcome finish(SharedInformation info = {}) {
        validate_trace(trace_);
        if (session_.code_generations() != static_cast<int>(trace_.nodes.size())) {
            throw Error(fmt::format("budget bookkeeping: {} code generations for {} nodes",
                                    session_.code_generations(), trace_.nodes.size()));
        }
        SearchOutcome out;
        out.trace = std::move(trace_);
        out.info = std::move(info);
        out.refinements = refinements_;
        out.code_generations = session_.code_generations();
        out.validation_tests = task_.validation_tests;
        return out;
    }

private:
    int add(std::string source, std::optional<int> parent, std::optional<TextualDirection> direction) {
        if (remaining() <= 0) throw Error("budget exhausted");
        const auto result = env_.executor.evaluate(source, task_.validation_tests, config_.timeout_ms,
                                                   task_.entry_point);
        CandidateNode n;
        n.node_id = static_cast<int>(trace_.nodes.size()) + 1;
        n.source = std::move(source);
        n.parent = parent;
        n.direction_used = std::move(direction);
        n.depth = parent ? node(*parent).depth + 1 : 1;
        n.validation_score = sandbox::validation_score(result);
        n.passed_all_validation = result.all_passed();
        feedback_[n.node_id] = render_feedback(result, task_.validation_tests, config_.feedback_detail);
        if (n.passed_all_validation && config_.early_stop) trace_.terminated_early = true;
        trace_.nodes.push_back(std::move(n));
        return trace_.nodes.back().node_id;
    }

    Task task_;
    StrategyConfig config_;
    const SearchEnv& env_;
    gateway::Session session_;
    Rng rng_;
    SearchTrace trace_;
    std::map<int, std::string> feedback_;
    int refinements_ = 0;
};

void check_kind(const StrategyConfig& config, StrategyKind expected) {
    if (config.kind != expected) {
        throw Error(fmt::format("strategy {} run with a {} configuration", to_string(expected), to_string(config.kind)));
    }
}

}  // namespace

SearchOutcome run_bon(const Task& task, const StrategyConfig& config, const SearchEnv& env) {
    check_kind(config, StrategyKind::bon);
    SearchRun run(task, config, env);
    while (!run.stopped()) run.add_initial();
    return run.finish();
}

SearchOutcome run_linear(const Task& task, const StrategyConfig& config, const SearchEnv& env) {
    check_kind(config, StrategyKind::linear);
    SearchRun run(task, config, env);
    int current = run.add_initial();
    while (!run.stopped()) {
        const auto dirs = run.directions(current, 1, SharedInformation{});
        current = run.add_refinement(current, dirs.front());
    }
    return run.finish();
}

SearchOutcome run_tree(const Task& task, const StrategyConfig& config, const SearchEnv& env) {
    check_kind(config, StrategyKind::tree);
    SearchRun run(task, config, env);
    const int root = run.add_initial();
    SearchTree tree;
    tree.add_root(root, run.node(root).validation_score).visits = 1;
    TieBreaker ties;
    const auto width = static_cast<std::size_t>(config.m_directions);

    while (!run.stopped()) {
        int current = root;
        while (tree.at(current).children.size() >= width) current = select_uct_child(tree, current, config.uct_c, ties);
        const auto dirs = run.directions(current, 1, SharedInformation{});
        const int child = run.add_refinement(current, dirs.front());
        const double score = run.node(child).validation_score;
        tree.add_child(current, child, score).visits = 1;
        for (const int id : tree.path_to(current)) {
            auto& s = tree.at(id);
            ++s.visits;
            s.value += (score - s.value) / s.visits;
        }
    }
    return run.finish();
}

SearchOutcome run_sfs(const Task& task, const StrategyConfig& config, const SearchEnv& env) {
    check_kind(config, StrategyKind::sfs);
    SearchRun run(task, config, env);
    constexpr int kForest = 0;
    SearchTree tree;
    auto& forest = tree.add_root(kForest, -std::numeric_limits<double>::infinity());
    forest.directions_generated = true;
    for (int i = 0; i < config.n_init && !run.stopped(); ++i) {
        const int id = run.add_initial();
        tree.add_child(kForest, id, run.node(id).validation_score).visits = 1;
        ++tree.at(kForest).visits;
    }

    SharedInformation info;
    TieBreaker ties;
    while (!run.stopped()) {
        const int selected = select_node_sfs(tree, config.uct_c, ties);
        auto& stats = tree.at(selected);
        if (stats.unused_directions.empty()) {
            stats.unused_directions = run.directions(selected, config.m_directions, info);
            stats.directions_generated = true;
        }
        const auto pick = static_cast<std::ptrdiff_t>(run.rng().index(stats.unused_directions.size()));
        const TextualDirection direction = stats.unused_directions[static_cast<std::size_t>(pick)];
        stats.unused_directions.erase(stats.unused_directions.begin() + pick);

        const int child = run.add_refinement(selected, direction);
        const double score = run.node(child).validation_score;
        tree.add_child(selected, child, score).visits = 1;
        for (const int id : tree.path_to(selected)) {
            auto& s = tree.at(id);
            ++s.visits;
            s.value = std::max(s.value, score);
        }
        info = run.update(selected, child, direction, Role::scout_insight, info);
    }
    return run.finish(std::move(info));
}

SearchOutcome run_irtd(const Task& task, const StrategyConfig& config, const SearchEnv& env) {
    check_kind(config, StrategyKind::irtd);
    SearchRun run(task, config, env);
    std::vector<int> initial;
    for (int i = 0; i < config.n_init && !run.stopped(); ++i) initial.push_back(run.add_initial());

    SharedInformation info;
    if (run.stopped()) return run.finish(std::move(info));

    const int i_max = config.budget_k - config.n_init;
    int i = 0;
    while (i < i_max) {
        for (const int seed_code : initial) {
            const auto dirs = run.directions(seed_code, config.m_directions, info);
            for (const auto& d : dirs) {
                const int refined = run.add_refinement(seed_code, d);
                if (run.node(refined).passed_all_validation && config.early_stop) return run.finish(std::move(info));
                if (++i >= i_max) return run.finish(std::move(info));
                info = run.update(seed_code, refined, d, Role::update_shared_info, info);
            }
        }
    }
    return run.finish(std::move(info));
}

SearchOutcome run_strategy(const Task& task, const StrategyConfig& config, const SearchEnv& env) {
    switch (config.kind) {
        case StrategyKind::bon: return run_bon(task, config, env);
        case StrategyKind::linear: return run_linear(task, config, env);
        case StrategyKind::tree: return run_tree(task, config, env);
        case StrategyKind::sfs: return run_sfs(task, config, env);
        case StrategyKind::irtd: return run_irtd(task, config, env);
    }
    throw Error("unknown strategy kind");
}

}  // namespace refine_search::strategies
