#include "refine_search/analysis/depth.hpp"
#include "refine_search/analysis/diversity.hpp"
#include "refine_search/core/trace_io.hpp"
#include "refine_search/harness/experiment.hpp"
#include "refine_search/harness/stats.hpp"
#include "refine_search/sandbox/sandbox.hpp"
#include "refine_search/vspace/checks.hpp"

#include "analysis_fixtures.hpp"
#include "mock_experiment.hpp"
#include "sfs_oracle.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>

using namespace refine_search;
namespace fs = std::filesystem;

namespace {

// Tolerances and sizes, pinned.
constexpr std::size_t kCampaignModels = 200;
constexpr std::size_t kCampaignMaxSize = 5;
constexpr double kCampaignSeconds = 60.0;
constexpr int kSurvivalTrials = 100000;
constexpr double kSurvivalIndep = 0.729;
constexpr double kSurvivalUnion = 0.7;
constexpr int kSelectionTrials = 100000;
constexpr double kSelectionEpsilon = 0.2;
constexpr double kStandardErrors = 3.0;
constexpr int kRandomTrees = 1000;
constexpr int kTraceSets = 1000;
constexpr double kCiTolerance = 1e-9;
constexpr double kDiversityTolerance = 1e-12;
constexpr int kMockRuns = 2;

struct Outcome {
    bool pass = false;
    std::string detail;
};

// -------------------------------------------------------------------------
// shared mock experiment

struct MockRuns {
    rs_test::TempDir dir{"acceptance"};
    harness::ExperimentSpec spec;
    harness::ExperimentResult result;
    std::map<std::string, std::vector<SearchTrace>> traces;  // by label
};

const std::string kSfsOneRoot = "sfs_one_root";

MockRuns& mock_runs() {
    static std::optional<MockRuns> runs;
    if (runs) return *runs;
    runs.emplace();
    auto& r = *runs;
    r.spec = rs_test::mock_spec(r.dir.path(),
                                {"bon", "linear", "tree", "sfs", "no_foresting", "irtd1", "irtd3", "irtd5"}, kMockRuns);
    auto one = strategies::StrategyConfig::preset("sfs");
    one.n_init = 1;
    one.label = kSfsOneRoot;
    r.spec.strategies.push_back(one);
    auto gateway = make_gateway(r.spec.backend);
    sandbox::RunnerPool pool(r.spec.runner);
    r.result = run_experiment(r.spec, gateway, pool);
    for (const auto& f : collect_trace_files({harness::trace_dir(r.spec).string()})) {
        auto t = load_trace(f);
        r.traces[t.label].push_back(std::move(t));
    }
    return r;
}

// -------------------------------------------------------------------------

Outcome campaign() {
    vspace::CampaignOptions o;
    o.models = kCampaignModels;
    o.max_size = kCampaignMaxSize;
    const auto start = std::chrono::steady_clock::now();
    const auto report = vspace::run_campaign(o);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string detail;
    bool ok = report.sections.size() == 4;
    for (const auto& s : report.sections) {
        ok = ok && s.models == kCampaignModels && s.violations == 0 && s.checks > 0;
        detail += fmt::format("{}: {} models, {} checks, {} violations; ", s.name, s.models, s.checks, s.violations);
    }
    ok = ok && secs < kCampaignSeconds;
    return {ok, detail + fmt::format("{:.2f} s (limit {} s)", secs, kCampaignSeconds)};
}

Outcome drifting_fixture() {
    const auto m = vspace::drifting_interpretation_model();
    const auto h = vspace::drifting_interpretation_history();
    if (h.size() != 2) return {false, "fixture history must have two steps"};
    const auto c1 = vspace::consistent_directions(m, h[0].code, h[0].e);
    const auto c2 = vspace::consistent_directions(m, h[1].code, h[1].e);
    const auto v2 = vspace::version_space(m, h);
    return {v2 == 0 && c1 != 0 && c2 != 0,
            fmt::format("|C1| = {}, |C2| = {}, |V2| = {}", std::popcount(c1), std::popcount(c2), std::popcount(v2))};
}

Outcome survival() {
    // c0 sits in the basin of d0 and keeps it; c1 rules it out
    vspace::VersionSpaceModel m;
    m.directions = {"d0", "d1"};
    m.codes = {"c0", "c1"};
    m.counterexamples = {"e0"};
    m.pass = {0b01, 0b10};
    m.obs = {0b1, 0b1};
    m.cons = {{0b01}, {0b10}};
    const vspace::GeneratorSpec gen{m, {0.9, 0.1}};
    const auto a = vspace::survival_probability(gen, 0, 3, 0.1, kSurvivalTrials, 42);
    const auto b = vspace::survival_probability(gen, 0, 3, 0.1, kSurvivalTrials, 42);
    const double floor =
        kSurvivalIndep - kStandardErrors * std::sqrt(kSurvivalIndep * (1 - kSurvivalIndep) / kSurvivalTrials);
    const bool ok = a.empirical >= floor && a.empirical >= kSurvivalUnion && a.survived == b.survived &&
                    std::abs(a.bound_union - kSurvivalUnion) < 1e-12;
    return {ok, fmt::format("empirical {:.5f} (floor {:.5f}, union bound {:.3f}); rerun {}", a.empirical, floor,
                            a.bound_union, a.survived == b.survived ? "identical" : "differs")};
}

Outcome selection_simulator() {
    const auto none = strategies::simulate_selection_depth(rs_test::five_children_tree(0), 1.0, kSelectionTrials, 1);
    const double p_none = none.probability_depth_at_least(2);
    const bool none_ok = none.depth_counts.size() == 1 && none.depth_counts.at(1) == kSelectionTrials;
    const auto one = strategies::simulate_selection_depth(rs_test::five_children_tree(1), 1.0, kSelectionTrials, 7);
    const double p = one.probability_depth_at_least(2);
    const double se = std::sqrt(kSelectionEpsilon * (1 - kSelectionEpsilon) / kSelectionTrials);
    const bool one_ok = std::abs(one.epsilon_bound - kSelectionEpsilon) < 1e-15 &&
                        std::abs(p - kSelectionEpsilon) <= kStandardErrors * se;
    return {none_ok && one_ok, fmt::format("G empty: Pr(depth >= 2) = {}; one of five: {:.5f} vs exact {} (3 SE = {:.5f})",
                                           p_none, p, one.epsilon_bound, kStandardErrors * se)};
}

Outcome algorithm_fidelity() {
    std::mt19937_64 gen(99);
    int agree = 0;
    int total = 0;
    int reachable_ok = 0;
    for (int i = 0; i < kRandomTrees; ++i) {
        const auto tree = rs_test::random_tree(gen);
        const auto t = rs_test::snapshot(tree);
        for (const double c : {0.0, 1.0, 2.5}) {
            strategies::TieBreaker lowest;
            ++total;
            agree += strategies::select_node_sfs(tree, c, lowest) == rs_test::oracle_select(t, 0, c);
            std::set<int> reachable;
            rs_test::oracle_reachable(t, 0, c, reachable);
            strategies::TieBreaker random(static_cast<std::uint64_t>(i));
            reachable_ok += reachable.contains(strategies::select_node_sfs(tree, c, random));
        }
    }

    auto& runs = mock_runs();
    int irtd_traces = 0;
    int irtd_bad = 0;
    for (const auto* label : {"irtd1", "irtd3", "irtd5"}) {
        for (const auto& t : runs.traces[label]) {
            ++irtd_traces;
            irtd_bad += max_depth(t) > 2 || static_cast<int>(t.nodes.size()) > t.budget_k;
        }
    }

    const auto& one = runs.traces[kSfsOneRoot];
    const auto& nf = runs.traces["no_foresting"];
    bool identical = !one.empty() && one.size() == nf.size();
    for (std::size_t i = 0; identical && i < one.size(); ++i) {
        auto a = one[i];
        a.label = nf[i].label;
        identical = a == nf[i];
    }
    const bool ok = agree == total && reachable_ok == total && irtd_traces > 0 && irtd_bad == 0 && identical;
    return {ok, fmt::format("select_node_sfs {}/{} agree ({}/{} randomized in oracle set); IRTD {} traces, {} over "
                            "depth 2 or budget; sfs n_init=1 vs no_foresting: {} traces {}",
                            agree, total, reachable_ok, total, irtd_traces, irtd_bad, one.size(),
                            identical ? "identical" : "differ")};
}

Outcome mock_scaling() {
    auto& runs = mock_runs();
    bool ok = runs.result.failures.empty() && runs.result.curves.size() == 9;
    int wrong = 0;
    int non_monotone = 0;
    for (const auto& c : runs.result.curves) {
        ok = ok && c.points.size() == 16;
        double prev = 0.0;
        for (const auto& p : c.points) {
            wrong += std::abs(p.mean - rs_test::mock_expected_pass(p.j)) > 1e-12;
            for (const double v : p.per_run) wrong += std::abs(v - rs_test::mock_expected_pass(p.j)) > 1e-12;
            non_monotone += p.mean < prev;
            prev = p.mean;
        }
    }
    return {ok && wrong == 0 && non_monotone == 0,
            fmt::format("{} curves x {} runs, {} points off the step function, {} decreases",
                        runs.result.curves.size(), kMockRuns, wrong, non_monotone)};
}

SearchTrace evaluated(const std::vector<bool>& verdicts) {
    auto tr = rs_test::make_trace(std::vector<int>(verdicts.size(), 0));
    for (std::size_t i = 0; i < verdicts.size(); ++i) tr.nodes[i].hidden_result = verdicts[i];
    return tr;
}

Outcome pass_at_k_and_ci() {
    std::mt19937_64 gen(31337);
    int matches = 0;
    for (int set = 0; set < kTraceSets; ++set) {
        std::uniform_int_distribution<int> tasks(1, 12), len(1, 16);
        std::bernoulli_distribution correct(0.1);
        std::vector<SearchTrace> traces;
        std::vector<std::vector<bool>> raw;
        const int n = tasks(gen);
        for (int t = 0; t < n; ++t) {
            std::vector<bool> v(static_cast<std::size_t>(len(gen)));
            for (auto&& x : v) x = correct(gen);
            raw.push_back(v);
            traces.push_back(evaluated(v));
        }
        bool all = true;
        for (int j = 0; j <= 16; ++j) {
            int solved = 0;
            for (const auto& v : raw) {
                bool any = false;
                for (std::size_t i = 0; i < v.size() && static_cast<int>(i) < j; ++i) any = any || v[i];
                solved += any;
            }
            all = all && harness::pass_at_k(traces, j) == static_cast<double>(solved) / n;
        }
        matches += all;
    }

    struct CiRef {
        std::vector<double> values;
        double mean;
        double half_width;
    };
    std::vector<CiRef> refs = {
        {{0.0, 1.0}, 0.5, 6.353102368087352323},
        {{0.2, 0.35, 0.5, 0.45, 0.3}, 0.36, 0.14822160825333078106},
        {{0.8125, 0.875, 0.75, 0.9375, 0.8125}, 0.8375, 0.088482173561392035592},
    };
    CiRef big{{}, 0.49291089108910891103, 0.036101041280798451278};
    for (int i = 0; i < 250; ++i) big.values.push_back(static_cast<double>((i * 37) % 101) / 101.0);
    refs.push_back(big);
    double worst = 0.0;
    for (const auto& r : refs) {
        const auto ci = harness::confidence_interval(r.values);
        worst = std::max({worst, std::abs(ci.mean - r.mean), std::abs(ci.half_width - r.half_width)});
    }
    const double t1 = harness::t_critical_975(1);
    const bool ok = matches == kTraceSets && worst <= kCiTolerance && std::abs(t1 - 12.706204736174704647) <= kCiTolerance;
    return {ok, fmt::format("{}/{} trace sets match the recount; CI worst error {:.2e} over {} references; t(1) = {:.4f}",
                            matches, kTraceSets, worst, refs.size(), t1)};
}

Outcome depth_tables() {
    const std::vector<std::map<int, int>> planted = {
        {{1, 9338}, {2, 584}, {3, 78}},
        {{1, 93}, {2, 7}},
        {{0, 40}, {1, 11}, {2, 5}, {4, 3}, {7, 1}},
        {{1, 1}, {2, 1}, {3, 1}},
    };
    int mismatches = 0;
    int cells = 0;
    for (std::size_t p = 0; p < planted.size(); ++p) {
        const auto traces = rs_test::planted_traces(planted[p], static_cast<unsigned>(p));
        int solved = 0;
        std::map<int, int> max_counts;
        for (const auto& [d, n] : planted[p]) {
            if (d > 0) solved += n;
            max_counts[std::max(d, 1)] += n;
        }
        const auto first = analysis::first_correct_depth_table(traces);
        const auto deepest = analysis::max_depth_table(traces);
        for (int d = 1; d <= 8; ++d) {
            const int planted_first = d > 0 && planted[p].count(d) ? planted[p].at(d) : 0;
            const int planted_max = max_counts.count(d) ? max_counts.at(d) : 0;
            const auto want_first = fmt::format("{:.2f}", 100.0 * planted_first / solved);
            const auto want_max = fmt::format("{:.2f}", 100.0 * planted_max / static_cast<double>(traces.size()));
            mismatches += fmt::format("{:.2f}", first.percent(d)) != want_first;
            mismatches += fmt::format("{:.2f}", deepest.percent(d)) != want_max;
            cells += 2;
        }
        mismatches += first.excluded != (planted[p].count(0) ? planted[p].at(0) : 0);
    }

    auto& runs = mock_runs();
    const auto sfs = analysis::first_correct_depth_table(runs.traces["sfs"], "sfs");
    const bool dominant = sfs.counted > 0 && sfs.percent(1) >= sfs.percent(2);
    return {mismatches == 0 && dominant,
            fmt::format("{} planted cells, {} mismatches; mock sfs first-correct depth 1: {:.2f}%, depth 2: {:.2f}% "
                        "over {} solved traces",
                        cells, mismatches, sfs.percent(1), sfs.percent(2), sfs.counted)};
}

Outcome diversity() {
    // identical unit vectors
    const std::vector<analysis::Vector> same(4, analysis::Vector{0.6, 0.8, 0.0});
    const auto ones = analysis::diversity_matrix({same, same, same});
    double ones_err = 0.0;
    for (const auto& row : ones.values) {
        for (const double v : row) ones_err = std::max(ones_err, std::abs(v - 1.0));
    }

    // orthogonal steps, end to end through trace grouping and an embeddings file
    rs_test::TempDir dir("acceptance_div");
    std::vector<SearchTrace> traces;
    for (int t = 0; t < 3; ++t) {
        auto tr = rs_test::make_trace({0, 1, 2}, 16, "t" + std::to_string(t));
        tr.nodes[1].direction_used->text = fmt::format("first step {}", t);
        tr.nodes[2].direction_used->text = fmt::format("second step {}", t);
        traces.push_back(tr);
    }
    {
        std::ofstream out(dir.path() / "emb.jsonl");
        for (int t = 0; t < 3; ++t) {
            out << nlohmann::json{{"text_hash", analysis::text_hash(fmt::format("first step {}", t))},
                                  {"vector", {1.0 + t, 0.0, 0.0}}}
                       .dump()
                << "\n";
            out << nlohmann::json{{"text_hash", analysis::text_hash(fmt::format("second step {}", t))},
                                  {"vector", {0.0, 2.0, -1.0 * t}}}
                       .dump()
                << "\n";
        }
    }
    analysis::EmbeddingFile file(dir.path() / "emb.jsonl");
    const auto embedded = analysis::embed_directions(traces, file);
    const auto steps = analysis::diversity_matrix(embedded.by_step);
    const bool orthogonal = steps.values.size() == 2 && steps.values[0][1] == 0.0 && steps.values[1][0] == 0.0;

    // random vectors against the brute-force double loop
    std::mt19937_64 gen(17);
    double worst = 0.0;
    bool symmetric = true;
    for (int round = 0; round < 200; ++round) {
        std::vector<std::vector<analysis::Vector>> groups;
        const int ng = 1 + round % 6;
        for (int g = 0; g < ng; ++g) groups.push_back(rs_test::random_group(gen, 1 + (round + g) % 7, 1 + round % 9));
        const auto m = analysis::diversity_matrix(groups);
        for (int i = 0; i < ng; ++i) {
            for (int j = 0; j < ng; ++j) {
                const auto ui = static_cast<std::size_t>(i);
                const auto uj = static_cast<std::size_t>(j);
                worst = std::max(worst,
                                 std::abs(m.values[ui][uj] - rs_test::brute_mean_cosine(groups[ui], groups[uj], i == j)));
                symmetric = symmetric && m.values[ui][uj] == m.values[uj][ui];
            }
        }
    }
    const bool ok = ones_err <= kDiversityTolerance && orthogonal && worst <= kDiversityTolerance && symmetric;
    return {ok, fmt::format("identical: max |x - 1| = {:.1e}; orthogonal steps off-diagonal = {}; brute force worst "
                            "{:.1e}; symmetric: {}",
                            ones_err, orthogonal ? "0" : "nonzero", worst, symmetric ? "yes" : "no")};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"version-space campaign", campaign},
        {"drifting interpretation fixture", drifting_fixture},
        {"survival probability", survival},
        {"selection depth simulator", selection_simulator},
        {"algorithm fidelity", algorithm_fidelity},
        {"mock end-to-end scaling", mock_scaling},
        {"pass@k and confidence intervals", pass_at_k_and_ci},
        {"depth tables", depth_tables},
        {"diversity matrices", diversity},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, fmt::format("exception: {}", e.what())};
        }
        failed += !o.pass;
        std::cout << fmt::format("{} {}: {}", o.pass ? "PASS" : "FAIL", name, o.detail) << std::endl;
    }
    std::cout << fmt::format("{} of {} criteria passed", criteria.size() - static_cast<std::size_t>(failed),
                             criteria.size())
              << std::endl;
    return failed == 0 ? 0 : 1;
}
