#include "refine_search/harness/stats.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace refine_search;
using namespace refine_search::harness;

namespace {

// Reference values computed with mpmath at 40 digits (inverse regularized
// incomplete beta for t; exact sums over the binary doubles for intervals)
// and frozen here.
struct TRef {
    int df;
    double t;
};
constexpr TRef kTRefs[] = {
    {1, 12.706204736174704647},   {2, 4.3026527297494638523},   {3, 3.1824463052837095927},
    {4, 2.7764451051977943578},   {5, 2.5705818356363155147},   {7, 2.3646242515927853417},
    {10, 2.2281388519862747484},  {30, 2.04227245630123831},    {50, 2.0085591121007611055},
    {100, 1.9839715185235522866}, {150, 1.9759053308966205192}, {199, 1.9719565442517538344},
    {200, 1.9718962236339093822}, {201, 1.9718365067798592651}, {250, 1.9694983934211535865},
    {300, 1.9679030112610870301}, {500, 1.9647198374673677934}, {1000, 1.962339080826408485},
    {10000, 1.9602012398906262578}, {100000, 1.9599877075346096386},
};

SearchTrace evaluated(std::vector<bool> verdicts, std::string id = "t") {
    std::vector<int> parents(verdicts.size(), 0);
    auto tr = rs_test::make_trace(parents, 16, std::move(id));
    for (std::size_t i = 0; i < verdicts.size(); ++i) tr.nodes[i].hidden_result = verdicts[i];
    return tr;
}

/// Independent recount: a task counts iff some node with id <= j is correct.
double oracle_pass(const std::vector<SearchTrace>& traces, int j) {
    double solved = 0;
    for (const auto& t : traces) {
        bool any = false;
        for (const auto& n : t.nodes) any = any || (n.node_id <= j && n.hidden_result.value());
        solved += any ? 1 : 0;
    }
    return solved / static_cast<double>(traces.size());
}

}  // namespace

TEST_CASE("pass_at_k examples") {
    std::vector<SearchTrace> traces;
    for (int i = 0; i < 10; ++i) {
        std::vector<bool> v(16, false);
        if (i < 4) v[static_cast<std::size_t>(i)] = true;  // solved at node i + 1
        traces.push_back(evaluated(v, "t" + std::to_string(i)));
    }
    CHECK(pass_at_k(traces, 4) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(pass_at_k(traces, 16) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(pass_at_k(traces, 2) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(pass_at_k(traces, 0) == 0.0);
    CHECK_THROWS_AS(pass_at_k({}, 1), Error);
}

TEST_CASE("pass_at_k only needs verdicts inside the prefix") {
    auto tr = evaluated({false, true, false});
    tr.nodes[2].hidden_result.reset();
    CHECK(pass_at_k({tr}, 2) == 1.0);
    CHECK_THROWS_WITH_AS(pass_at_k({tr}, 3), doctest::Contains("unevaluated trace"), Error);

    // early-terminated traces: j past the end uses the realized nodes
    auto early = evaluated({false, false, true});
    early.terminated_early = true;
    early.nodes[2].passed_all_validation = true;
    CHECK(pass_at_k({early}, 2) == 0.0);
    CHECK(pass_at_k({early}, 3) == 1.0);
    CHECK(pass_at_k({early}, 16) == 1.0);
}

TEST_CASE("pass_at_k matches a brute-force recount on 1000 synthetic trace sets") {
    std::mt19937_64 gen(31337);
    int matches = 0;
    for (int set = 0; set < 1000; ++set) {
        std::uniform_int_distribution<int> tasks(1, 12), len(1, 16);
        std::bernoulli_distribution correct(0.1);
        std::vector<SearchTrace> traces;
        const int n = tasks(gen);
        for (int t = 0; t < n; ++t) {
            std::vector<bool> v(static_cast<std::size_t>(len(gen)));
            for (auto&& x : v) x = correct(gen);
            traces.push_back(evaluated(v));
        }
        bool all = true;
        double prev = 0.0;
        for (int j = 0; j <= 17; ++j) {
            const double got = pass_at_k(traces, j);
            all = all && got == oracle_pass(traces, j);
            CHECK(got >= prev);
            prev = got;
        }
        matches += all;
    }
    CHECK(matches == 1000);
}

TEST_CASE("t critical values match the high-precision reference") {
    for (const auto& r : kTRefs) {
        CAPTURE(r.df);
        CHECK(std::abs(t_critical_975(r.df) - r.t) <= 1e-9);
    }
    CHECK_THROWS_AS(t_critical_975(0), Error);
    // continuity across the table boundary and monotone decrease
    double prev = t_critical_975(1);
    for (int df = 2; df <= 1000; ++df) {
        const double t = t_critical_975(df);
        CHECK(t < prev);
        prev = t;
    }
}

TEST_CASE("confidence intervals match the high-precision reference") {
    SUBCASE("n = 2") {
        const auto ci = confidence_interval({0.0, 1.0});
        CHECK(ci.mean == 0.5);
        CHECK(std::abs(ci.half_width - 6.353102368087352323) <= 1e-9);
    }
    SUBCASE("n = 5") {
        const auto a = confidence_interval({0.2, 0.35, 0.5, 0.45, 0.3});
        CHECK(std::abs(a.mean - 0.36) <= 1e-12);
        CHECK(std::abs(a.half_width - 0.14822160825333078106) <= 1e-9);
        const auto b = confidence_interval({0.8125, 0.875, 0.75, 0.9375, 0.8125});
        CHECK(std::abs(b.mean - 0.8375) <= 1e-12);
        CHECK(std::abs(b.half_width - 0.088482173561392035592) <= 1e-9);
    }
    SUBCASE("n = 250 uses the expansion beyond the table") {
        std::vector<double> v;
        for (int i = 0; i < 250; ++i) v.push_back(static_cast<double>((i * 37) % 101) / 101.0);
        const auto ci = confidence_interval(v);
        CHECK(std::abs(ci.mean - 0.49291089108910891103) <= 1e-12);
        CHECK(std::abs(ci.half_width - 0.036101041280798451278) <= 1e-9);
    }
    SUBCASE("equal values and errors") {
        CHECK(confidence_interval({0.3, 0.3, 0.3}).half_width == 0.0);
        CHECK_THROWS_AS(confidence_interval({0.3}), Error);
        CHECK_THROWS_AS(confidence_interval({0.3, 0.4}, 0.9), Error);
    }
}

TEST_CASE("scaling curves") {
    const std::vector<SearchTrace> run1 = {evaluated({false, true}, "a"), evaluated({false, false, false}, "b")};
    const std::vector<SearchTrace> run2 = {evaluated({true}, "a"), evaluated({false, false, true}, "b")};
    const auto single = scaling_curve("x", {run1}, 4);
    REQUIRE(single.points.size() == 4);
    CHECK(single.points[0].mean == 0.0);
    CHECK(single.points[1].mean == 0.5);
    CHECK(single.points[3].half_width == 0.0);

    const auto both = scaling_curve("x", {run1, run2}, 3);
    CHECK(both.points[0].per_run == std::vector<double>{0.0, 0.5});
    CHECK(both.points[0].mean == 0.25);
    CHECK(std::abs(both.points[0].half_width - 6.353102368087352323 * 0.5) <= 1e-9);
    CHECK(both.points[2].per_run == std::vector<double>{0.5, 1.0});
    for (std::size_t i = 1; i < both.points.size(); ++i) CHECK(both.points[i].mean >= both.points[i - 1].mean);

    const auto csv = curve_csv(single);
    CHECK(csv.rfind("j,mean,ci_half_width\n", 0) == 0);
    CHECK(csv.find("2,0.500000,0.000000") != std::string::npos);
    CHECK(to_json(both)["points"].size() == 3);
    CHECK_THROWS_AS(scaling_curve("x", {}, 3), Error);
}
