#include "refine_search/vspace/checks.hpp"
#include "refine_search/vspace/model.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

using namespace refine_search;
using namespace refine_search::vspace;

namespace {

using IdSet = std::set<int>;

// Raw table reads; all set algebra below is done on std::set.
bool pass_at(const VersionSpaceModel& m, int c, int d) { return (m.pass[c] >> d) & 1U; }
bool cons_at(const VersionSpaceModel& m, int c, int d, int e) { return (m.cons[c][e] >> d) & 1U; }
bool obs_at(const VersionSpaceModel& m, int c, int e) { return (m.obs[c] >> e) & 1U; }
int nd(const VersionSpaceModel& m) { return static_cast<int>(m.directions.size()); }
int nc(const VersionSpaceModel& m) { return static_cast<int>(m.codes.size()); }
int ne(const VersionSpaceModel& m) { return static_cast<int>(m.counterexamples.size()); }

IdSet to_set(Bits b) {
    IdSet s;
    for (int i = 0; i < 64; ++i) {
        if ((b >> i) & 1U) s.insert(i);
    }
    return s;
}

IdSet all_dirs(const VersionSpaceModel& m) {
    IdSet s;
    for (int d = 0; d < nd(m); ++d) s.insert(d);
    return s;
}

IdSet oracle_consistent(const VersionSpaceModel& m, int c, int e) {
    IdSet s;
    for (int d = 0; d < nd(m); ++d) {
        if (cons_at(m, c, d, e)) s.insert(d);
    }
    return s;
}

IdSet intersect(const IdSet& a, const IdSet& b) {
    IdSet out;
    for (int x : a) {
        if (b.contains(x)) out.insert(x);
    }
    return out;
}

IdSet oracle_fold(const VersionSpaceModel& m, const History& h, std::size_t from = 0) {
    IdSet v = all_dirs(m);
    for (std::size_t i = from; i < h.size(); ++i) v = intersect(v, oracle_consistent(m, h[i].code, h[i].e));
    return v;
}

IdSet oracle_global_star(const VersionSpaceModel& m) {
    IdSet s;
    for (int c = 0; c < nc(m); ++c) {
        for (int d = 0; d < nd(m); ++d) {
            if (pass_at(m, c, d)) s.insert(d);
        }
    }
    return s;
}

IdSet oracle_stable_star(const VersionSpaceModel& m, const IdSet& c_init) {
    IdSet s;
    for (int d : oracle_global_star(m)) {
        bool ok = true;
        for (int c : c_init) {
            for (int e = 0; e < ne(m); ++e) {
                if (obs_at(m, c, e) && !cons_at(m, c, d, e)) ok = false;
            }
        }
        if (ok) s.insert(d);
    }
    return s;
}

IdSet oracle_U(const VersionSpaceModel& m, const IdSet& b) {
    IdSet v = all_dirs(m);
    for (int c : b) {
        for (int e = 0; e < ne(m); ++e) {
            if (obs_at(m, c, e)) v = intersect(v, oracle_consistent(m, c, e));
        }
    }
    return v;
}

bool oracle_sound(const VersionSpaceModel& m, int d, const IdSet& c_init) {
    for (int c : c_init) {
        if (!pass_at(m, c, d)) continue;
        for (int e = 0; e < ne(m); ++e) {
            if (obs_at(m, c, e) && !cons_at(m, c, d, e)) return false;
        }
    }
    return true;
}

Bits bits_of(const IdSet& s) {
    Bits b = 0;
    for (int x : s) b |= Bits{1} << x;
    return b;
}

bool is_subset(const IdSet& a, const IdSet& b) {
    return std::all_of(a.begin(), a.end(), [&](int x) { return b.contains(x); });
}

/// Blank model: every table zero, nothing observable.
VersionSpaceModel blank(int d, int c, int e) {
    VersionSpaceModel m;
    for (int i = 0; i < d; ++i) m.directions.push_back("d" + std::to_string(i));
    for (int i = 0; i < c; ++i) m.codes.push_back("c" + std::to_string(i));
    for (int i = 0; i < e; ++i) m.counterexamples.push_back("e" + std::to_string(i));
    m.pass.assign(static_cast<std::size_t>(c), 0);
    m.cons.assign(static_cast<std::size_t>(c), std::vector<Bits>(static_cast<std::size_t>(e), 0));
    m.obs.assign(static_cast<std::size_t>(c), 0);
    return m;
}

VersionSpaceModel random_instance(std::uint64_t seed, std::size_t size = 4) {
    return random_model({size, size, size}, {}, seed);
}

History random_history(const VersionSpaceModel& m, std::mt19937_64& gen, std::size_t len) {
    const auto steps = observable_steps(m, m.all_codes());
    History h;
    if (steps.empty()) return h;
    std::uniform_int_distribution<std::size_t> pick(0, steps.size() - 1);
    for (std::size_t i = 0; i < len; ++i) h.push_back(steps[pick(gen)]);
    return h;
}

Rational mu(const VersionSpaceModel& m, const IdSet& s) {
    return Rational(static_cast<std::int64_t>(s.size()), static_cast<std::int64_t>(m.directions.size()));
}

}  // namespace

TEST_CASE("succeeding and consistent directions") {
    auto m = blank(3, 2, 2);
    CHECK(succeeding_directions(m, 0) == 0);
    CHECK(consistent_directions(m, 1, 1) == 0);
    m.pass[1] = 0b101;
    m.cons[0][1] = 0b011;
    CHECK(to_set(succeeding_directions(m, 1)) == IdSet{0, 2});
    CHECK(to_set(consistent_directions(m, 0, 1)) == IdSet{0, 1});
    CHECK_THROWS_AS(succeeding_directions(m, 5), Error);
    CHECK_THROWS_AS(consistent_directions(m, 0, 9), Error);

    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto r = random_instance(seed);
        for (int c = 0; c < nc(r); ++c) {
            IdSet scan;
            for (int d = 0; d < nd(r); ++d) {
                if (pass_at(r, c, d)) scan.insert(d);
            }
            CHECK(to_set(succeeding_directions(r, c)) == scan);
            for (int e = 0; e < ne(r); ++e) CHECK(to_set(consistent_directions(r, c, e)) == oracle_consistent(r, c, e));
        }
    }
}

TEST_CASE("version space") {
    const auto m = drifting_interpretation_model();
    CHECK(version_space(m, {}) == m.all_directions());
    const auto h = drifting_interpretation_history();
    CHECK(version_space(m, h) == 0);

    std::mt19937_64 gen(1);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto r = random_instance(seed);
        const auto hist = random_history(r, gen, 3);
        if (hist.empty()) continue;
        CHECK(to_set(version_space(r, hist)) == oracle_fold(r, hist));
    }
}

TEST_CASE("global star, basins and duality") {
    auto m = blank(3, 3, 1);
    CHECK(global_star(m) == 0);
    for (int d = 0; d < 3; ++d) CHECK(basin(m, d) == 0);
    m.pass[2] = 0b001;
    CHECK(to_set(global_star(m)) == IdSet{0});
    CHECK(to_set(basin(m, 0)) == IdSet{2});
    CHECK_THROWS_AS(basin(m, 3), Error);

    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto r = random_instance(seed, 5);
        CHECK(to_set(global_star(r)) == oracle_global_star(r));
        for (int c = 0; c < nc(r); ++c) {
            for (int d = 0; d < nd(r); ++d) {
                CHECK(contains(succeeding_directions(r, c), d) == contains(basin(r, d), c));
            }
        }
    }
}

TEST_CASE("stable star") {
    auto m = blank(3, 2, 2);
    m.pass[0] = 0b011;
    m.pass[1] = 0b100;
    CHECK(stable_star(m, m.all_codes()) == global_star(m));

    // d2 passes on c1 and survives the only observation
    m.obs[0] = 0b01;
    m.cons[0][0] = 0b100;
    CHECK(to_set(stable_star(m, m.all_codes())) == IdSet{2});
    CHECK_THROWS_AS(stable_star(m, 0), Error);

    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto r = random_instance(seed);
        for (Bits c_init = 1; c_init <= r.all_codes(); ++c_init) {
            CHECK(to_set(stable_star(r, c_init)) == oracle_stable_star(r, to_set(c_init)));
        }
    }
}

TEST_CASE("local soundness") {
    auto m = blank(2, 2, 1);
    m.obs = {0b1, 0b1};
    // no code in C_init where d0 succeeds: vacuously sound
    CHECK(check_local_soundness(m, 0, m.all_codes()));
    m.pass[1] = 0b01;
    CHECK_FALSE(check_local_soundness(m, 0, m.all_codes()));
    m.cons[1][0] = 0b01;
    CHECK(check_local_soundness(m, 0, m.all_codes()));

    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto r = random_instance(seed);
        for (int d = 0; d < nd(r); ++d) {
            for (Bits c_init = 1; c_init <= r.all_codes(); ++c_init) {
                CHECK(check_local_soundness(r, d, c_init) == oracle_sound(r, d, to_set(c_init)));
            }
        }
    }
}

TEST_CASE("multi-code and single-code safety") {
    SUBCASE("single code with a sound succeeding direction") {
        auto m = blank(3, 1, 2);
        m.pass[0] = 0b010;
        m.obs[0] = 0b11;
        m.cons[0][0] = 0b011;
        m.cons[0][1] = 0b110;
        REQUIRE(single_code_premise(m, 0));
        const auto r = check_single_code_safety_exhaustive(m, 0, {});
        CHECK(r.premise_met);
        CHECK(r.ok());
        CHECK(r.protected_set == 0b010);
        CHECK(r.prefixes > 0);
    }
    SUBCASE("premise unmet") {
        auto m = blank(2, 2, 1);
        m.pass[0] = 0b01;
        m.obs[0] = 0b1;
        const auto r = check_safety_exhaustive(m, m.all_codes(), {});
        CHECK_FALSE(r.premise_met);
        CHECK(r.premise_note.find("premise unmet") != std::string::npos);
        CHECK_FALSE(r.ok());
        CHECK_FALSE(check_single_code_safety_exhaustive(m, 1, {}).premise_met);
    }
    SUBCASE("histories outside C_init are rejected") {
        auto m = blank(2, 2, 1);
        m.pass = {0b01, 0b01};
        m.cons = {{0b01}, {0b01}};
        m.obs = {0b1, 0b1};
        CHECK_THROWS_AS(check_safety(m, 0b01, {History{{1, 0}}}), Error);
    }
    SUBCASE("random premise-satisfying models, exhaustive histories") {
        for (std::uint64_t seed = 0; seed < 30; ++seed) {
            const auto r = random_model({4, 4, 4}, {}, seed, has_stable_star);
            const auto report = check_safety_exhaustive(r, r.all_codes(), {});
            CHECK(report.ok());
            // independent restatement over the same enumeration
            const auto star = oracle_stable_star(r, to_set(r.all_codes()));
            std::size_t visited = 0;
            for_each_history(observable_steps(r, r.all_codes()), r.num_counterexamples(), {}, [&](const History& h) {
                ++visited;
                const auto v = oracle_fold(r, h);
                CHECK(is_subset(star, v));
                CHECK_FALSE(v.empty());
                History shorter(h.begin(), h.end() - 1);
                CHECK(is_subset(v, oracle_fold(r, shorter)));
            });
            CHECK(visited == report.prefixes);
        }
    }
}

TEST_CASE("history enumeration") {
    const std::vector<Observation> steps{{0, 0}, {0, 1}, {1, 0}};
    std::size_t count = 0;
    std::size_t max_len = 0;
    const auto n = for_each_history(steps, 2, {}, [&](const History& h) {
        ++count;
        max_len = std::max(max_len, h.size());
    });
    // 3 + 9 + 27 + 81 prefixes up to length 4
    CHECK(n == 120);
    CHECK(count == 120);
    CHECK(max_len == 4);

    EnumerationCaps sampled;
    sampled.exhaustive_max_e = 1;
    sampled.samples = 50;
    std::size_t sampled_count = 0;
    for_each_history(steps, 2, sampled, [&](const History&) { ++sampled_count; });
    CHECK(sampled_count <= 200);
    CHECK(sampled_count >= 4);
}

TEST_CASE("survival probability") {
    // c0 lies in the basin of d0 and never rules it out; c1 does not and always rules it out
    auto m = blank(2, 2, 1);
    m.pass = {0b01, 0b10};
    m.obs = {0b1, 0b1};
    m.cons = {{0b01}, {0b10}};

    SUBCASE("delta = 0") {
        const auto r = survival_probability({m, {1.0, 0.0}}, 0, 3, 0.0, 10000, 1);
        CHECK(r.survived == r.trials);
        CHECK(r.empirical == 1.0);
        CHECK(r.bound_union == 1.0);
        CHECK(r.bound_indep == 1.0);
    }
    SUBCASE("m = 3, delta = 0.1") {
        const auto r = survival_probability({m, {0.9, 0.1}}, 0, 3, 0.1, 100000, 42);
        CHECK(r.bound_union == doctest::Approx(0.7).epsilon(1e-12));
        CHECK(r.bound_indep == doctest::Approx(0.729).epsilon(1e-12));
        CHECK(r.marginal == doctest::Approx(0.9).epsilon(1e-12));
        CHECK(r.empirical >= 0.729 - 3 * std::sqrt(0.729 * 0.271 / 1e5));
        CHECK(r.empirical >= r.bound_union);
        const auto again = survival_probability({m, {0.9, 0.1}}, 0, 3, 0.1, 100000, 42);
        CHECK(again.survived == r.survived);
    }
    SUBCASE("m = 1: bounds coincide") {
        const auto r = survival_probability({m, {0.8, 0.2}}, 0, 1, 0.2, 1000, 3);
        CHECK(r.bound_union == doctest::Approx(0.8).epsilon(1e-12));
        CHECK(r.bound_indep == doctest::Approx(r.bound_union).epsilon(1e-12));
    }
    SUBCASE("marginal self-check and soundness") {
        CHECK_THROWS_WITH_AS(survival_probability({m, {0.5, 0.5}}, 0, 3, 0.1, 10, 0),
                             doctest::Contains("marginal guarantee"), Error);
        auto unsound = m;
        unsound.cons[0][0] = 0b10;
        CHECK_THROWS_WITH_AS(survival_probability({unsound, {1.0, 0.0}}, 0, 3, 0.0, 10, 0),
                             doctest::Contains("local soundness"), Error);
    }
    SUBCASE("union bound decreases strictly in m") {
        double prev = 2.0;
        for (int k = 1; k <= 6; ++k) {
            const auto r = survival_probability({m, {0.9, 0.1}}, 0, k, 0.1, 10, 0);
            CHECK(r.bound_union < prev);
            prev = r.bound_union;
        }
    }
}

TEST_CASE("discriminative power") {
    auto open = blank(3, 2, 1);
    CHECK(discriminative_U(open, 0b11) == open.all_directions());
    CHECK_THROWS_AS(discriminative_U(open, 0), Error);

    SUBCASE("random models: subset pairs") {
        for (std::uint64_t seed = 0; seed < 60; ++seed) {
            const auto r = random_model({4, 4, 3}, {}, seed, has_stable_star);
            const Bits c_init = r.all_codes();
            const auto star = oracle_stable_star(r, to_set(c_init));
            for (Bits b2 = 1; b2 <= c_init; ++b2) {
                const auto u2 = oracle_U(r, to_set(b2));
                CHECK(to_set(discriminative_U(r, b2)) == u2);
                CHECK(is_subset(star, u2));
                CHECK_FALSE(u2.empty());
                for (Bits b1 = b2; b1 != 0; b1 = (b1 - 1) & b2) {
                    const auto u1 = oracle_U(r, to_set(b1));
                    CHECK(is_subset(u2, u1));
                    const auto z1 = surviving_pairs(r, c_init, b1);
                    const auto z2 = surviving_pairs(r, c_init, b2);
                    CHECK(z2.size() <= z1.size());
                    CHECK(std::includes(z1.begin(), z1.end(), z2.begin(), z2.end()));
                    CHECK(z2.size() == static_cast<std::size_t>(count(c_init)) * u2.size());
                }
            }
            CHECK(check_discriminative(r, c_init).ok());
        }
    }
    SUBCASE("strict case has an elimination witness") {
        auto m = blank(3, 2, 1);
        m.pass = {0b001, 0b001};
        m.obs = {0b1, 0b1};
        m.cons = {{0b011}, {0b101}};
        const Bits b1 = 0b01, b2 = 0b11;
        const auto u1 = to_set(discriminative_U(m, b1));
        const auto u2 = to_set(discriminative_U(m, b2));
        CHECK(u1 == IdSet{0, 1});
        CHECK(u2 == IdSet{0});
        const auto w = find_elimination_witness(m, b2, b1, b2, 1);
        REQUIRE(w.has_value());
        CHECK(w->code == 1);
        CHECK(w->e == 0);
        CHECK_FALSE(cons_at(m, w->code, 1, w->e));
        CHECK(is_subset(oracle_stable_star(m, to_set(b2)), oracle_consistent(m, w->code, w->e)));
        CHECK_FALSE(find_elimination_witness(m, b2, b1, b2, 0).has_value());
    }
}

TEST_CASE("linear and windowed version spaces") {
    const auto m = drifting_interpretation_model();
    const auto h = drifting_interpretation_history();
    REQUIRE(h.size() == 2);
    CHECK(linear_version_space(m, History(h.begin(), h.begin() + 1)) != 0);
    CHECK(consistent_directions(m, h[0].code, h[0].e) != 0);
    CHECK(consistent_directions(m, h[1].code, h[1].e) != 0);
    CHECK(linear_version_space(m, h) == 0);
    CHECK(windowed_version_space(m, h, 1) == consistent_directions(m, h[1].code, h[1].e));
    CHECK_THROWS_AS(windowed_version_space(m, h, 3), Error);
    CHECK_THROWS_AS(windowed_version_space(m, h, 0), Error);

    std::mt19937_64 gen(8);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto r = random_instance(seed);
        const auto hist = random_history(r, gen, 5);
        if (hist.empty()) continue;
        CHECK(to_set(linear_version_space(r, hist)) == oracle_fold(r, hist));
        for (std::size_t w = 1; w <= hist.size(); ++w) {
            CHECK(to_set(windowed_version_space(r, hist, w)) == oracle_fold(r, hist, hist.size() - w));
        }
    }
}

TEST_CASE("window limit and drift") {
    const Rational half(1, 2), tenth(1, 10), fifth(1, 5), zero(0);
    CHECK(window_limit(half, fifth, tenth) == Rational(3));
    CHECK_FALSE(window_limit(half, zero, tenth).has_value());
    CHECK(window_guaranteed(half, fifth, tenth, 3));
    CHECK_FALSE(window_guaranteed(half, fifth, tenth, 4));
    CHECK(window_guaranteed(half, zero, tenth, 100));
    CHECK_FALSE(window_guaranteed(Rational(1, 20), zero, tenth, 1));

    SUBCASE("fixed code gives zero drift") {
        auto m = blank(4, 2, 2);
        m.obs[0] = 0b11;
        m.cons[0][0] = 0b0111;
        m.cons[0][1] = 0b1110;
        const History h{{0, 0}, {0, 0}, {0, 0}};
        const auto d = drift_measures(m, h, tenth);
        CHECK(d.delta_drift == zero);
        CHECK_FALSE(d.w_max.has_value());
        CHECK(d.alpha == Rational(3, 4));
    }
    SUBCASE("measures follow the definitions") {
        std::mt19937_64 gen(12);
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            const auto r = random_instance(seed);
            const auto hist = random_history(r, gen, 5);
            if (hist.empty()) continue;
            Rational alpha(1), delta(0);
            for (std::size_t i = 0; i < hist.size(); ++i) {
                const auto cur = oracle_consistent(r, hist[i].code, hist[i].e);
                alpha = std::min(alpha, mu(r, cur));
                if (i > 0) {
                    IdSet diff;
                    for (int x : oracle_consistent(r, hist[i - 1].code, hist[i - 1].e)) {
                        if (!cur.contains(x)) diff.insert(x);
                    }
                    delta = std::max(delta, mu(r, diff));
                }
            }
            const auto d = drift_measures(r, hist, tenth);
            CHECK(d.alpha == alpha);
            CHECK(d.delta_drift == delta);
            // the inequality for every t and w <= t
            for (std::size_t t = 1; t <= hist.size(); ++t) {
                const History prefix(hist.begin(), hist.begin() + static_cast<std::ptrdiff_t>(t));
                for (std::size_t w = 1; w <= t; ++w) {
                    const auto win = oracle_fold(r, prefix, t - w);
                    CHECK(!(mu(r, win) < alpha - Rational(static_cast<std::int64_t>(w) - 1) * delta));
                }
            }
        }
    }
    SUBCASE("exhaustive drift check on random models") {
        for (std::uint64_t seed = 0; seed < 40; ++seed) {
            const auto r = random_instance(seed);
            const auto report = drift_bound_check_exhaustive(r, tenth, {5, 4, 10000, seed});
            CHECK(report.violations.empty());
            CHECK(report.falsifications.empty());
        }
    }
}

TEST_CASE("random model generator") {
    CHECK(random_model({3, 4, 2}, {}, 9) == random_model({3, 4, 2}, {}, 9));
    CHECK_FALSE(random_model({3, 4, 2}, {}, 9) == random_model({3, 4, 2}, {}, 10));
    const auto f = random_model({4, 4, 4}, {}, 3, has_stable_star);
    CHECK(stable_star(f, f.all_codes()) != 0);
    const auto ones = random_model({3, 3, 3}, {1.0, 1.0, 1.0}, 0);
    for (std::size_t c = 0; c < 3; ++c) {
        CHECK(ones.pass[c] == ones.all_directions());
        CHECK(ones.obs[c] == full_set(3));
        for (const auto cell : ones.cons[c]) CHECK(cell == ones.all_directions());
    }
    CHECK_THROWS_WITH_AS(random_model({2, 2, 2}, {0.0, 0.5, 0.5}, 0, has_stable_star, 20),
                         doctest::Contains("unsatisfied"), Error);
    CHECK_THROWS_AS(random_model({0, 2, 2}, {}, 0), Error);
}

TEST_CASE("model JSON and rationals") {
    const auto m = random_instance(77);
    CHECK(model_from_json(model_to_json(m)) == m);
    const auto d = drifting_interpretation_model();
    CHECK(model_from_json(model_to_json(d)) == d);
    CHECK(parse_rational("0.1") == Rational(1, 10));
    CHECK(parse_rational("3/6") == Rational(1, 2));
    CHECK(parse_rational("2") == Rational(2));
    CHECK_THROWS_AS(parse_rational("x"), Error);
    CHECK(format_rational(Rational(3, 9)) == "1/3");
    CHECK(measure(d, d.all_directions()) == Rational(1));
    auto bad = blank(2, 1, 1);
    bad.pass[0] = 0b100;
    CHECK_THROWS_AS(bad.validate(), Error);
    CHECK_THROWS_AS(validate_history(d, History{{0, 5}}), Error);
}
