#include "refine_search/vspace/checks.hpp"

#include "refine_search/core/parallel.hpp"
#include "refine_search/core/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <thread>

namespace refine_search::vspace {

std::vector<Observation> observable_steps(const VersionSpaceModel& model, Bits codes) {
    std::vector<Observation> steps;
    for (const int c : members(codes & model.all_codes())) {
        for (const int e : members(model.obs[static_cast<std::size_t>(c)])) steps.push_back({c, e});
    }
    return steps;
}

std::size_t for_each_history(const std::vector<Observation>& steps, std::size_t num_counterexamples,
                             const EnumerationCaps& caps, const std::function<void(const History&)>& visit) {
    if (steps.empty() || caps.max_length == 0) return 0;
    std::size_t visited = 0;
    History h;
    h.reserve(caps.max_length);
    if (num_counterexamples <= caps.exhaustive_max_e) {
        const std::function<void()> dfs = [&] {
            for (const auto& s : steps) {
                h.push_back(s);
                visit(h);
                ++visited;
                if (h.size() < caps.max_length) dfs();
                h.pop_back();
            }
        };
        dfs();
        return visited;
    }
    Rng rng(caps.seed);
    for (std::size_t n = 0; n < caps.samples; ++n) {
        h.clear();
        for (std::size_t i = 0; i < caps.max_length; ++i) {
            h.push_back(steps[rng.index(steps.size())]);
            visit(h);
            ++visited;
        }
    }
    return visited;
}

namespace {

std::string set_text(const std::vector<std::string>& names, Bits s) {
    std::string out = "{";
    for (const int i : members(s)) {
        if (out.size() > 1) out += ",";
        out += names[static_cast<std::size_t>(i)];
    }
    return out + "}";
}

/// Checks the three clauses on the newest step of `prefix`.
void check_prefix(const VersionSpaceModel& model, Bits protected_set, const History& prefix, SafetyReport& report) {
    const History parent(prefix.begin(), prefix.end() - 1);
    const Bits before = version_space(model, parent);
    const Bits now = version_space(model, prefix);
    ++report.prefixes;
    const auto fail = [&](const char* clause, std::string detail) {
        report.violations.push_back({clause, prefix, std::move(detail)});
    };
    if (!subset(now, before)) {
        fail(kClauseMonotone, fmt::format("V_{} = {} is not inside V_{} = {}", prefix.size(),
                                          set_text(model.directions, now), parent.size(),
                                          set_text(model.directions, before)));
    }
    if (!subset(protected_set, now)) {
        fail(kClauseRetains, fmt::format("V_{} = {} lost {}", prefix.size(), set_text(model.directions, now),
                                         set_text(model.directions, protected_set & ~now)));
    }
    if (now == 0) fail(kClauseNonEmpty, fmt::format("V_{} is empty", prefix.size()));
}

void check_histories(const VersionSpaceModel& model, Bits allowed_codes, const std::vector<History>& histories,
                     SafetyReport& report) {
    for (const auto& h : histories) {
        validate_history(model, h);
        for (const auto& step : h) {
            if (!contains(allowed_codes, step.code)) {
                throw Error(fmt::format("history uses code {} outside the checked set",
                                        model.codes[static_cast<std::size_t>(step.code)]));
            }
        }
        ++report.histories;
        History prefix;
        for (const auto& step : h) {
            prefix.push_back(step);
            check_prefix(model, report.protected_set, prefix, report);
        }
    }
}

void check_enumerated(const VersionSpaceModel& model, Bits codes, const EnumerationCaps& caps, SafetyReport& report) {
    report.histories = for_each_history(observable_steps(model, codes), model.num_counterexamples(), caps,
                                        [&](const History& h) { check_prefix(model, report.protected_set, h, report); });
}

SafetyReport multi_code_report(const VersionSpaceModel& model, Bits c_init) {
    model.validate();
    SafetyReport report;
    report.protected_set = stable_star(model, c_init);
    report.premise_met = report.protected_set != 0;
    if (!report.premise_met) report.premise_note = "premise unmet";
    return report;
}

SafetyReport single_code_report(const VersionSpaceModel& model, int c_f) {
    model.validate();
    SafetyReport report;
    report.protected_set = succeeding_directions(model, c_f);
    report.premise_met = single_code_premise(model, c_f);
    if (!report.premise_met) report.premise_note = "premise unmet";
    return report;
}

}  // namespace

SafetyReport check_safety(const VersionSpaceModel& model, Bits c_init, const std::vector<History>& histories) {
    auto report = multi_code_report(model, c_init);
    if (report.premise_met) check_histories(model, c_init, histories, report);
    return report;
}

SafetyReport check_safety_exhaustive(const VersionSpaceModel& model, Bits c_init, const EnumerationCaps& caps) {
    auto report = multi_code_report(model, c_init);
    if (report.premise_met) check_enumerated(model, c_init, caps, report);
    return report;
}

SafetyReport check_single_code_safety(const VersionSpaceModel& model, int c_f, const std::vector<History>& histories) {
    auto report = single_code_report(model, c_f);
    if (report.premise_met) check_histories(model, Bits{1} << c_f, histories, report);
    return report;
}

SafetyReport check_single_code_safety_exhaustive(const VersionSpaceModel& model, int c_f,
                                                 const EnumerationCaps& caps) {
    auto report = single_code_report(model, c_f);
    if (report.premise_met) check_enumerated(model, Bits{1} << c_f, caps, report);
    return report;
}

nlohmann::json to_json(const VersionSpaceModel& model, const SafetyReport& report) {
    nlohmann::json violations = nlohmann::json::array();
    for (const auto& v : report.violations) {
        violations.push_back({{"clause", v.clause}, {"prefix", history_to_json(model, v.prefix)}, {"detail", v.detail}});
    }
    nlohmann::json out{{"premise_met", report.premise_met},
                       {"protected", set_text(model.directions, report.protected_set)},
                       {"histories", report.histories},
                       {"prefixes", report.prefixes},
                       {"violations", violations},
                       {"ok", report.ok()}};
    if (!report.premise_note.empty()) out["premise_note"] = report.premise_note;
    return out;
}

std::optional<EliminationWitness> find_elimination_witness(const VersionSpaceModel& model, Bits c_init, Bits b1,
                                                           Bits b2, int d) {
    const Bits stable = stable_star(model, c_init);
    for (const int b : members(b2 & ~b1)) {
        for (const int e : members(model.obs[static_cast<std::size_t>(b)])) {
            const Bits allowed = consistent_directions(model, b, e);
            if (!contains(allowed, d) && subset(stable, allowed)) return EliminationWitness{d, b, e};
        }
    }
    return std::nullopt;
}

DiscriminativeReport check_discriminative(const VersionSpaceModel& model, Bits c_init) {
    model.validate();
    DiscriminativeReport report;
    const Bits stable = stable_star(model, c_init);
    report.premise_met = stable != 0;
    if (!report.premise_met) return report;

    const auto pair_set = [&](Bits b) {
        std::set<std::pair<int, int>> s;
        for (const auto& p : surviving_pairs(model, c_init, b)) s.insert(p);
        return s;
    };
    for (Bits b2 = c_init; b2 != 0; b2 = (b2 - 1) & c_init) {
        const Bits u2 = discriminative_U(model, b2);
        const auto z2 = pair_set(b2);
        for (Bits b1 = b2; b1 != 0; b1 = (b1 - 1) & b2) {
            ++report.subset_pairs;
            const Bits u1 = discriminative_U(model, b1);
            const auto z1 = pair_set(b1);
            const auto where = fmt::format("B1={} B2={}", set_text(model.codes, b1), set_text(model.codes, b2));
            if (!subset(u2, u1)) report.violations.push_back("U(B2) not inside U(B1) at " + where);
            if (!subset(stable, u2)) report.violations.push_back("stable directions lost from U(B2) at " + where);
            if (u2 == 0) report.violations.push_back("U(B2) empty at " + where);
            if (z2.empty() || !std::includes(z1.begin(), z1.end(), z2.begin(), z2.end())) {
                report.violations.push_back("surviving pairs did not shrink at " + where);
            }
            if (u1 != u2) {
                ++report.strict_pairs;
                for (const int d : members(u1 & ~u2)) {
                    if (find_elimination_witness(model, c_init, b1, b2, d)) {
                        ++report.witnesses;
                    } else {
                        report.violations.push_back(fmt::format("no witness eliminates {} at {}",
                                                                model.directions[static_cast<std::size_t>(d)], where));
                    }
                }
            }
        }
    }
    return report;
}

std::optional<Rational> window_limit(const Rational& alpha, const Rational& delta, const Rational& epsilon) {
    // rational == int recurses under C++20 rewritten comparisons in Boost 1.74
    if (delta.numerator() == 0) return std::nullopt;
    return Rational(1) + (alpha - epsilon) / delta;
}

bool window_guaranteed(const Rational& alpha, const Rational& delta, const Rational& epsilon, std::size_t w) {
    if (delta.numerator() == 0) return !(alpha < epsilon);
    return !(*window_limit(alpha, delta, epsilon) < Rational(static_cast<std::int64_t>(w)));
}

namespace {

struct DriftCounts {
    int alpha = 0;  // min |A_t|
    int delta = 0;  // max |A_{t-1} \ A_t|
};

DriftCounts drift_counts(const VersionSpaceModel& model, const History& h) {
    DriftCounts out{static_cast<int>(model.num_directions()), 0};
    Bits prev = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const Bits a = consistent_directions(model, h[i].code, h[i].e);
        out.alpha = std::min(out.alpha, count(a));
        if (i > 0) out.delta = std::max(out.delta, count(prev & ~a));
        prev = a;
    }
    return out;
}

/// Windows ending at the last step of `h`.
void check_windows(const VersionSpaceModel& model, const History& h, const Rational& epsilon, DriftReport& report) {
    const auto n = static_cast<std::int64_t>(model.num_directions());
    const auto dc = drift_counts(model, h);
    const Rational alpha(dc.alpha, n);
    const Rational delta(dc.delta, n);
    report.worst_alpha = std::min(report.worst_alpha, alpha);
    report.worst_delta = std::max(report.worst_delta, delta);
    const std::size_t t = h.size();
    Bits window = model.all_directions();
    for (std::size_t w = 1; w <= t; ++w) {
        window &= consistent_directions(model, h[t - w].code, h[t - w].e);
        ++report.windows;
        const int size = count(window);
        const Rational mu(size, n);
        if (size < dc.alpha - static_cast<int>(w - 1) * dc.delta) report.violations.push_back({h, t, w, mu});
        if (mu < epsilon) {
            if (window_guaranteed(alpha, delta, epsilon, w)) {
                report.falsifications.push_back({h, t, w, mu});
            } else if (!report.tightness) {
                report.tightness = DriftWitness{h, t, w, mu};
            }
        }
    }
}

}  // namespace

DriftMeasures drift_measures(const VersionSpaceModel& model, const History& history, const Rational& epsilon) {
    if (history.empty()) throw Error("drift measures need a non-empty history");
    validate_history(model, history);
    const auto n = static_cast<std::int64_t>(model.num_directions());
    const auto dc = drift_counts(model, history);
    DriftMeasures m{Rational(dc.alpha, n), Rational(dc.delta, n), epsilon, std::nullopt};
    m.w_max = window_limit(m.alpha, m.delta_drift, epsilon);
    return m;
}

DriftReport drift_bound_check(const VersionSpaceModel& model, const std::vector<History>& histories,
                              const Rational& epsilon) {
    if (histories.empty()) throw Error("drift check needs at least one history");
    model.validate();
    DriftReport report;
    for (const auto& h : histories) {
        if (h.empty()) throw Error("drift check needs non-empty histories");
        validate_history(model, h);
        ++report.histories;
        // every window of every prefix, each prefix with its own alpha and delta
        for (std::size_t t = 1; t <= h.size(); ++t) {
            check_windows(model, History(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(t)), epsilon, report);
        }
    }
    return report;
}

DriftReport drift_bound_check_exhaustive(const VersionSpaceModel& model, const Rational& epsilon,
                                         const EnumerationCaps& caps) {
    model.validate();
    DriftReport report;
    // Each visited prefix is its own history; windows ending earlier were
    // checked at the parent prefix under a tighter alpha and delta.
    report.histories = for_each_history(observable_steps(model, model.all_codes()), model.num_counterexamples(), caps,
                                        [&](const History& h) { check_windows(model, h, epsilon, report); });
    return report;
}

nlohmann::json to_json(const VersionSpaceModel& model, const DriftReport& report) {
    const auto witness = [&](const DriftWitness& w) {
        return nlohmann::json{{"history", history_to_json(model, w.history)},
                              {"t", w.t},
                              {"w", w.w},
                              {"mu", format_rational(w.mu)}};
    };
    nlohmann::json out{{"histories", report.histories},
                       {"windows", report.windows},
                       {"alpha_min", format_rational(report.worst_alpha)},
                       {"delta_max", format_rational(report.worst_delta)},
                       {"violations", nlohmann::json::array()},
                       {"falsifications", nlohmann::json::array()},
                       {"ok", report.ok()}};
    for (const auto& v : report.violations) out["violations"].push_back(witness(v));
    for (const auto& v : report.falsifications) out["falsifications"].push_back(witness(v));
    out["tightness"] = report.tightness ? witness(*report.tightness) : nlohmann::json(nullptr);
    return out;
}

SurvivalReport survival_probability(const GeneratorSpec& generator, int d_dagger, int m, double delta_gen, int trials,
                                    std::uint64_t seed) {
    const auto& model = generator.model;
    model.validate();
    if (m < 1) throw Error("m must be >= 1");
    if (trials < 1) throw Error("trials must be >= 1");
    if (delta_gen < 0.0 || delta_gen > 1.0) throw Error("delta must lie in [0,1]");
    if (generator.weights.size() != model.num_codes()) throw Error("generator needs one weight per code");
    double total = 0.0;
    Bits support = 0;
    for (std::size_t c = 0; c < generator.weights.size(); ++c) {
        const double w = generator.weights[c];
        if (!(w >= 0.0) || !std::isfinite(w)) throw Error("generator weights must be finite and >= 0");
        if (w > 0.0) support |= Bits{1} << c;
        total += w;
    }
    if (total <= 0.0) throw Error("generator weights sum to zero");

    const Bits good = basin(model, d_dagger);
    double in_basin = 0.0;
    for (const int c : members(good)) in_basin += generator.weights[static_cast<std::size_t>(c)];
    SurvivalReport report;
    report.marginal = in_basin / total;
    constexpr double kSlack = 1e-12;
    if (report.marginal < 1.0 - delta_gen - kSlack) {
        throw Error(fmt::format("generator violates its marginal guarantee: Pr[code in R(d)] = {} < 1 - {}",
                                report.marginal, delta_gen));
    }
    if (!check_local_soundness(model, d_dagger, support)) throw Error("local soundness fails for the generator");

    std::vector<bool> survives(model.num_codes());
    for (std::size_t c = 0; c < model.num_codes(); ++c) {
        survives[c] = contains(discriminative_U(model, Bits{1} << c), d_dagger);
    }
    std::vector<double> cumulative;
    double acc = 0.0;
    for (const double w : generator.weights) cumulative.push_back(acc += w);

    Rng rng(seed);
    report.trials = trials;
    for (int t = 0; t < trials; ++t) {
        bool ok = true;
        for (int j = 0; j < m; ++j) {
            const double u = rng.uniform01() * total;
            auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
            if (it == cumulative.end()) --it;
            ok = ok && survives[static_cast<std::size_t>(it - cumulative.begin())];
        }
        if (ok) ++report.survived;
    }
    report.empirical = static_cast<double>(report.survived) / trials;
    report.bound_union = 1.0 - m * delta_gen;
    report.bound_indep = std::pow(1.0 - delta_gen, m);
    return report;
}

VersionSpaceModel random_model(const ModelSizes& sizes, const ModelDensities& densities, std::uint64_t seed,
                               const ModelFilter& filter, int max_attempts) {
    if (sizes.directions < 1 || sizes.codes < 1 || sizes.counterexamples < 1) throw Error("model sizes must be >= 1");
    if (sizes.directions > kMaxUniverse || sizes.codes > kMaxUniverse || sizes.counterexamples > kMaxUniverse) {
        throw Error(fmt::format("model sizes must be <= {}", kMaxUniverse));
    }
    for (const double p : {densities.pass, densities.cons, densities.obs}) {
        if (!(p >= 0.0 && p <= 1.0)) throw Error("densities must lie in [0,1]");
    }
    if (max_attempts < 1) throw Error("max_attempts must be >= 1");
    Rng rng(seed);
    const auto draw = [&](double p, std::size_t n) {
        Bits s = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (rng.bernoulli(p)) s |= Bits{1} << i;
        }
        return s;
    };
    VersionSpaceModel m;
    for (std::size_t i = 0; i < sizes.directions; ++i) m.directions.push_back(fmt::format("d{}", i));
    for (std::size_t i = 0; i < sizes.codes; ++i) m.codes.push_back(fmt::format("c{}", i));
    for (std::size_t i = 0; i < sizes.counterexamples; ++i) m.counterexamples.push_back(fmt::format("e{}", i));
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        m.pass.assign(sizes.codes, 0);
        m.cons.assign(sizes.codes, std::vector<Bits>(sizes.counterexamples, 0));
        m.obs.assign(sizes.codes, 0);
        for (std::size_t c = 0; c < sizes.codes; ++c) {
            m.pass[c] = draw(densities.pass, sizes.directions);
            for (auto& cell : m.cons[c]) cell = draw(densities.cons, sizes.directions);
            m.obs[c] = draw(densities.obs, sizes.counterexamples);
        }
        if (!filter || filter(m)) return m;
    }
    throw Error(fmt::format("model filter unsatisfied after {} attempts", max_attempts));
}

bool satisfies_local_soundness(const VersionSpaceModel& model) {
    for (const int d : members(global_star(model))) {
        if (check_local_soundness(model, d, model.all_codes())) return true;
    }
    return false;
}

bool has_stable_star(const VersionSpaceModel& model) { return stable_star(model, model.all_codes()) != 0; }

VersionSpaceModel drifting_interpretation_model() {
    VersionSpaceModel m;
    m.directions = {"d_a", "d_b"};
    m.codes = {"c0", "c1"};
    m.counterexamples = {"e"};
    m.pass = {0b01, 0b10};
    m.cons = {{0b01}, {0b10}};
    m.obs = {0b1, 0b1};
    m.validate();
    return m;
}

History drifting_interpretation_history() { return {{0, 0}, {1, 0}}; }

std::size_t CampaignReport::total_violations() const {
    std::size_t n = 0;
    for (const auto& s : sections) n += s.violations;
    return n;
}

const CampaignSection& CampaignReport::section(std::string_view name) const {
    for (const auto& s : sections) {
        if (s.name == name) return s;
    }
    throw Error(fmt::format("no campaign section '{}'", name));
}

namespace {

struct JobResult {
    std::size_t histories = 0;
    std::size_t checks = 0;
    std::size_t violations = 0;
    std::map<std::string, std::int64_t> counters;
    std::optional<nlohmann::json> failure;
};

using Job = std::function<JobResult(std::size_t index)>;

CampaignSection run_section(std::string name, std::size_t models, std::size_t threads, const Job& job) {
    std::vector<JobResult> results(models);
    parallel_for(models, threads, [&](std::size_t i) { results[i] = job(i); });

    CampaignSection s;
    s.name = std::move(name);
    s.models = models;
    std::map<std::string, std::int64_t> counters;
    for (auto& r : results) {
        s.histories += r.histories;
        s.checks += r.checks;
        s.violations += r.violations;
        for (const auto& [k, v] : r.counters) counters[k] += v;
        if (r.failure && s.failures.size() < 5) s.failures.push_back(std::move(*r.failure));
    }
    for (const auto& [k, v] : counters) s.extra[k] = v;
    return s;
}

/// Draws sizes in 1..max_size and a model accepted by `filter`, retrying
/// with fresh sizes when a size combination cannot satisfy it.
template <typename Filter>
std::pair<VersionSpaceModel, Bits> premise_model(const CampaignOptions& o, std::string_view section,
                                                 std::size_t index, bool random_subset, const Filter& filter) {
    for (int retry = 0; retry < 1000; ++retry) {
        Rng rng(derive_seed(o.seed, fmt::format("{}/{}/{}", section, index, retry)));
        const auto pick = [&] { return 1 + static_cast<std::size_t>(rng.index(o.max_size)); };
        ModelSizes sizes{pick(), pick(), pick()};
        Bits c_init = full_set(sizes.codes);
        if (random_subset) {
            c_init = 0;
            while (c_init == 0) c_init = rng.next() & full_set(sizes.codes);
        }
        try {
            auto model = random_model(sizes, o.densities, rng.next(),
                                      [&](const VersionSpaceModel& m) { return filter(m, c_init); }, 200);
            return {std::move(model), c_init};
        } catch (const Error&) {
            continue;
        }
    }
    throw Error(fmt::format("{}: no model satisfied the premise", section));
}

}  // namespace

CampaignReport run_campaign(const CampaignOptions& o) {
    if (o.models < 1) throw Error("campaign needs at least one model");
    if (o.max_size < 1 || o.max_size > kMaxUniverse) throw Error("max_size out of range");
    const auto start = std::chrono::steady_clock::now();
    const std::size_t threads = o.threads ? o.threads : std::max(1U, std::thread::hardware_concurrency());
    CampaignReport report;

    const auto caps_for = [&](std::string_view section, std::size_t i) {
        auto caps = o.caps;
        caps.seed = derive_seed(o.seed, fmt::format("{}/{}/histories", section, i));
        return caps;
    };

    report.sections.push_back(run_section("multi_code_safety", o.models, threads, [&](std::size_t i) {
        auto [model, c_init] = premise_model(o, "multi_code_safety", i, true, [](const VersionSpaceModel& m, Bits ci) {
            return stable_star(m, ci) != 0;
        });
        const auto r = check_safety_exhaustive(model, c_init, caps_for("multi_code_safety", i));
        JobResult out{r.histories, r.prefixes * 3, r.violations.size() + (r.premise_met ? 0 : 1), {}, {}};
        if (!r.ok()) out.failure = nlohmann::json{{"model", model_to_json(model)}, {"report", to_json(model, r)}};
        return out;
    }));

    report.sections.push_back(run_section("single_code_safety", o.models, threads, [&](std::size_t i) {
        auto [model, unused] = premise_model(o, "single_code_safety", i, false, [](const VersionSpaceModel& m, Bits) {
            return single_code_premise(m, 0);
        });
        (void)unused;
        const auto r = check_single_code_safety_exhaustive(model, 0, caps_for("single_code_safety", i));
        JobResult out{r.histories, r.prefixes * 3, r.violations.size() + (r.premise_met ? 0 : 1), {}, {}};
        if (!r.ok()) out.failure = nlohmann::json{{"model", model_to_json(model)}, {"report", to_json(model, r)}};
        return out;
    }));

    report.sections.push_back(run_section("discriminative_power", o.models, threads, [&](std::size_t i) {
        auto [model, c_init] = premise_model(o, "discriminative_power", i, true,
                                             [](const VersionSpaceModel& m, Bits ci) { return stable_star(m, ci) != 0; });
        const auto r = check_discriminative(model, c_init);
        JobResult out{0, r.subset_pairs * 4, r.violations.size() + (r.premise_met ? 0 : 1), {}, {}};
        out.counters["strict_pairs"] = static_cast<std::int64_t>(r.strict_pairs);
        out.counters["witnesses"] = static_cast<std::int64_t>(r.witnesses);
        if (!r.ok()) {
            out.failure = nlohmann::json{{"model", model_to_json(model)}, {"violations", r.violations}};
        }
        return out;
    }));

    report.sections.push_back(run_section("window_drift", o.models, threads, [&](std::size_t i) {
        auto [model, unused] = premise_model(o, "window_drift", i, false, [](const VersionSpaceModel& m, Bits) {
            return !observable_steps(m, m.all_codes()).empty();
        });
        (void)unused;
        const auto r = drift_bound_check_exhaustive(model, o.epsilon, caps_for("window_drift", i));
        JobResult out{r.histories, r.windows, r.violations.size() + r.falsifications.size(), {}, {}};
        out.counters["tightness_witnesses"] = r.tightness ? 1 : 0;
        out.counters["zero_drift_models"] = r.worst_delta.numerator() == 0 ? 1 : 0;
        if (!r.ok()) out.failure = nlohmann::json{{"model", model_to_json(model)}, {"report", to_json(model, r)}};
        return out;
    }));

    report.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    return report;
}

nlohmann::json to_json(const CampaignReport& report) {
    nlohmann::json sections = nlohmann::json::array();
    for (const auto& s : report.sections) {
        nlohmann::json j{{"name", s.name},
                         {"models", s.models},
                         {"histories", s.histories},
                         {"checks", s.checks},
                         {"violations", s.violations}};
        for (auto it = s.extra.begin(); it != s.extra.end(); ++it) j[it.key()] = it.value();
        j["failures"] = s.failures;
        sections.push_back(std::move(j));
    }
    return {{"sections", sections},
            {"total_violations", report.total_violations()},
            {"elapsed_ms", report.elapsed.count()}};
}

}  // namespace refine_search::vspace
