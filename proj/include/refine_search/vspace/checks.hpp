#pragma once

#include "refine_search/vspace/model.hpp"

#include <chrono>

namespace refine_search::vspace {

/// How histories are produced for exhaustive checks: every sequence up to
/// `max_length` when |E| <= `exhaustive_max_e`, otherwise `samples`
/// sequences of length `max_length` drawn under `seed` (all prefixes checked).
struct EnumerationCaps {
    std::size_t max_length = 4;
    std::size_t exhaustive_max_e = 4;
    std::size_t samples = 10000;
    std::uint64_t seed = 0;
};

/// Calls `visit` on every non-empty prefix generated from the allowed
/// steps, parents before children. Returns the number of prefixes visited.
std::size_t for_each_history(const std::vector<Observation>& steps, std::size_t num_counterexamples,
                             const EnumerationCaps& caps, const std::function<void(const History&)>& visit);

/// Every (c, e) with c in `codes` and e observable on c.
std::vector<Observation> observable_steps(const VersionSpaceModel& model, Bits codes);

struct Violation {
    std::string clause;
    History prefix;
    std::string detail;
};

/// Result of checking the version-space guarantees over a set of histories.
struct SafetyReport {
    bool premise_met = false;
    std::string premise_note;
    /// The set the guarantee protects: the stable successful directions, or
    /// a single code's succeeding directions.
    Bits protected_set = 0;
    std::size_t histories = 0;
    std::size_t prefixes = 0;
    std::vector<Violation> violations;

    [[nodiscard]] bool ok() const { return premise_met && violations.empty(); }
};

inline constexpr const char* kClauseMonotone = "monotone";
inline constexpr const char* kClauseRetains = "retains";
inline constexpr const char* kClauseNonEmpty = "non_empty";

/// Multi-code guarantee over `c_init`: for every prefix, V_{t+1} is a subset
/// of V_t, the stable successful directions stay inside V_t, and V_t is not
/// empty. Histories must only use codes of `c_init`. Reports "premise unmet"
/// when no stable successful direction exists.
SafetyReport check_safety(const VersionSpaceModel& model, Bits c_init, const std::vector<History>& histories);
SafetyReport check_safety_exhaustive(const VersionSpaceModel& model, Bits c_init, const EnumerationCaps& caps);

/// The same three clauses for one code c_f, protecting its succeeding
/// directions, under single_code_premise.
SafetyReport check_single_code_safety(const VersionSpaceModel& model, int c_f, const std::vector<History>& histories);
SafetyReport check_single_code_safety_exhaustive(const VersionSpaceModel& model, int c_f, const EnumerationCaps& caps);

nlohmann::json to_json(const VersionSpaceModel& model, const SafetyReport& report);

/// A direction dropped by enlarging B1 to B2, with the observation that
/// drops it while keeping every stable successful direction.
struct EliminationWitness {
    int direction = 0;
    int code = 0;
    int e = 0;
};

/// Searches b2 \ b1 for an observation ruling out `d` that keeps every
/// stable successful direction of c_init.
std::optional<EliminationWitness> find_elimination_witness(const VersionSpaceModel& model, Bits c_init, Bits b1,
                                                           Bits b2, int d);

struct DiscriminativeReport {
    bool premise_met = false;
    std::size_t subset_pairs = 0;
    std::size_t strict_pairs = 0;
    std::size_t witnesses = 0;
    std::vector<std::string> violations;

    [[nodiscard]] bool ok() const { return premise_met && violations.empty(); }
};

/// For every pair of non-empty B1 subset of B2 subset of c_init: U(B2) within
/// U(B1), the stable successful directions within U(B2), U(B2) non-empty and
/// the surviving pairs shrinking accordingly; every strictly dropped
/// direction must have an elimination witness.
DiscriminativeReport check_discriminative(const VersionSpaceModel& model, Bits c_init);

/// Drift quantities of one linear history under the cardinality measure.
/// `w_max` is empty when drift is zero; any window is then safe iff alpha >= epsilon.
struct DriftMeasures {
    Rational alpha;
    Rational delta_drift;
    Rational epsilon;
    std::optional<Rational> w_max;
};

/// Throws on an empty history.
DriftMeasures drift_measures(const VersionSpaceModel& model, const History& history, const Rational& epsilon);

/// w_max = 1 + (alpha - epsilon) / delta, or empty when delta = 0.
std::optional<Rational> window_limit(const Rational& alpha, const Rational& delta, const Rational& epsilon);

/// Whether the drift bound promises mu >= epsilon for windows of size w:
/// w <= w_max when delta > 0, and alpha >= epsilon for every w when delta = 0.
bool window_guaranteed(const Rational& alpha, const Rational& delta, const Rational& epsilon, std::size_t w);

struct DriftWitness {
    History history;
    std::size_t t = 0;
    std::size_t w = 0;
    Rational mu;
};

struct DriftReport {
    std::size_t histories = 0;
    std::size_t windows = 0;
    Rational worst_alpha{1};
    Rational worst_delta{0};
    /// mu(window) < alpha - (w - 1) * delta.
    std::vector<DriftWitness> violations;
    /// The bound promised mu >= epsilon for the window, yet mu < epsilon.
    std::vector<DriftWitness> falsifications;
    /// First window outside the promise whose measure fell below epsilon.
    std::optional<DriftWitness> tightness;

    [[nodiscard]] bool ok() const { return violations.empty() && falsifications.empty(); }
};

/// Checks mu(window of size w ending at t) >= alpha - (w - 1) * delta for
/// every t and w <= t, with alpha and delta taken from each history.
DriftReport drift_bound_check(const VersionSpaceModel& model, const std::vector<History>& histories,
                              const Rational& epsilon);
DriftReport drift_bound_check_exhaustive(const VersionSpaceModel& model, const Rational& epsilon,
                                         const EnumerationCaps& caps);

nlohmann::json to_json(const VersionSpaceModel& model, const DriftReport& report);

/// Initial-code generator for survival experiments: code c is drawn with
/// probability weights[c] / sum(weights).
struct GeneratorSpec {
    VersionSpaceModel model;
    std::vector<double> weights;
};

struct SurvivalReport {
    int trials = 0;
    int survived = 0;
    double empirical = 0.0;
    double bound_union = 0.0;
    double bound_indep = 0.0;
    /// Exact probability that a single draw lands where d_dagger succeeds.
    double marginal = 0.0;
};

/// Monte Carlo estimate of the probability that d_dagger survives every
/// observation of m independently drawn initial codes. `delta_gen` is the
/// claimed per-draw failure probability; the generator's actual marginal is
/// checked against it and local soundness is required.
SurvivalReport survival_probability(const GeneratorSpec& generator, int d_dagger, int m, double delta_gen, int trials,
                                    std::uint64_t seed);

struct ModelSizes {
    std::size_t directions = 3;
    std::size_t codes = 3;
    std::size_t counterexamples = 3;
};

struct ModelDensities {
    double pass = 0.4;
    double cons = 0.75;
    double obs = 0.5;
};

using ModelFilter = std::function<bool(const VersionSpaceModel&)>;

/// Seeded model with independent Bernoulli entries. Redraws up to
/// `max_attempts` times until `filter` accepts; throws if it never does.
VersionSpaceModel random_model(const ModelSizes& sizes, const ModelDensities& densities, std::uint64_t seed,
                               const ModelFilter& filter = {}, int max_attempts = 10000);

/// Named filters over C_init = all codes.
bool satisfies_local_soundness(const VersionSpaceModel& model);
bool has_stable_star(const VersionSpaceModel& model);

/// Two directions, one counterexample, two codes that read it in opposite
/// ways: each single-step constraint is satisfiable but their intersection
/// is empty.
VersionSpaceModel drifting_interpretation_model();
History drifting_interpretation_history();

struct CampaignOptions {
    std::size_t models = 200;
    std::size_t max_size = 5;
    std::uint64_t seed = 0;
    EnumerationCaps caps;
    Rational epsilon{1, 10};
    ModelDensities densities;
    std::size_t threads = 0;  // 0: hardware concurrency
};

struct CampaignSection {
    std::string name;
    std::size_t models = 0;
    std::size_t histories = 0;
    std::size_t checks = 0;
    std::size_t violations = 0;
    nlohmann::json extra = nlohmann::json::object();
    std::vector<nlohmann::json> failures;  // first few, with their models
};

struct CampaignReport {
    std::vector<CampaignSection> sections;
    std::chrono::milliseconds elapsed{0};

    [[nodiscard]] std::size_t total_violations() const;
    [[nodiscard]] const CampaignSection& section(std::string_view name) const;
};

/// Four sections, each over `models` seeded random models filtered by its
/// premise: multi_code_safety, single_code_safety, discriminative_power and
/// window_drift.
CampaignReport run_campaign(const CampaignOptions& options);

nlohmann::json to_json(const CampaignReport& report);

}  // namespace refine_search::vspace
