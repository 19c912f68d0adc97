#pragma once

#include "refine_search/core/types.hpp"

#include <boost/rational.hpp>
#include <nlohmann/json.hpp>

#include <bit>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace refine_search::vspace {

/// Subset of a universe of at most 64 ids; bit i is id i.
using Bits = std::uint64_t;
using Rational = boost::rational<std::int64_t>;

inline constexpr std::size_t kMaxUniverse = 64;

inline int count(Bits s) { return std::popcount(s); }
inline bool subset(Bits a, Bits b) { return (a & ~b) == 0; }
inline bool contains(Bits s, int i) { return ((s >> i) & 1U) != 0; }
inline Bits full_set(std::size_t n) { return n >= 64 ? ~Bits{0} : (Bits{1} << n) - 1; }
std::vector<int> members(Bits s);

/// Finite model of directions D, codes C and counterexamples E with
/// pass(c, d), cons(c, d, e) and obs(c). Ids are indices into the name
/// vectors.
struct VersionSpaceModel {
    std::vector<std::string> directions;
    std::vector<std::string> codes;
    std::vector<std::string> counterexamples;
    /// pass[c]: directions that succeed for code c.
    std::vector<Bits> pass;
    /// cons[c][e]: directions consistent with observing e on code c.
    std::vector<std::vector<Bits>> cons;
    /// obs[c]: counterexamples that can be observed on code c.
    std::vector<Bits> obs;

    [[nodiscard]] std::size_t num_directions() const { return directions.size(); }
    [[nodiscard]] std::size_t num_codes() const { return codes.size(); }
    [[nodiscard]] std::size_t num_counterexamples() const { return counterexamples.size(); }
    [[nodiscard]] Bits all_directions() const { return full_set(directions.size()); }
    [[nodiscard]] Bits all_codes() const { return full_set(codes.size()); }

    /// Throws on empty or oversized sets, ragged tables, or bits outside a universe.
    void validate() const;

    [[nodiscard]] int direction_index(std::string_view name) const;
    [[nodiscard]] int code_index(std::string_view name) const;
    [[nodiscard]] int counterexample_index(std::string_view name) const;

    friend bool operator==(const VersionSpaceModel&, const VersionSpaceModel&) = default;
};

/// JSON form: `directions`, `codes`, `counterexamples` name lists; `pass` as
/// a C x D 0/1 matrix; `cons` as C x D x E; `obs` as a map code -> names.
nlohmann::json model_to_json(const VersionSpaceModel& model);
VersionSpaceModel model_from_json(const nlohmann::json& doc);

/// One observation: counterexample `e` realized on code `code`. For linear
/// histories the code is the one being refined when `e` was observed.
struct Observation {
    int code = 0;
    int e = 0;

    friend bool operator==(const Observation&, const Observation&) = default;
};
using History = std::vector<Observation>;

/// Throws unless every step uses known ids and e is observable on its code.
void validate_history(const VersionSpaceModel& model, const History& history);

nlohmann::json history_to_json(const VersionSpaceModel& model, const History& history);

Bits succeeding_directions(const VersionSpaceModel& model, int c);
Bits consistent_directions(const VersionSpaceModel& model, int c, int e);

/// Intersection of consistent directions over the history; D when empty.
Bits version_space(const VersionSpaceModel& model, const History& history);

/// Directions that succeed for at least one code.
Bits global_star(const VersionSpaceModel& model);
/// Codes on which direction d succeeds.
Bits basin(const VersionSpaceModel& model, int d);

/// Directions in global_star that survive every observation of every code
/// in `c_init`. Throws on an empty `c_init`.
Bits stable_star(const VersionSpaceModel& model, Bits c_init);

/// True iff no observation on a code of c_init where d_dagger succeeds
/// rules d_dagger out.
bool check_local_soundness(const VersionSpaceModel& model, int d_dagger, Bits c_init);

/// Single-code premise: the code has succeeding directions, and none of
/// them is ruled out by any of its own observations.
bool single_code_premise(const VersionSpaceModel& model, int c_f);

/// Intersection of consistent directions over all observations of all
/// codes in b. Throws on an empty b.
Bits discriminative_U(const VersionSpaceModel& model, Bits b);

/// c_init x U(b), as (code, direction) pairs in lexicographic order.
std::vector<std::pair<int, int>> surviving_pairs(const VersionSpaceModel& model, Bits c_init, Bits b);

/// Directions consistent with all observations in the history, where step
/// i records (c_{i-1}, e_i): the code refined at that step and what was seen.
Bits linear_version_space(const VersionSpaceModel& model, const History& history);

/// Same, restricted to the last w steps. Throws unless 1 <= w <= |history|.
Bits windowed_version_space(const VersionSpaceModel& model, const History& history, std::size_t w);

/// |s| / |D| as an exact fraction.
Rational measure(const VersionSpaceModel& model, Bits s);

/// Rational from a decimal or "p/q" string, e.g. "0.1" or "1/10".
Rational parse_rational(std::string_view text);
std::string format_rational(const Rational& r);

}  // namespace refine_search::vspace
