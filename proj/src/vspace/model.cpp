#include "refine_search/vspace/model.hpp"

#include <fmt/format.h>

#include <charconv>

namespace refine_search::vspace {

std::vector<int> members(Bits s) {
    std::vector<int> out;
    while (s != 0) {
        out.push_back(std::countr_zero(s));
        s &= s - 1;
    }
    return out;
}

namespace {

void check_universe(const std::vector<std::string>& names, std::string_view what) {
    if (names.empty()) throw Error(fmt::format("model has no {}", what));
    if (names.size() > kMaxUniverse) throw Error(fmt::format("model has more than {} {}", kMaxUniverse, what));
    for (std::size_t i = 0; i < names.size(); ++i) {
        for (std::size_t j = i + 1; j < names.size(); ++j) {
            if (names[i] == names[j]) throw Error(fmt::format("duplicate name '{}' in {}", names[i], what));
        }
    }
}

int index_of(const std::vector<std::string>& names, std::string_view name, std::string_view what) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return static_cast<int>(i);
    }
    throw Error(fmt::format("unknown {} '{}'", what, name));
}

void check_code(const VersionSpaceModel& m, int c) {
    if (c < 0 || static_cast<std::size_t>(c) >= m.num_codes()) throw Error(fmt::format("unknown code id {}", c));
}

void check_direction(const VersionSpaceModel& m, int d) {
    if (d < 0 || static_cast<std::size_t>(d) >= m.num_directions()) {
        throw Error(fmt::format("unknown direction id {}", d));
    }
}

void check_counterexample(const VersionSpaceModel& m, int e) {
    if (e < 0 || static_cast<std::size_t>(e) >= m.num_counterexamples()) {
        throw Error(fmt::format("unknown counterexample id {}", e));
    }
}

}  // namespace

void VersionSpaceModel::validate() const {
    check_universe(directions, "directions");
    check_universe(codes, "codes");
    check_universe(counterexamples, "counterexamples");
    const Bits all_d = all_directions();
    const Bits all_e = full_set(counterexamples.size());
    if (pass.size() != codes.size() || cons.size() != codes.size() || obs.size() != codes.size()) {
        throw Error("pass, cons and obs need one entry per code");
    }
    for (std::size_t c = 0; c < codes.size(); ++c) {
        if (!subset(pass[c], all_d)) throw Error("pass table refers to unknown directions");
        if (!subset(obs[c], all_e)) throw Error("obs refers to unknown counterexamples");
        if (cons[c].size() != counterexamples.size()) throw Error("cons needs one entry per counterexample");
        for (const Bits s : cons[c]) {
            if (!subset(s, all_d)) throw Error("cons table refers to unknown directions");
        }
    }
}

int VersionSpaceModel::direction_index(std::string_view name) const { return index_of(directions, name, "direction"); }
int VersionSpaceModel::code_index(std::string_view name) const { return index_of(codes, name, "code"); }
int VersionSpaceModel::counterexample_index(std::string_view name) const {
    return index_of(counterexamples, name, "counterexample");
}

nlohmann::json model_to_json(const VersionSpaceModel& m) {
    nlohmann::json pass = nlohmann::json::array();
    nlohmann::json cons = nlohmann::json::array();
    nlohmann::json obs = nlohmann::json::object();
    for (std::size_t c = 0; c < m.num_codes(); ++c) {
        nlohmann::json prow = nlohmann::json::array();
        nlohmann::json crow = nlohmann::json::array();
        for (std::size_t d = 0; d < m.num_directions(); ++d) {
            prow.push_back(contains(m.pass[c], static_cast<int>(d)) ? 1 : 0);
            nlohmann::json erow = nlohmann::json::array();
            for (std::size_t e = 0; e < m.num_counterexamples(); ++e) {
                erow.push_back(contains(m.cons[c][e], static_cast<int>(d)) ? 1 : 0);
            }
            crow.push_back(std::move(erow));
        }
        pass.push_back(std::move(prow));
        cons.push_back(std::move(crow));
        nlohmann::json names = nlohmann::json::array();
        for (const int e : members(m.obs[c])) names.push_back(m.counterexamples[static_cast<std::size_t>(e)]);
        obs[m.codes[c]] = std::move(names);
    }
    return {{"directions", m.directions},
            {"codes", m.codes},
            {"counterexamples", m.counterexamples},
            {"pass", pass},
            {"cons", cons},
            {"obs", obs}};
}

VersionSpaceModel model_from_json(const nlohmann::json& doc) {
    VersionSpaceModel m;
    m.directions = doc.at("directions").get<std::vector<std::string>>();
    m.codes = doc.at("codes").get<std::vector<std::string>>();
    m.counterexamples = doc.at("counterexamples").get<std::vector<std::string>>();
    check_universe(m.directions, "directions");
    check_universe(m.codes, "codes");
    check_universe(m.counterexamples, "counterexamples");
    const auto nd = m.num_directions();
    const auto nc = m.num_codes();
    const auto ne = m.num_counterexamples();
    const auto& pass = doc.at("pass");
    const auto& cons = doc.at("cons");
    if (pass.size() != nc || cons.size() != nc) throw Error("pass and cons need one row per code");
    m.pass.assign(nc, 0);
    m.cons.assign(nc, std::vector<Bits>(ne, 0));
    m.obs.assign(nc, 0);
    for (std::size_t c = 0; c < nc; ++c) {
        if (pass[c].size() != nd || cons[c].size() != nd) throw Error("pass and cons rows need one entry per direction");
        for (std::size_t d = 0; d < nd; ++d) {
            if (pass[c][d].get<int>() != 0) m.pass[c] |= Bits{1} << d;
            if (cons[c][d].size() != ne) throw Error("cons cells need one entry per counterexample");
            for (std::size_t e = 0; e < ne; ++e) {
                if (cons[c][d][e].get<int>() != 0) m.cons[c][e] |= Bits{1} << d;
            }
        }
    }
    const auto& obs = doc.at("obs");
    for (auto it = obs.begin(); it != obs.end(); ++it) {
        const auto c = static_cast<std::size_t>(m.code_index(it.key()));
        for (const auto& name : it.value()) m.obs[c] |= Bits{1} << m.counterexample_index(name.get<std::string>());
    }
    m.validate();
    return m;
}

void validate_history(const VersionSpaceModel& model, const History& history) {
    for (std::size_t i = 0; i < history.size(); ++i) {
        const auto [c, e] = history[i];
        check_code(model, c);
        check_counterexample(model, e);
        if (!contains(model.obs[static_cast<std::size_t>(c)], e)) {
            throw Error(fmt::format("history step {}: {} is not observable on {}", i + 1,
                                    model.counterexamples[static_cast<std::size_t>(e)],
                                    model.codes[static_cast<std::size_t>(c)]));
        }
    }
}

nlohmann::json history_to_json(const VersionSpaceModel& model, const History& history) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [c, e] : history) {
        out.push_back({model.codes[static_cast<std::size_t>(c)], model.counterexamples[static_cast<std::size_t>(e)]});
    }
    return out;
}

Bits succeeding_directions(const VersionSpaceModel& model, int c) {
    check_code(model, c);
    return model.pass[static_cast<std::size_t>(c)];
}

Bits consistent_directions(const VersionSpaceModel& model, int c, int e) {
    check_code(model, c);
    check_counterexample(model, e);
    return model.cons[static_cast<std::size_t>(c)][static_cast<std::size_t>(e)];
}

Bits version_space(const VersionSpaceModel& model, const History& history) {
    Bits v = model.all_directions();
    for (const auto& [c, e] : history) v &= consistent_directions(model, c, e);
    return v;
}

Bits global_star(const VersionSpaceModel& model) {
    Bits s = 0;
    for (const Bits p : model.pass) s |= p;
    return s;
}

Bits basin(const VersionSpaceModel& model, int d) {
    check_direction(model, d);
    Bits r = 0;
    for (std::size_t c = 0; c < model.num_codes(); ++c) {
        if (contains(model.pass[c], d)) r |= Bits{1} << c;
    }
    return r;
}

Bits stable_star(const VersionSpaceModel& model, Bits c_init) {
    if (c_init == 0) throw Error("C_init must be non-empty");
    if (!subset(c_init, model.all_codes())) throw Error("C_init refers to unknown codes");
    Bits s = global_star(model);
    for (const int c : members(c_init)) {
        for (const int e : members(model.obs[static_cast<std::size_t>(c)])) s &= consistent_directions(model, c, e);
    }
    return s;
}

bool check_local_soundness(const VersionSpaceModel& model, int d_dagger, Bits c_init) {
    const Bits relevant = basin(model, d_dagger) & c_init;
    for (const int c : members(relevant)) {
        for (const int e : members(model.obs[static_cast<std::size_t>(c)])) {
            if (!contains(consistent_directions(model, c, e), d_dagger)) return false;
        }
    }
    return true;
}

bool single_code_premise(const VersionSpaceModel& model, int c_f) {
    const Bits star = succeeding_directions(model, c_f);
    if (star == 0) return false;
    for (const int e : members(model.obs[static_cast<std::size_t>(c_f)])) {
        if (!subset(star, consistent_directions(model, c_f, e))) return false;
    }
    return true;
}

Bits discriminative_U(const VersionSpaceModel& model, Bits b) {
    if (b == 0) throw Error("B must be non-empty");
    if (!subset(b, model.all_codes())) throw Error("B refers to unknown codes");
    Bits u = model.all_directions();
    for (const int c : members(b)) {
        for (const int e : members(model.obs[static_cast<std::size_t>(c)])) u &= consistent_directions(model, c, e);
    }
    return u;
}

std::vector<std::pair<int, int>> surviving_pairs(const VersionSpaceModel& model, Bits c_init, Bits b) {
    if (!subset(b, c_init)) throw Error("B must be a subset of C_init");
    const Bits u = discriminative_U(model, b);
    std::vector<std::pair<int, int>> out;
    for (const int c : members(c_init)) {
        for (const int d : members(u)) out.emplace_back(c, d);
    }
    return out;
}

Bits linear_version_space(const VersionSpaceModel& model, const History& history) {
    return version_space(model, history);
}

Bits windowed_version_space(const VersionSpaceModel& model, const History& history, std::size_t w) {
    if (w < 1 || w > history.size()) throw Error(fmt::format("window {} outside 1..{}", w, history.size()));
    Bits v = model.all_directions();
    for (std::size_t i = history.size() - w; i < history.size(); ++i) {
        v &= consistent_directions(model, history[i].code, history[i].e);
    }
    return v;
}

Rational measure(const VersionSpaceModel& model, Bits s) {
    return {count(s), static_cast<std::int64_t>(model.num_directions())};
}

Rational parse_rational(std::string_view text) {
    const auto fail = [&]() -> Rational { throw Error(fmt::format("not a rational number: '{}'", text)); };
    const auto parse_int = [&](std::string_view part) {
        std::int64_t v = 0;
        const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (ec != std::errc() || ptr != part.data() + part.size() || part.empty()) fail();
        return v;
    };
    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        const auto den = parse_int(text.substr(slash + 1));
        if (den == 0) fail();
        return {parse_int(text.substr(0, slash)), den};
    }
    const auto dot = text.find('.');
    if (dot == std::string_view::npos) return {parse_int(text), 1};
    const auto frac = text.substr(dot + 1);
    if (frac.empty() || frac.size() > 15) fail();
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    auto whole = text.substr(0, dot);
    const bool negative = !whole.empty() && whole.front() == '-';
    if (negative) whole.remove_prefix(1);
    const std::int64_t w = whole.empty() ? 0 : parse_int(whole);
    if (frac.front() == '-' || frac.front() == '+') fail();
    Rational r(w * den + parse_int(frac), den);
    return negative ? -r : r;
}

std::string format_rational(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return fmt::format("{}/{}", r.numerator(), r.denominator());
}

}  // namespace refine_search::vspace
