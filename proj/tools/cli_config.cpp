#include "cli_config.hpp"

#include "refine_search/core/parallel.hpp"
#include "refine_search/core/types.hpp"

#include <fmt/format.h>

#include <cstdlib>
#include <sstream>

namespace refine_search::cli {

std::vector<std::string> split_command(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> out;
    for (std::string word; in >> word;) out.push_back(word);
    return out;
}

namespace {

nlohmann::json as_int(const std::string& text) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw Error(fmt::format("expected an integer, got '{}'", text));
    }
}

nlohmann::json as_string(const std::string& text) { return text; }

nlohmann::json as_command(const std::string& text) {
    auto parts = split_command(text);
    if (parts.empty()) throw Error("empty command");
    return parts;
}

}  // namespace

const std::vector<SettingDef>& setting_defs() {
    static const std::vector<SettingDef> defs = {
        {"/parallelism", "REFINE_SEARCH_JOBS", as_int, static_cast<long long>(default_jobs())},
        {"/seed", "REFINE_SEARCH_SEED", as_int, 0},
        {"/runs", "", as_int, 1},
        {"/output", "REFINE_SEARCH_OUTPUT", as_string, "out"},
        {"/backend/kind", "REFINE_SEARCH_BACKEND", as_string, "mock"},
        {"/backend/base_url", "REFINE_SEARCH_BASE_URL", as_string, nullptr},
        {"/backend/model", "REFINE_SEARCH_MODEL", as_string, nullptr},
        {"/sandbox/command", "REFINE_SEARCH_RUNNER", as_command, nlohmann::json::array({"exec-runner"})},
    };
    return defs;
}

EnvLookup process_env() {
    return [](const std::string& name) -> std::optional<std::string> {
        if (const char* v = std::getenv(name.c_str()); v && *v) return std::string(v);
        return std::nullopt;
    };
}

ResolvedConfig resolve_config(const nlohmann::json& spec_doc, const std::map<std::string, std::string>& flags,
                              const EnvLookup& env) {
    ResolvedConfig out;
    out.doc = spec_doc.is_object() ? spec_doc : nlohmann::json::object();
    for (const auto& def : setting_defs()) {
        const nlohmann::json::json_pointer ptr(def.path);
        ResolvedSetting s{def.path, nullptr, "unset"};
        if (const auto it = flags.find(def.path); it != flags.end()) {
            s.value = def.from_text(it->second);
            s.source = "flag";
        } else if (out.doc.contains(ptr)) {
            s.value = out.doc.at(ptr);
            s.source = "spec";
        } else if (const auto v = def.env.empty() ? std::nullopt : env(def.env)) {
            try {
                s.value = def.from_text(*v);
            } catch (const Error& e) {
                throw Error(fmt::format("{}: {}", def.env, e.what()));
            }
            s.source = "env";
        } else if (!def.fallback.is_null()) {
            s.value = def.fallback;
            s.source = "default";
        }
        if (!s.value.is_null()) out.doc[ptr] = s.value;
        out.settings.push_back(std::move(s));
    }
    return out;
}

}  // namespace refine_search::cli
