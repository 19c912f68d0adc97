#pragma once

#include <nlohmann/json.hpp>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace refine_search::cli {

/// A setting that may come from a flag, the spec file, the environment or a
/// built-in default, in that order of precedence.
struct SettingDef {
    std::string path;  // JSON pointer into the experiment spec, e.g. "/backend/model"
    std::string env;   // empty: not settable from the environment
    std::function<nlohmann::json(const std::string&)> from_text;
    nlohmann::json fallback;  // null: no default
};

struct ResolvedSetting {
    std::string path;
    nlohmann::json value;
    std::string source;  // flag | spec | env | default | unset
};

const std::vector<SettingDef>& setting_defs();

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_env();

/// Layers defaults, environment and flags around `spec_doc` and returns the
/// merged document plus where each known setting came from. `flags` maps
/// setting paths to raw flag text.
struct ResolvedConfig {
    nlohmann::json doc;
    std::vector<ResolvedSetting> settings;
};

ResolvedConfig resolve_config(const nlohmann::json& spec_doc, const std::map<std::string, std::string>& flags,
                              const EnvLookup& env);

/// Splits a command line on whitespace (no quoting).
std::vector<std::string> split_command(const std::string& text);

}  // namespace refine_search::cli
