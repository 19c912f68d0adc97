#pragma once

#include "refine_search/gateway/backend.hpp"

#include <filesystem>
#include <map>
#include <string>

namespace refine_search::gateway {

using TemplateVars = std::map<std::string, std::string, std::less<>>;

/// Single-pass `{name}` substitution. Unknown placeholders and stray braces
/// are left untouched, and substituted values are never rescanned.
std::string substitute(std::string_view text, const TemplateVars& vars);

struct PromptTemplate {
    std::string system;
    std::string user;
};

/// One template per role. Files in a template directory are named
/// `<role>.txt`; a line consisting of `---` separates the system part from
/// the user part (no separator: everything is the user part and the built-in
/// system text is kept).
class PromptTemplates {
public:
    PromptTemplates();

    static PromptTemplates builtin() { return PromptTemplates{}; }
    static PromptTemplates load_directory(const std::filesystem::path& dir);

    void set(Role role, PromptTemplate tmpl);
    [[nodiscard]] const PromptTemplate& get(Role role) const;

    [[nodiscard]] std::vector<Message> render(Role role, const TemplateVars& vars) const;

private:
    std::map<Role, PromptTemplate> templates_;
};

}  // namespace refine_search::gateway
