#include "refine_search/gateway/templates.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

namespace refine_search::gateway {

std::string substitute(std::string_view text, const TemplateVars& vars) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '{') {
            const auto close = text.find('}', i + 1);
            if (close != std::string_view::npos) {
                const auto name = text.substr(i + 1, close - i - 1);
                if (const auto it = vars.find(name); it != vars.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out += text[i++];
    }
    return out;
}

namespace {

constexpr const char* kCoderSystem =
    "You are an expert Python programmer. You write correct, complete and efficient code.";

PromptTemplate default_for(Role role) {
    switch (role) {
        case Role::init_code:
            return {kCoderSystem,
                    "Solve the following problem.\n\n{prompt}\n\n"
                    "Return the complete solution in a single ```python code block.{suffix}"};
        case Role::gen_tests:
            return {"You are an expert software tester.",
                    "Write {count} distinct test cases for the following problem. Each test must be a single "
                    "line starting with `assert`. Put all of them in one ```python code block.\n\n{prompt}"};
        case Role::gen_directions:
            return {"You review code and propose concrete ways to fix or improve it.",
                    "Problem:\n{prompt}\n\nCurrent code:\n```python\n{code}\n```\n\n"
                    "Feedback from validation tests:\n{feedback}\n\n"
                    "Insights from earlier attempts:\n{shared_info}\n\n"
                    "Propose {m} distinct directions for revising the code. Answer with a numbered list, "
                    "one direction per item."};
        case Role::refine_code:
            return {kCoderSystem,
                    "Problem:\n{prompt}\n\nCurrent code:\n```python\n{code}\n```\n\n"
                    "Feedback from validation tests:\n{feedback}\n\n"
                    "Revise the code following this direction: {direction}\n\n"
                    "Return the complete revised solution in a single ```python code block."};
        case Role::update_shared_info:
            return {"You keep concise notes about which revision directions work.",
                    "Problem:\n{prompt}\n\nOriginal code:\n```python\n{code}\n```\n\n"
                    "Direction applied: {direction}\n\nRevised code:\n```python\n{refined_code}\n```\n\n"
                    "Validation score changed from {score_before} to {score_after}.\n\n"
                    "Notes so far:\n{shared_info}\n\n"
                    "In one or two sentences, state what this outcome says about the direction."};
        case Role::scout_insight:
            return {"You distill general lessons from a code search so other branches can use them.",
                    "Problem:\n{prompt}\n\nCode before:\n```python\n{code}\n```\n\n"
                    "Direction applied: {direction}\n\nCode after:\n```python\n{refined_code}\n```\n\n"
                    "Validation score changed from {score_before} to {score_after}.\n\n"
                    "Insights so far:\n{shared_info}\n\n"
                    "In one or two sentences, give a general insight that would help when revising other "
                    "candidate solutions to this problem."};
    }
    return {kCoderSystem, "{prompt}"};
}

}  // namespace

PromptTemplates::PromptTemplates() {
    for (const auto role : kAllRoles) templates_[role] = default_for(role);
}

PromptTemplates PromptTemplates::load_directory(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw Error(fmt::format("template directory {} does not exist", dir.string()));
    }
    PromptTemplates out;
    for (const auto role : kAllRoles) {
        const auto path = dir / fmt::format("{}.txt", to_string(role));
        if (!std::filesystem::exists(path)) continue;
        std::ifstream in(path);
        std::stringstream buf;
        buf << in.rdbuf();
        const auto text = buf.str();

        PromptTemplate tmpl = out.get(role);
        const auto sep = text.find("\n---\n");
        if (text.starts_with("---\n")) {
            tmpl.system.clear();
            tmpl.user = text.substr(4);
        } else if (sep != std::string::npos) {
            tmpl.system = text.substr(0, sep);
            tmpl.user = text.substr(sep + 5);
        } else {
            tmpl.user = text;
        }
        out.set(role, std::move(tmpl));
    }
    return out;
}

void PromptTemplates::set(Role role, PromptTemplate tmpl) { templates_[role] = std::move(tmpl); }

const PromptTemplate& PromptTemplates::get(Role role) const { return templates_.at(role); }

std::vector<Message> PromptTemplates::render(Role role, const TemplateVars& vars) const {
    const auto& t = get(role);
    return {{Speaker::system, substitute(t.system, vars)}, {Speaker::user, substitute(t.user, vars)}};
}

}  // namespace refine_search::gateway
