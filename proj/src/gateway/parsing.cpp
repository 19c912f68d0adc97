#include "refine_search/gateway/parsing.hpp"

#include <fmt/format.h>

#include <regex>
#include <set>
#include <sstream>

namespace refine_search::gateway {

std::string trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return std::string(text.substr(first, last - first + 1));
}

namespace {

struct Fence {
    std::string content;
    std::size_t end = std::string_view::npos;
};

std::optional<Fence> next_fence(std::string_view text, std::size_t from) {
    const auto open = text.find("```", from);
    if (open == std::string_view::npos) return std::nullopt;
    auto body = text.find('\n', open);
    if (body == std::string_view::npos) return Fence{{}, text.size()};
    ++body;
    const auto close = text.find("```", body);
    Fence f;
    if (close == std::string_view::npos) {
        f.content = std::string(text.substr(body));
        f.end = text.size();
    } else {
        f.content = std::string(text.substr(body, close - body));
        f.end = close + 3;
    }
    while (!f.content.empty() && (f.content.back() == '\n' || f.content.back() == '\r')) f.content.pop_back();
    return f;
}

std::vector<std::string> lines_of(std::string_view text) {
    std::vector<std::string> out;
    std::istringstream in{std::string(text)};
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        out.push_back(std::move(line));
    }
    return out;
}

std::vector<std::string> collect_items(const std::vector<std::string>& lines, const std::regex& item) {
    std::vector<std::string> items;
    bool in_item = false;
    for (const auto& line : lines) {
        std::smatch m;
        if (std::regex_match(line, m, item)) {
            items.push_back(trim(m[1].str()));
            in_item = true;
        } else if (in_item && !line.empty() && (line.front() == ' ' || line.front() == '\t') && !trim(line).empty()) {
            items.back() += " " + trim(line);
        } else {
            in_item = false;
        }
    }
    std::erase_if(items, [](const std::string& s) { return s.empty(); });
    return items;
}

}  // namespace

std::string extract_code(std::string_view response) {
    if (auto f = next_fence(response, 0)) return f->content;
    return trim(response);
}

std::vector<std::string> parse_direction_list(std::string_view response, int max_items) {
    static const std::regex numbered(R"(^\s*\d+\s*[.):]\s+(.+)$)");
    static const std::regex bulleted(R"(^\s*(?:[-*+]|•)\s+(.+)$)");
    const auto lines = lines_of(response);

    auto items = collect_items(lines, numbered);
    if (items.empty()) items = collect_items(lines, bulleted);
    if (items.empty()) {
        for (const auto& line : lines) {
            auto t = trim(line);
            if (!t.empty() && !t.starts_with("```")) items.push_back(std::move(t));
        }
    }
    if (max_items >= 0 && items.size() > static_cast<std::size_t>(max_items)) items.resize(max_items);
    return items;
}

std::vector<TestCase> parse_validation_tests(std::string_view response, int max_count) {
    std::string source;
    for (std::size_t pos = 0;;) {
        auto f = next_fence(response, pos);
        if (!f) break;
        source += f->content;
        source += '\n';
        pos = f->end;
    }
    if (source.empty()) source = std::string(response);

    std::vector<TestCase> tests;
    std::set<std::string> seen;
    for (const auto& line : lines_of(source)) {
        auto t = trim(line);
        if (!t.starts_with("assert ") && !t.starts_with("assert(")) continue;
        if (!seen.insert(t).second) continue;
        if (static_cast<int>(tests.size()) >= max_count) break;
        tests.push_back({fmt::format("val-{}", tests.size() + 1), std::move(t), TestKind::assertion});
    }
    return tests;
}

}  // namespace refine_search::gateway
