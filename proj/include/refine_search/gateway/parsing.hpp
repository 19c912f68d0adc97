#pragma once

#include "refine_search/core/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace refine_search::gateway {

/// Contents of the first fenced block (language tag dropped), or the whole
/// response trimmed when there is no fence.
std::string extract_code(std::string_view response);

/// Up to `max_items` direction texts. Numbered items win over bullets, which
/// win over plain lines; indented lines continue the previous item.
/// Returns an empty list when nothing parses.
std::vector<std::string> parse_direction_list(std::string_view response, int max_items);

/// `assert ...` lines from fenced blocks (or the whole text without fences),
/// deduplicated in first-seen order and capped at `max_count`. Ids are
/// `val-1`, `val-2`, ... so they never collide with hidden test ids.
std::vector<TestCase> parse_validation_tests(std::string_view response, int max_count);

std::string trim(std::string_view text);

}  // namespace refine_search::gateway
