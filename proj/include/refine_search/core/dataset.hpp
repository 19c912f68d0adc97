#pragma once

#include "refine_search/core/types.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <vector>

namespace refine_search {

enum class DatasetFormat { autodetect, native, humaneval, mbpp };

DatasetFormat dataset_format_from_string(std::string_view text);

/// Maps one JSONL record onto a Task.
///
/// - native:    {task_id, prompt, hidden_tests: [TestCase...], entry_point?}
/// - humaneval: {task_id, prompt, test, entry_point}; the `test` body plus a
///              `check(<entry_point>)` call becomes a single assertion test.
/// - mbpp:      {task_id, text, test_list: [...]}; one assertion per entry.
///
/// `autodetect` picks by key presence in the order above.
Task task_from_record(const nlohmann::json& record, DatasetFormat format = DatasetFormat::autodetect);

/// Blank lines are skipped; a malformed line raises with its line number.
std::vector<Task> load_dataset(const std::filesystem::path& path, DatasetFormat format = DatasetFormat::autodetect);

}  // namespace refine_search
