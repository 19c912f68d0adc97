#pragma once

#include "refine_search/core/types.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace refine_search {

void to_json(nlohmann::json& j, const TestCase& t);
void from_json(const nlohmann::json& j, TestCase& t);
void to_json(nlohmann::json& j, const TextualDirection& d);
void from_json(const nlohmann::json& j, TextualDirection& d);
void to_json(nlohmann::json& j, const CandidateNode& n);
void from_json(const nlohmann::json& j, CandidateNode& n);
void to_json(nlohmann::json& j, const SearchTrace& t);
void from_json(const nlohmann::json& j, SearchTrace& t);

inline constexpr std::string_view kTraceExtension = ".trace.json";

/// `<task_id>.<label>.<run_seed>.trace.json`, with path separators in the
/// task id replaced so HumanEval-style ids stay in one directory.
std::string trace_file_name(std::string_view task_id, std::string_view label, std::uint64_t run_seed);

void save_trace(const SearchTrace& trace, const std::filesystem::path& path);
SearchTrace load_trace(const std::filesystem::path& path);

/// Expands each argument: directories contribute every `*.trace.json`
/// anywhere below them, files are taken as-is. Result is sorted.
std::vector<std::filesystem::path> collect_trace_files(const std::vector<std::string>& inputs);

}  // namespace refine_search
