#include "refine_search/core/trace_io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>

namespace refine_search {

using nlohmann::json;

void to_json(json& j, const TestCase& t) {
    j = json{{"test_id", t.test_id}, {"payload", t.payload}, {"kind", to_string(t.kind)}};
}

void from_json(const json& j, TestCase& t) {
    j.at("test_id").get_to(t.test_id);
    j.at("payload").get_to(t.payload);
    t.kind = test_kind_from_string(j.value("kind", std::string{"assertion"}));
}

void to_json(json& j, const TextualDirection& d) {
    j = json{{"text", d.text}, {"used", d.used}};
    j["feedback"] = d.feedback ? json(*d.feedback) : json(nullptr);
}

void from_json(const json& j, TextualDirection& d) {
    j.at("text").get_to(d.text);
    d.used = j.value("used", false);
    if (j.contains("feedback") && !j["feedback"].is_null()) d.feedback = j["feedback"].get<std::string>();
}

void to_json(json& j, const CandidateNode& n) {
    j = json{{"node_id", n.node_id},
             {"source", n.source},
             {"depth", n.depth},
             {"validation_score", n.validation_score},
             {"passed_all_validation", n.passed_all_validation}};
    j["parent"] = n.parent ? json(*n.parent) : json(nullptr);
    j["direction_used"] = n.direction_used ? json(*n.direction_used) : json(nullptr);
    j["hidden_result"] = n.hidden_result ? json(*n.hidden_result) : json(nullptr);
}

void from_json(const json& j, CandidateNode& n) {
    j.at("node_id").get_to(n.node_id);
    j.at("source").get_to(n.source);
    j.at("depth").get_to(n.depth);
    j.at("validation_score").get_to(n.validation_score);
    j.at("passed_all_validation").get_to(n.passed_all_validation);
    n.parent.reset();
    n.direction_used.reset();
    n.hidden_result.reset();
    if (j.contains("parent") && !j["parent"].is_null()) n.parent = j["parent"].get<int>();
    if (j.contains("direction_used") && !j["direction_used"].is_null()) {
        n.direction_used = j["direction_used"].get<TextualDirection>();
    }
    if (j.contains("hidden_result") && !j["hidden_result"].is_null()) n.hidden_result = j["hidden_result"].get<bool>();
}

void to_json(json& j, const SearchTrace& t) {
    auto nodes = t.nodes;
    std::sort(nodes.begin(), nodes.end(), [](const auto& a, const auto& b) { return a.node_id < b.node_id; });
    j = json{{"task_id", t.task_id},
             {"strategy", to_string(t.strategy)},
             {"label", t.label},
             {"budget_k", t.budget_k},
             {"terminated_early", t.terminated_early},
             {"run_seed", t.run_seed},
             {"nodes", nodes}};
}

void from_json(const json& j, SearchTrace& t) {
    j.at("task_id").get_to(t.task_id);
    t.strategy = strategy_kind_from_string(j.at("strategy").get<std::string>());
    t.label = j.value("label", std::string{to_string(t.strategy)});
    j.at("budget_k").get_to(t.budget_k);
    j.at("terminated_early").get_to(t.terminated_early);
    j.at("run_seed").get_to(t.run_seed);
    j.at("nodes").get_to(t.nodes);
}

std::string trace_file_name(std::string_view task_id, std::string_view label, std::uint64_t run_seed) {
    std::string safe(task_id);
    std::replace_if(safe.begin(), safe.end(), [](char c) { return c == '/' || c == '\\' || c == ':'; }, '_');
    return fmt::format("{}.{}.{}{}", safe, label, run_seed, kTraceExtension);
}

void save_trace(const SearchTrace& trace, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw Error(fmt::format("cannot write {}", tmp.string()));
        out << json(trace).dump(2) << '\n';
        if (!out) throw Error(fmt::format("write failed for {}", tmp.string()));
    }
    std::filesystem::rename(tmp, path);
}

SearchTrace load_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(fmt::format("cannot open trace {}", path.string()));
    try {
        return json::parse(in).get<SearchTrace>();
    } catch (const json::exception& e) {
        throw Error(fmt::format("malformed trace {}: {}", path.string(), e.what()));
    }
}

std::vector<std::filesystem::path> collect_trace_files(const std::vector<std::string>& inputs) {
    namespace fs = std::filesystem;
    std::vector<fs::path> out;
    for (const auto& in : inputs) {
        const fs::path p(in);
        if (fs::is_directory(p)) {
            for (const auto& entry : fs::recursive_directory_iterator(p)) {
                const auto name = entry.path().filename().string();
                if (entry.is_regular_file() && name.ends_with(kTraceExtension)) out.push_back(entry.path());
            }
        } else if (fs::exists(p)) {
            out.push_back(p);
        } else {
            throw Error(fmt::format("no such trace file or directory: {}", in));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace refine_search
