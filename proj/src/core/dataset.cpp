#include "refine_search/core/dataset.hpp"

#include "refine_search/core/trace_io.hpp"

#include <fmt/format.h>

#include <fstream>

namespace refine_search {

using nlohmann::json;

DatasetFormat dataset_format_from_string(std::string_view text) {
    if (text == "auto" || text == "autodetect") return DatasetFormat::autodetect;
    if (text == "native") return DatasetFormat::native;
    if (text == "humaneval") return DatasetFormat::humaneval;
    if (text == "mbpp") return DatasetFormat::mbpp;
    throw Error(fmt::format("unknown dataset format '{}'", text));
}

namespace {

std::string id_string(const json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
}

DatasetFormat detect(const json& r) {
    if (r.contains("hidden_tests")) return DatasetFormat::native;
    if (r.contains("test") && r.contains("prompt")) return DatasetFormat::humaneval;
    if (r.contains("test_list")) return DatasetFormat::mbpp;
    throw Error("cannot detect dataset record format");
}

}  // namespace

Task task_from_record(const json& r, DatasetFormat format) {
    if (format == DatasetFormat::autodetect) format = detect(r);
    Task task;
    task.task_id = id_string(r.at("task_id"));
    switch (format) {
        case DatasetFormat::native:
            task.prompt = r.at("prompt").get<std::string>();
            task.hidden_tests = r.at("hidden_tests").get<std::vector<TestCase>>();
            if (r.contains("entry_point") && !r["entry_point"].is_null()) {
                task.entry_point = r["entry_point"].get<std::string>();
            }
            break;
        case DatasetFormat::humaneval: {
            task.prompt = r.at("prompt").get<std::string>();
            task.entry_point = r.at("entry_point").get<std::string>();
            auto body = r.at("test").get<std::string>();
            body += fmt::format("\n\ncheck({})\n", *task.entry_point);
            task.hidden_tests.push_back({"hidden-1", std::move(body), TestKind::assertion});
            break;
        }
        case DatasetFormat::mbpp: {
            task.prompt = r.at("text").get<std::string>();
            int i = 0;
            for (const auto& t : r.at("test_list")) {
                task.hidden_tests.push_back({fmt::format("hidden-{}", ++i), t.get<std::string>(), TestKind::assertion});
            }
            break;
        }
        case DatasetFormat::autodetect: break;
    }
    validate_task(task);
    return task;
}

std::vector<Task> load_dataset(const std::filesystem::path& path, DatasetFormat format) {
    std::ifstream in(path);
    if (!in) throw Error(fmt::format("cannot open dataset {}", path.string()));
    std::vector<Task> tasks;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            tasks.push_back(task_from_record(json::parse(line), format));
        } catch (const std::exception& e) {
            throw Error(fmt::format("{}:{}: {}", path.string(), lineno, e.what()));
        }
    }
    return tasks;
}

}  // namespace refine_search
