#include "refine_search/analysis/depth.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace refine_search::analysis {

double DepthTable::percent(int depth) const {
    if (counted == 0) return 0.0;
    const auto it = counts.find(depth);
    return it == counts.end() ? 0.0 : 100.0 * it->second / counted;
}

int DepthTable::max_observed_depth() const { return counts.empty() ? 0 : counts.rbegin()->first; }

DepthTable first_correct_depth_table(const std::vector<SearchTrace>& traces, std::string label) {
    DepthTable table;
    table.label = std::move(label);
    for (const auto& t : traces) {
        if (const auto d = first_correct_depth(t)) {
            ++table.counts[*d];
            ++table.counted;
        } else {
            ++table.excluded;
        }
    }
    return table;
}

DepthTable max_depth_table(const std::vector<SearchTrace>& traces, std::string label) {
    DepthTable table;
    table.label = std::move(label);
    for (const auto& t : traces) {
        ++table.counts[max_depth(t)];
        ++table.counted;
    }
    return table;
}

std::vector<DepthTable> tables_by_label(const std::vector<SearchTrace>& traces,
                                        DepthTable (*make)(const std::vector<SearchTrace>&, std::string)) {
    std::map<std::string, std::vector<SearchTrace>> groups;
    for (const auto& t : traces) groups[t.label.empty() ? std::string(to_string(t.strategy)) : t.label].push_back(t);
    std::vector<DepthTable> out;
    for (const auto& [label, group] : groups) out.push_back(make(group, label));
    return out;
}

namespace {

int column_count(const std::vector<DepthTable>& tables, int min_columns) {
    int n = min_columns;
    for (const auto& t : tables) n = std::max(n, t.max_observed_depth());
    return n;
}

}  // namespace

std::string tables_csv(const std::vector<DepthTable>& tables, int min_columns) {
    const int cols = column_count(tables, min_columns);
    std::string out = "label";
    for (int d = 1; d <= cols; ++d) out += fmt::format(",depth_{}", d);
    out += ",counted,excluded\n";
    for (const auto& t : tables) {
        out += t.label;
        for (int d = 1; d <= cols; ++d) out += fmt::format(",{:.2f}", t.percent(d));
        out += fmt::format(",{},{}\n", t.counted, t.excluded);
    }
    return out;
}

std::string tables_text(const std::vector<DepthTable>& tables, int min_columns) {
    const int cols = column_count(tables, min_columns);
    std::size_t width = 5;
    for (const auto& t : tables) width = std::max(width, t.label.size());
    std::string out = fmt::format("{:<{}}", "label", width);
    for (int d = 1; d <= cols; ++d) out += fmt::format("  {:>8}", fmt::format("depth {}", d));
    out += fmt::format("  {:>7}  {:>8}\n", "counted", "excluded");
    for (const auto& t : tables) {
        out += fmt::format("{:<{}}", t.label, width);
        for (int d = 1; d <= cols; ++d) out += fmt::format("  {:>7.2f}%", t.percent(d));
        out += fmt::format("  {:>7}  {:>8}\n", t.counted, t.excluded);
    }
    return out;
}

nlohmann::json to_json(const DepthTable& table) {
    nlohmann::json pct = nlohmann::json::object();
    for (const auto& [d, n] : table.counts) pct[std::to_string(d)] = std::round(table.percent(d) * 100.0) / 100.0;
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [d, n] : table.counts) counts[std::to_string(d)] = n;
    return {{"label", table.label},
            {"counts", counts},
            {"percent", pct},
            {"counted", table.counted},
            {"excluded", table.excluded}};
}

}  // namespace refine_search::analysis
