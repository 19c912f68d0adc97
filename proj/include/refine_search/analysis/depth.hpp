#pragma once

#include "refine_search/core/types.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <vector>

namespace refine_search::analysis {

/// Distribution of a per-trace depth statistic.
struct DepthTable {
    std::string label;
    /// depth -> number of traces
    std::map<int, int> counts;
    /// Traces that entered the distribution.
    int counted = 0;
    /// Traces left out (no correct node, for first-correct tables).
    int excluded = 0;

    [[nodiscard]] double percent(int depth) const;
    [[nodiscard]] int max_observed_depth() const;
};

/// Over traces with at least one hidden-correct node: how often the earliest
/// generated correct node sits at each depth. Requires hidden verdicts.
DepthTable first_correct_depth_table(const std::vector<SearchTrace>& traces, std::string label = {});

/// Over all traces: how often each maximum depth occurs.
DepthTable max_depth_table(const std::vector<SearchTrace>& traces, std::string label = {});

/// One table per trace label, in label order.
std::vector<DepthTable> tables_by_label(const std::vector<SearchTrace>& traces,
                                        DepthTable (*make)(const std::vector<SearchTrace>&, std::string));

/// Two-decimal percentages, columns depth 1..max(observed, min_columns).
std::string tables_csv(const std::vector<DepthTable>& tables, int min_columns = 1);
std::string tables_text(const std::vector<DepthTable>& tables, int min_columns = 1);
nlohmann::json to_json(const DepthTable& table);

}  // namespace refine_search::analysis
