#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace refine_search {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class TestKind { assertion, io_pair };

std::string_view to_string(TestKind kind);
TestKind test_kind_from_string(std::string_view text);

/// One executable check. For `io_pair` the payload is a JSON object
/// `{"stdin": ..., "expected_stdout": ...}`; for `assertion` it is source
/// text that raises on failure.
struct TestCase {
    std::string test_id;
    std::string payload;
    TestKind kind = TestKind::assertion;

    friend bool operator==(const TestCase&, const TestCase&) = default;
};

/// A code-generation problem: prompt, hidden tests, and (once generated)
/// validation tests. Hidden tests are never shown to a search strategy.
struct Task {
    std::string task_id;
    std::string prompt;
    std::vector<TestCase> hidden_tests;
    std::vector<TestCase> validation_tests;
    std::optional<std::string> entry_point;
};

/// Throws if the task breaks its invariants: empty hidden tests, duplicate
/// test ids, or a validation test sharing an id with a hidden test.
void validate_task(const Task& task);

struct TextualDirection {
    std::string text;
    std::optional<std::string> feedback;
    bool used = false;

    friend bool operator==(const TextualDirection&, const TextualDirection&) = default;
};

struct SharedInfoEntry {
    std::string direction_text;
    std::string outcome_summary;
    double score_delta = 0.0;

    friend bool operator==(const SharedInfoEntry&, const SharedInfoEntry&) = default;
};

/// Accumulated feedback on tried directions. Append-only: `appended`
/// returns a new value and leaves the receiver untouched.
class SharedInformation {
public:
    SharedInformation() = default;

    [[nodiscard]] const std::vector<SharedInfoEntry>& entries() const noexcept { return entries_; }
    [[nodiscard]] const std::string& rendered() const noexcept { return rendered_; }
    [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }

    [[nodiscard]] SharedInformation appended(SharedInfoEntry entry) const;

    /// The highest-delta entry, earliest first on ties.
    [[nodiscard]] std::optional<SharedInfoEntry> best_entry() const;

    static std::string render(const std::vector<SharedInfoEntry>& entries);

private:
    std::vector<SharedInfoEntry> entries_;
    std::string rendered_;
};

struct CandidateNode {
    int node_id = 0;  // 1-based generation order
    std::string source;
    std::optional<int> parent;
    std::optional<TextualDirection> direction_used;
    int depth = 1;  // initial codes sit at depth 1
    double validation_score = 0.0;
    bool passed_all_validation = false;
    std::optional<bool> hidden_result;

    friend bool operator==(const CandidateNode&, const CandidateNode&) = default;
};

enum class StrategyKind { bon, linear, tree, sfs, irtd };

std::string_view to_string(StrategyKind kind);
StrategyKind strategy_kind_from_string(std::string_view text);

struct SearchTrace {
    std::string task_id;
    StrategyKind strategy = StrategyKind::bon;
    /// Configuration label; distinguishes e.g. IRTD with 1, 3 and 5 initial codes.
    std::string label;
    std::vector<CandidateNode> nodes;
    int budget_k = 0;
    bool terminated_early = false;
    std::uint64_t run_seed = 0;

    friend bool operator==(const SearchTrace&, const SearchTrace&) = default;

    [[nodiscard]] const CandidateNode& node(int node_id) const;
    [[nodiscard]] bool hidden_verdicts_complete(std::size_t prefix) const;
};

/// Throws if the trace breaks any structural invariant: budget, node id
/// ordering, parent/depth bookkeeping, early-termination consistency.
void validate_trace(const SearchTrace& trace);

using CorrectnessFn = std::function<bool(int node_id)>;

/// Depth of the earliest-generated correct node, if any.
std::optional<int> first_correct_depth(const SearchTrace& trace, const CorrectnessFn& correct);

/// Convenience overload using the materialized hidden verdicts.
std::optional<int> first_correct_depth(const SearchTrace& trace);

int max_depth(const SearchTrace& trace);

}  // namespace refine_search
