#pragma once

#include "refine_search/core/types.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <vector>

namespace refine_search::analysis {

using Vector = std::vector<double>;

struct DiversityMatrix {
    /// Axis labels, one per group.
    std::vector<std::string> labels;
    std::vector<std::vector<double>> values;
    /// Groups with a single vector; their diagonal is 1.0 by convention.
    std::vector<bool> singleton;
};

/// Entry (i, j) is the mean cosine similarity over pairs (u in group i,
/// v in group j); on the diagonal a vector is never paired with itself.
/// Throws on empty groups, zero vectors, or mixed dimensions.
DiversityMatrix diversity_matrix(const std::vector<std::vector<Vector>>& groups,
                                 std::vector<std::string> labels = {});

/// Lowercase hex SHA-256 of the direction text; the key of embedding files.
std::string text_hash(std::string_view text);

/// Directions used in the traces, grouped two ways: by refinement step (the
/// s-th refinement of each trace lands in step s) and by initial code (the
/// depth-1 ancestor's position among the trace's initial codes).
struct DirectionGroups {
    std::vector<std::vector<std::string>> by_step;
    std::vector<std::vector<std::string>> by_initial_code;
};

DirectionGroups group_directions(const std::vector<SearchTrace>& traces);

/// Source of one embedding per direction text.
class EmbeddingSource {
public:
    virtual ~EmbeddingSource() = default;
    /// Returns one vector per text or throws listing the missing ones.
    virtual std::vector<Vector> embed(const std::vector<std::string>& texts) = 0;
};

/// JSONL lines `{"text_hash": <sha256 hex>, "vector": [...]}`.
class EmbeddingFile final : public EmbeddingSource {
public:
    explicit EmbeddingFile(const std::filesystem::path& path);
    std::vector<Vector> embed(const std::vector<std::string>& texts) override;
    [[nodiscard]] std::size_t size() const { return table_.size(); }

private:
    std::map<std::string, Vector> table_;
};

/// OpenAI-compatible `POST {base_url}/embeddings`.
class EmbeddingEndpoint final : public EmbeddingSource {
public:
    EmbeddingEndpoint(std::string base_url, std::string model, std::string api_key = {});
    std::vector<Vector> embed(const std::vector<std::string>& texts) override;

private:
    std::string origin_;
    std::string prefix_;
    std::string model_;
    std::string api_key_;
};

struct EmbeddedGroups {
    std::vector<std::vector<Vector>> by_step;
    std::vector<std::vector<Vector>> by_initial_code;
};

/// Embeds every direction in the traces (each distinct text once) and
/// normalizes vectors to unit length.
EmbeddedGroups embed_directions(const std::vector<SearchTrace>& traces, EmbeddingSource& source);

/// First line documents the grouping; then a header row and one row per group.
std::string matrix_csv(const DiversityMatrix& matrix, std::string_view grouping);
std::string matrix_svg(const DiversityMatrix& matrix, std::string_view title);
nlohmann::json to_json(const DiversityMatrix& matrix, std::string_view grouping);

}  // namespace refine_search::analysis
