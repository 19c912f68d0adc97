#pragma once

#include "refine_search/core/random.hpp"
#include "refine_search/core/types.hpp"

#include <limits>
#include <map>
#include <optional>
#include <vector>

namespace refine_search::strategies {

/// Per-node search statistics. `quality` is the raw validation score and is
/// what "better child" compares; `value` is the backed-up estimate UCT
/// exploits.
struct TreeNodeStats {
    int node_id = 0;
    std::optional<int> parent;
    double quality = 0.0;
    double value = 0.0;
    int visits = 0;
    /// A node whose directions were never generated still has unexpanded
    /// actions, so it counts as having unused directions.
    bool directions_generated = false;
    std::vector<TextualDirection> unused_directions;
    std::vector<int> children;

    [[nodiscard]] bool has_unused_directions() const {
        return !directions_generated || !unused_directions.empty();
    }
};

/// Nodes keyed by id. Search strategies use id 0 for a virtual root above
/// the initial codes.
class SearchTree {
public:
    /// Adds a root node (no parent).
    TreeNodeStats& add_root(int node_id, double quality);
    TreeNodeStats& add_child(int parent_id, int node_id, double quality);

    [[nodiscard]] const TreeNodeStats& at(int node_id) const;
    TreeNodeStats& at(int node_id);
    [[nodiscard]] bool contains(int node_id) const { return nodes_.contains(node_id); }
    [[nodiscard]] int root() const;
    [[nodiscard]] std::size_t size() const { return nodes_.size(); }
    [[nodiscard]] const std::map<int, TreeNodeStats>& nodes() const { return nodes_; }

    /// Depth below the root (root = 0).
    [[nodiscard]] int depth_of(int node_id) const;
    [[nodiscard]] std::vector<int> path_to(int node_id) const;
    [[nodiscard]] bool has_better_child(int node_id) const;

private:
    std::map<int, TreeNodeStats> nodes_;
    std::optional<int> root_;
};

/// value + c * sqrt(ln(parent_visits + 1) / (visits + 1))
double uct_score(const TreeNodeStats& child, int parent_visits, double c);

/// Resolves UCT ties: lowest node id, or uniformly at random when seeded.
class TieBreaker {
public:
    TieBreaker() = default;
    explicit TieBreaker(std::uint64_t seed) : rng_(Rng(seed)) {}

    int pick(const std::vector<int>& tied_ids);
    [[nodiscard]] bool randomized() const { return rng_.has_value(); }

private:
    std::optional<Rng> rng_;
};

/// Children of `parent` that attain the maximal UCT score (within 1e-12),
/// in ascending id order.
std::vector<int> uct_argmax(const SearchTree& tree, int parent, double c);

int select_uct_child(const SearchTree& tree, int parent, double c, TieBreaker& ties);

/// Node selection for scattered forest search: starting at the root, move
/// to the UCT-chosen child while the current node has a better child and no
/// unused directions; return the first node where that fails.
int select_node_sfs(const SearchTree& tree, double c, TieBreaker& ties);

struct SelectionDepthReport {
    int trials = 0;
    std::map<int, int> depth_counts;
    std::map<int, double> depth_probability;
    /// Depth-1 children with no unused directions and a better child.
    std::vector<int> qualifying_children;
    /// Exact probability that root-level UCT picks a qualifying child.
    double epsilon_bound = 0.0;

    [[nodiscard]] double probability_depth_at_least(int depth) const;
    /// Binomial standard error of the empirical Pr(depth >= 2).
    [[nodiscard]] double standard_error() const;
};

/// Runs select_node_sfs `trials` times with randomized tie-breaking.
/// Requires the root to have no unused directions and a better child;
/// throws "selection premise unmet" otherwise.
SelectionDepthReport simulate_selection_depth(const SearchTree& tree, double c, int trials, std::uint64_t seed);

}  // namespace refine_search::strategies
