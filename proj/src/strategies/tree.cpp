#include "refine_search/strategies/tree.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace refine_search::strategies {

TreeNodeStats& SearchTree::add_root(int node_id, double quality) {
    if (root_) throw Error("search tree already has a root");
    if (nodes_.contains(node_id)) throw Error(fmt::format("duplicate tree node {}", node_id));
    root_ = node_id;
    auto& n = nodes_[node_id];
    n.node_id = node_id;
    n.quality = quality;
    n.value = quality;
    return n;
}

TreeNodeStats& SearchTree::add_child(int parent_id, int node_id, double quality) {
    if (nodes_.contains(node_id)) throw Error(fmt::format("duplicate tree node {}", node_id));
    auto& parent = at(parent_id);
    parent.children.push_back(node_id);
    auto& n = nodes_[node_id];
    n.node_id = node_id;
    n.parent = parent_id;
    n.quality = quality;
    n.value = quality;
    return n;
}

const TreeNodeStats& SearchTree::at(int node_id) const {
    const auto it = nodes_.find(node_id);
    if (it == nodes_.end()) throw Error(fmt::format("no tree node {}", node_id));
    return it->second;
}

TreeNodeStats& SearchTree::at(int node_id) {
    const auto it = nodes_.find(node_id);
    if (it == nodes_.end()) throw Error(fmt::format("no tree node {}", node_id));
    return it->second;
}

int SearchTree::root() const {
    if (!root_) throw Error("search tree has no root");
    return *root_;
}

int SearchTree::depth_of(int node_id) const {
    int depth = 0;
    for (auto p = at(node_id).parent; p; p = at(*p).parent) ++depth;
    return depth;
}

std::vector<int> SearchTree::path_to(int node_id) const {
    std::vector<int> path{node_id};
    for (auto p = at(node_id).parent; p; p = at(*p).parent) path.push_back(*p);
    std::reverse(path.begin(), path.end());
    return path;
}

bool SearchTree::has_better_child(int node_id) const {
    const auto& n = at(node_id);
    return std::any_of(n.children.begin(), n.children.end(),
                       [&](int c) { return at(c).quality > n.quality; });
}

double uct_score(const TreeNodeStats& child, int parent_visits, double c) {
    return child.value + c * std::sqrt(std::log(static_cast<double>(parent_visits) + 1.0) /
                                       (static_cast<double>(child.visits) + 1.0));
}

int TieBreaker::pick(const std::vector<int>& tied_ids) {
    if (tied_ids.empty()) throw Error("no candidates to break a tie between");
    if (!rng_ || tied_ids.size() == 1) return *std::min_element(tied_ids.begin(), tied_ids.end());
    return tied_ids[rng_->index(tied_ids.size())];
}

std::vector<int> uct_argmax(const SearchTree& tree, int parent, double c) {
    const auto& p = tree.at(parent);
    if (p.children.empty()) throw Error(fmt::format("node {} has no children", parent));
    constexpr double kTieTolerance = 1e-12;
    double best = -std::numeric_limits<double>::infinity();
    for (int id : p.children) best = std::max(best, uct_score(tree.at(id), p.visits, c));
    std::vector<int> tied;
    for (int id : p.children) {
        if (uct_score(tree.at(id), p.visits, c) >= best - kTieTolerance) tied.push_back(id);
    }
    std::sort(tied.begin(), tied.end());
    return tied;
}

int select_uct_child(const SearchTree& tree, int parent, double c, TieBreaker& ties) {
    return ties.pick(uct_argmax(tree, parent, c));
}

int select_node_sfs(const SearchTree& tree, double c, TieBreaker& ties) {
    int current = tree.root();
    while (tree.has_better_child(current) && !tree.at(current).has_unused_directions()) {
        current = select_uct_child(tree, current, c, ties);
    }
    return current;
}

double SelectionDepthReport::probability_depth_at_least(int depth) const {
    double p = 0.0;
    for (const auto& [d, prob] : depth_probability) {
        if (d >= depth) p += prob;
    }
    return p;
}

double SelectionDepthReport::standard_error() const {
    if (trials <= 0) return 0.0;
    const double p = probability_depth_at_least(2);
    return std::sqrt(p * (1.0 - p) / trials);
}

SelectionDepthReport simulate_selection_depth(const SearchTree& tree, double c, int trials, std::uint64_t seed) {
    if (trials < 1) throw Error("trials must be >= 1");
    const int root = tree.root();
    const auto& r = tree.at(root);
    if (r.has_unused_directions() || !tree.has_better_child(root)) throw Error("selection premise unmet");

    SelectionDepthReport report;
    report.trials = trials;
    for (int id : r.children) {
        const auto& child = tree.at(id);
        if (!child.has_unused_directions() && tree.has_better_child(id)) report.qualifying_children.push_back(id);
    }
    const auto argmax = uct_argmax(tree, root, c);
    const auto hits = std::count_if(argmax.begin(), argmax.end(), [&](int id) {
        return std::find(report.qualifying_children.begin(), report.qualifying_children.end(), id) !=
               report.qualifying_children.end();
    });
    report.epsilon_bound = static_cast<double>(hits) / static_cast<double>(argmax.size());

    TieBreaker ties(seed);
    for (int t = 0; t < trials; ++t) ++report.depth_counts[tree.depth_of(select_node_sfs(tree, c, ties))];
    for (const auto& [d, n] : report.depth_counts) {
        report.depth_probability[d] = static_cast<double>(n) / static_cast<double>(trials);
    }
    return report;
}

}  // namespace refine_search::strategies
