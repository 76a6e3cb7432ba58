#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rectree/feature_space.hpp"

namespace rectree {

// Arena node. Left child is the false branch, right child the true branch.
template <typename LeafT>
struct TreeNode {
    std::int32_t cond = -1;
    std::int32_t left = -1;
    std::int32_t right = -1;
    LeafT leaf{};

    bool is_leaf() const { return cond < 0; }
};

// Binary tree over condition ids stored in an index arena. Immutable after
// construction; rewrites produce fresh trees.
template <typename LeafT>
class Tree {
public:
    using Node = TreeNode<LeafT>;

    class Builder {
    public:
        std::int32_t add_leaf(LeafT value) {
            nodes_.push_back(Node{-1, -1, -1, value});
            return static_cast<std::int32_t>(nodes_.size() - 1);
        }
        std::int32_t add_split(std::int32_t cond, std::int32_t left, std::int32_t right) {
            nodes_.push_back(Node{cond, left, right, LeafT{}});
            return static_cast<std::int32_t>(nodes_.size() - 1);
        }
        Tree finish(std::int32_t root, std::shared_ptr<const ConditionSet> conditions = nullptr) {
            Tree t;
            t.nodes_ = std::move(nodes_);
            t.root_ = root;
            t.conditions_ = std::move(conditions);
            t.validate();
            return t;
        }

    private:
        std::vector<Node> nodes_;
    };

    static Tree single_leaf(LeafT value, std::shared_ptr<const ConditionSet> conditions = nullptr) {
        Builder b;
        std::int32_t root = b.add_leaf(value);
        return b.finish(root, std::move(conditions));
    }

    const Node& node(std::int32_t id) const { return nodes_[static_cast<std::size_t>(id)]; }
    std::int32_t root() const { return root_; }
    int node_count() const { return static_cast<int>(nodes_.size()); }
    int depth() const;

    LeafT evaluate(const Instance& x) const;

    const std::shared_ptr<const ConditionSet>& conditions() const { return conditions_; }
    Tree with_conditions(std::shared_ptr<const ConditionSet> cs) const {
        Tree t = *this;
        t.conditions_ = std::move(cs);
        return t;
    }

    // Checks arena integrity: indices in range, single root, acyclic, every
    // node reachable exactly once.
    void validate() const;

private:
    std::vector<Node> nodes_;
    std::int32_t root_ = -1;
    std::shared_ptr<const ConditionSet> conditions_;
};

using DecisionTree = Tree<bool>;
using RegressionTree = Tree<double>;

// Ordered list of regression trees; classifies positive iff the leaf-value
// sum, accumulated in list order, is strictly greater than zero.
class BoostedTree {
public:
    BoostedTree() = default;
    BoostedTree(std::vector<RegressionTree> trees, std::shared_ptr<const ConditionSet> conditions)
        : trees_(std::move(trees)), conditions_(std::move(conditions)) {}

    const std::vector<RegressionTree>& trees() const { return trees_; }
    int tree_count() const { return static_cast<int>(trees_.size()); }
    const std::shared_ptr<const ConditionSet>& conditions() const { return conditions_; }

    double margin(const Instance& x) const;

private:
    std::vector<RegressionTree> trees_;
    std::shared_ptr<const ConditionSet> conditions_;
};

bool classify(const DecisionTree& dt, const Instance& x);
bool classify(const BoostedTree& bt, const Instance& x);

template <typename LeafT>
struct PathTerm {
    Term term;
    LeafT leaf{};
    std::vector<std::int32_t> nodes;
    bool feasible = true;
};

// One PathTerm per leaf in depth-first, false-branch-first order.
// Theory-infeasible paths are flagged, not dropped.
template <typename LeafT>
std::vector<PathTerm<LeafT>> paths(const Tree<LeafT>& tree, const DomainTheory& th);

// Partial classifier "premises => conclusion". Premises are stored closed
// under the theory, so coverage is a plain subset test.
class ClassificationRule {
public:
    ClassificationRule(const Term& premises, bool conclusion, const DomainTheory& th)
        : premises_(closure(premises, th)), conclusion_(conclusion) {}

    const Term& premises() const { return premises_; }
    bool conclusion() const { return conclusion_; }

private:
    Term premises_;
    bool conclusion_;
};

// Conclusion class if the rule covers x, nullopt otherwise.
std::optional<bool> apply_rule(const ClassificationRule& r, const Instance& x);

bool rules_conflicting(const ClassificationRule& a, const ClassificationRule& b,
                       const DomainTheory& th);

// Every distinct split condition appearing in bt, deduplicated, with
// deterministic id assignment: attribute name, then kind, then threshold
// descending (numeric) / value ascending (categorical).
ConditionSet build_condition_set(const BoostedTree& bt);

// Remaps every split in bt onto the given condition set.
BoostedTree rebind(const BoostedTree& bt, std::shared_ptr<const ConditionSet> cs);

}  // namespace rectree
