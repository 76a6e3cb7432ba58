#include "rectree/models.hpp"

#include <algorithm>

namespace rectree {

template <typename LeafT>
int Tree<LeafT>::depth() const {
    struct Frame {
        std::int32_t node;
        int depth;
    };
    int best = 0;
    std::vector<Frame> stack{{root_, 0}};
    while (!stack.empty()) {
        auto [id, d] = stack.back();
        stack.pop_back();
        const Node& n = node(id);
        if (n.is_leaf()) {
            best = std::max(best, d);
        } else {
            stack.push_back({n.left, d + 1});
            stack.push_back({n.right, d + 1});
        }
    }
    return best;
}

template <typename LeafT>
LeafT Tree<LeafT>::evaluate(const Instance& x) const {
    std::int32_t id = root_;
    while (true) {
        const Node& n = node(id);
        if (n.is_leaf()) return n.leaf;
        id = x.bit(n.cond) ? n.right : n.left;
    }
}

template <typename LeafT>
void Tree<LeafT>::validate() const {
    if (nodes_.empty() || root_ < 0 || root_ >= node_count()) {
        throw DataError("tree has no valid root");
    }
    std::vector<std::uint8_t> seen(nodes_.size(), 0);
    std::vector<std::int32_t> stack{root_};
    while (!stack.empty()) {
        std::int32_t id = stack.back();
        stack.pop_back();
        if (id < 0 || id >= node_count()) {
            throw DataError("tree child index " + std::to_string(id) + " out of range");
        }
        if (seen[static_cast<std::size_t>(id)]++) {
            throw DataError("tree node " + std::to_string(id) + " is reachable twice");
        }
        const Node& n = node(id);
        if (!n.is_leaf()) {
            stack.push_back(n.left);
            stack.push_back(n.right);
        }
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) {
            throw DataError("tree node " + std::to_string(i) + " is unreachable");
        }
    }
}

template class Tree<bool>;
template class Tree<double>;

double BoostedTree::margin(const Instance& x) const {
    double sum = 0.0;
    for (const RegressionTree& t : trees_) {
        sum += t.evaluate(x);
    }
    return sum;
}

bool classify(const DecisionTree& dt, const Instance& x) { return dt.evaluate(x); }

bool classify(const BoostedTree& bt, const Instance& x) { return bt.margin(x) > 0.0; }

template <typename LeafT>
std::vector<PathTerm<LeafT>> paths(const Tree<LeafT>& tree, const DomainTheory& th) {
    std::vector<PathTerm<LeafT>> out;
    Term term;
    std::vector<std::int32_t> trail;

    auto walk = [&](auto&& self, std::int32_t id) -> void {
        trail.push_back(id);
        const auto& n = tree.node(id);
        if (n.is_leaf()) {
            out.push_back({term, n.leaf, trail, th_consistent(term, th)});
        } else {
            term.insert({n.cond, false});
            self(self, n.left);
            term.erase(n.cond);
            term.insert({n.cond, true});
            self(self, n.right);
            term.erase(n.cond);
        }
        trail.pop_back();
    };
    walk(walk, tree.root());
    return out;
}

template std::vector<PathTerm<bool>> paths(const Tree<bool>&, const DomainTheory&);
template std::vector<PathTerm<double>> paths(const Tree<double>&, const DomainTheory&);

std::optional<bool> apply_rule(const ClassificationRule& r, const Instance& x) {
    if (!r.premises().covers(x)) return std::nullopt;
    return r.conclusion();
}

bool rules_conflicting(const ClassificationRule& a, const ClassificationRule& b,
                       const DomainTheory& th) {
    if (a.conclusion() == b.conclusion()) return false;
    auto both = Term::merged(a.premises(), b.premises());
    return both.has_value() && th_consistent(*both, th);
}

ConditionSet build_condition_set(const BoostedTree& bt) {
    const auto& source = bt.conditions();
    if (!source && bt.tree_count() > 0) {
        for (const RegressionTree& t : bt.trees()) {
            for (std::int32_t id = 0; id < t.node_count(); ++id) {
                if (!t.node(id).is_leaf()) {
                    throw DataError("boosted tree has splits but no condition set");
                }
            }
        }
    }

    std::vector<Condition> used;
    std::vector<std::uint8_t> mark(source ? static_cast<std::size_t>(source->size()) : 0, 0);
    for (const RegressionTree& t : bt.trees()) {
        for (std::int32_t id = 0; id < t.node_count(); ++id) {
            const auto& n = t.node(id);
            if (n.is_leaf()) continue;
            if (!source || n.cond < 0 || n.cond >= source->size()) {
                throw DataError("split references unknown condition id " + std::to_string(n.cond));
            }
            if (!mark[static_cast<std::size_t>(n.cond)]++) {
                used.push_back(source->at(n.cond));
            }
        }
    }

    std::sort(used.begin(), used.end(), [](const Condition& a, const Condition& b) {
        if (a.attribute != b.attribute) return a.attribute < b.attribute;
        if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
        if (a.kind == ConditionKind::NumericGreater) return a.threshold > b.threshold;
        return a.category < b.category;
    });
    return ConditionSet(std::move(used));
}

BoostedTree rebind(const BoostedTree& bt, std::shared_ptr<const ConditionSet> cs) {
    const auto& source = bt.conditions();
    std::vector<RegressionTree> rebound;
    rebound.reserve(bt.trees().size());
    for (const RegressionTree& t : bt.trees()) {
        RegressionTree::Builder b;
        for (std::int32_t id = 0; id < t.node_count(); ++id) {
            const auto& n = t.node(id);
            if (n.is_leaf()) {
                b.add_leaf(n.leaf);
            } else {
                auto mapped = cs->find(source->at(n.cond));
                if (!mapped) {
                    throw DataError("condition '" + source->at(n.cond).display() +
                                    "' is absent from the target condition set");
                }
                b.add_split(*mapped, n.left, n.right);
            }
        }
        rebound.push_back(b.finish(t.root(), cs));
    }
    return BoostedTree(std::move(rebound), std::move(cs));
}

}  // namespace rectree
