#include "rectree/rectify.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_map>

namespace rectree {

namespace {

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

// Literals the rule still requires beyond what the path already settles,
// in ascending condition-id order.
std::vector<Literal> missing_literals(const Term& closed_premises, const Term& closed_path) {
    std::vector<Literal> out;
    for (const Literal& lit : closed_premises) {
        if (!closed_path.contains(lit)) out.push_back(lit);
    }
    return out;
}

struct Rebuilder {
    const DecisionTree& source;
    const DomainTheory& th;
    const Term& premises;  // closed
    bool conclusion;
    DecisionTree::Builder builder;

    std::int32_t copy_subtree(std::int32_t id) {
        const auto& n = source.node(id);
        if (n.is_leaf()) return builder.add_leaf(n.leaf);
        const std::int32_t left = copy_subtree(n.left);
        const std::int32_t right = copy_subtree(n.right);
        return builder.add_split(n.cond, left, right);
    }

    // path holds the closure of the literals on the way down; nullopt once
    // the branch is theory-infeasible (such subtrees are copied untouched).
    std::int32_t rebuild(std::int32_t id, const std::optional<Term>& path) {
        const auto& n = source.node(id);
        if (!path.has_value()) return copy_subtree(id);
        if (!n.is_leaf()) {
            const std::int32_t left = rebuild(n.left, extend(*path, {n.cond, false}));
            const std::int32_t right = rebuild(n.right, extend(*path, {n.cond, true}));
            return builder.add_split(n.cond, left, right);
        }
        if (n.leaf == conclusion) return builder.add_leaf(n.leaf);
        auto with_premises = Term::merged(*path, premises);
        if (!with_premises.has_value() || !th_consistent(*with_premises, th)) {
            return builder.add_leaf(n.leaf);  // rule cannot fire on this path
        }
        // Graft a chain testing the not-yet-decided premise literals; any
        // deviation keeps the original class.
        std::int32_t next = builder.add_leaf(conclusion);
        const std::vector<Literal> chain = missing_literals(premises, *path);
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            const std::int32_t deviate = builder.add_leaf(n.leaf);
            next = it->positive ? builder.add_split(it->id, deviate, next)
                                : builder.add_split(it->id, next, deviate);
        }
        return next;
    }

    std::optional<Term> extend(const Term& closed_path, Literal lit) {
        Term t = closed_path;
        auto pol = t.polarity_of(lit.id);
        if (pol.has_value()) {
            return *pol == lit.positive ? std::optional<Term>(std::move(t)) : std::nullopt;
        }
        t.insert(lit);
        if (!th_consistent(t, th)) return std::nullopt;
        return closure(t, th);
    }
};

}  // namespace

DecisionTree rectify_by_rule(const DecisionTree& dt, const ClassificationRule& r,
                             const DomainTheory& th) {
    if (!th_consistent(r.premises(), th)) {
        throw PreconditionError("rectification rule has theory-inconsistent premises");
    }
    Rebuilder rb{dt, th, r.premises(), r.conclusion(), {}};
    const std::int32_t root = rb.rebuild(dt.root(), Term{});
    return rb.builder.finish(root, dt.conditions());
}

namespace {

// One simplification pass over a staging arena. Bottom-up structural hashes
// make the identical-children test cheap; a deep compare confirms hash hits.
struct SimplifyPass {
    const DecisionTree& source;
    const DomainTheory& th;
    std::vector<TreeNode<bool>> staged;
    std::vector<std::uint64_t> hashes;

    std::int32_t add_leaf(bool value) {
        staged.push_back({-1, -1, -1, value});
        hashes.push_back(value ? 0x9e3779b97f4a7c15ull : 0xc2b2ae3d27d4eb4full);
        return static_cast<std::int32_t>(staged.size() - 1);
    }

    std::int32_t add_split(std::int32_t cond, std::int32_t left, std::int32_t right) {
        staged.push_back({cond, left, right, false});
        std::uint64_t h = 0x100000001b3ull * static_cast<std::uint64_t>(cond + 1);
        h ^= hashes[static_cast<std::size_t>(left)] * 0x85ebca77c2b2ae63ull;
        h ^= hashes[static_cast<std::size_t>(right)] * 0x27d4eb2f165667c5ull;
        h = (h << 13) | (h >> 51);
        hashes.push_back(h);
        return static_cast<std::int32_t>(staged.size() - 1);
    }

    bool staged_equal(std::int32_t a, std::int32_t b) const {
        if (a == b) return true;
        const auto& na = staged[static_cast<std::size_t>(a)];
        const auto& nb = staged[static_cast<std::size_t>(b)];
        if (na.cond != nb.cond) return false;
        if (na.is_leaf()) return na.leaf == nb.leaf;
        return staged_equal(na.left, nb.left) && staged_equal(na.right, nb.right);
    }

    std::int32_t run(std::int32_t id, const Term& closed_path) {
        const auto& n = source.node(id);
        if (n.is_leaf()) return add_leaf(n.leaf);

        std::optional<Term> on_false = try_extend(closed_path, {n.cond, false});
        std::optional<Term> on_true = try_extend(closed_path, {n.cond, true});

        // a branch the theory forbids disappears, and the node with it
        if (!on_false.has_value()) return run(n.right, *on_true);
        if (!on_true.has_value()) return run(n.left, *on_false);

        const std::int32_t left = run(n.left, *on_false);
        const std::int32_t right = run(n.right, *on_true);
        if (hashes[static_cast<std::size_t>(left)] == hashes[static_cast<std::size_t>(right)] &&
            staged_equal(left, right)) {
            return left;
        }
        return add_split(n.cond, left, right);
    }

    std::optional<Term> try_extend(const Term& closed_path, Literal lit) {
        auto pol = closed_path.polarity_of(lit.id);
        if (pol.has_value()) {
            // the path already decides this condition one way
            return *pol == lit.positive ? std::optional<Term>(closed_path) : std::nullopt;
        }
        Term t = closed_path;
        t.insert(lit);
        if (!th_consistent(t, th)) return std::nullopt;
        return closure(t, th);
    }

    DecisionTree finish(std::int32_t root) {
        // the merge step can leave shared or orphaned staged nodes; emit a
        // proper tree holding exactly the reachable structure
        DecisionTree::Builder builder;
        auto emit = [&](auto&& self, std::int32_t id) -> std::int32_t {
            const auto& n = staged[static_cast<std::size_t>(id)];
            if (n.is_leaf()) return builder.add_leaf(n.leaf);
            const std::int32_t l = self(self, n.left);
            const std::int32_t r = self(self, n.right);
            return builder.add_split(n.cond, l, r);
        };
        const std::int32_t new_root = emit(emit, root);
        return builder.finish(new_root, source.conditions());
    }
};

bool trees_identical(const DecisionTree& a, const DecisionTree& b) {
    if (a.node_count() != b.node_count()) return false;
    auto walk = [&](auto&& self, std::int32_t ia, std::int32_t ib) -> bool {
        const auto& na = a.node(ia);
        const auto& nb = b.node(ib);
        if (na.cond != nb.cond) return false;
        if (na.is_leaf()) return na.leaf == nb.leaf;
        return self(self, na.left, nb.left) && self(self, na.right, nb.right);
    };
    return walk(walk, a.root(), b.root());
}

}  // namespace

DecisionTree simplify(const DecisionTree& dt, const DomainTheory& th) {
    DecisionTree current = dt;
    while (true) {
        SimplifyPass pass{current, th, {}, {}};
        const std::int32_t root = pass.run(current.root(), Term{});
        DecisionTree next = pass.finish(root);
        if (trees_identical(next, current)) return next;
        current = std::move(next);
    }
}

StepOutcome distill_step(const DecisionTree& dt, const BoostedTree& bt, const Instance& x,
                         const DomainTheory& th, const DistillOptions& opts) {
    const bool target = classify(bt, x);
    if (classify(dt, x) == target) {
        throw PreconditionError("distill step on instance " + x.to_string() +
                                " which the tree already classifies correctly");
    }
    const Term reason = tree_specific_reason(bt, x, th, opts.explain);
    ClassificationRule rule(reason, target, th);
    DecisionTree out = rectify_by_rule(dt, rule, th);
    if (opts.simplify) out = simplify(out, th);
    return {std::move(out), std::move(rule)};
}

DistillResult distill_stream(const DecisionTree& start, const BoostedTree& bt,
                             std::span<const Instance> stream, const DomainTheory& th,
                             const DistillOptions& opts) {
    if (opts.max_steps.has_value() && *opts.max_steps < 1) {
        throw PreconditionError("max_steps must be at least 1");
    }
    DistillResult result{start, {}, 0};

    std::vector<std::uint8_t> bt_class(stream.size());
    for (std::size_t i = 0; i < stream.size(); ++i) {
        bt_class[i] = classify(bt, stream[i]) ? 1 : 0;
    }
    auto diff_count = [&]() {
        int wrong = 0;
        for (std::size_t i = 0; i < stream.size(); ++i) {
            if (classify(result.tree, stream[i]) != (bt_class[i] == 1)) ++wrong;
        }
        return wrong;
    };

    // identical instances reuse the explanation extracted at first sight
    std::unordered_map<Instance, Term, InstanceHash> memo;

    int remaining = diff_count();
    for (const Instance& x : stream) {
        if (opts.stop_on_empty_diff && remaining == 0) break;
        if (opts.max_steps.has_value() && result.corrections >= *opts.max_steps) break;
        if (classify(result.tree, x) == classify(bt, x)) continue;

        const auto t0 = Clock::now();
        auto found = memo.find(x);
        if (found == memo.end()) {
            found = memo.emplace(x, tree_specific_reason(bt, x, th, opts.explain)).first;
        }
        ClassificationRule rule(found->second, classify(bt, x), th);
        DecisionTree next = rectify_by_rule(result.tree, rule, th);
        if (opts.simplify) next = simplify(next, th);
        result.tree = std::move(next);
        ++result.corrections;

        remaining = diff_count();  // the evaluation diff is recomputed per correction
        StepRecord record;
        record.step = result.corrections;
        record.instance = x;
        record.rule_premises = rule.premises();
        record.rule_conclusion = rule.conclusion();
        record.relative_accuracy =
            stream.empty() ? 1.0 : 1.0 - static_cast<double>(remaining) / static_cast<double>(stream.size());
        record.node_count = result.tree.node_count();
        record.depth = result.tree.depth();
        record.elapsed_ms = ms_between(t0, Clock::now());
        result.steps.push_back(std::move(record));
    }
    return result;
}

std::vector<Instance> misclassified(const DecisionTree& dt, const BoostedTree& bt,
                                    std::span<const Instance> dataset) {
    std::vector<Instance> out;
    for (const Instance& x : dataset) {
        if (classify(dt, x) != classify(bt, x)) out.push_back(x);
    }
    return out;
}

double relative_accuracy(const DecisionTree& dt, const BoostedTree& bt,
                         std::span<const Instance> dataset) {
    if (dataset.empty()) return 1.0;
    const auto wrong = misclassified(dt, bt, dataset).size();
    return 1.0 - static_cast<double>(wrong) / static_cast<double>(dataset.size());
}

}  // namespace rectree
