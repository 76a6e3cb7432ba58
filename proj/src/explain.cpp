#include "rectree/explain.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace rectree {

namespace {

struct LeafRange {
    double lo;
    double hi;
};

LeafRange reachable_range(const RegressionTree& tree, std::int32_t id,
                          const std::vector<std::int8_t>& fixed) {
    const auto& n = tree.node(id);
    if (n.is_leaf()) return {n.leaf, n.leaf};
    const std::int8_t v = fixed[static_cast<std::size_t>(n.cond)];
    if (v == 1) return reachable_range(tree, n.right, fixed);
    if (v == 0) return reachable_range(tree, n.left, fixed);
    const LeafRange l = reachable_range(tree, n.left, fixed);
    const LeafRange r = reachable_range(tree, n.right, fixed);
    return {std::min(l.lo, r.lo), std::max(l.hi, r.hi)};
}

}  // namespace

MarginBounds margin_bounds(const BoostedTree& bt, const Term& t, const DomainTheory& th) {
    std::vector<std::int8_t> fixed;
    if (!propagate(t, th, fixed)) {
        throw PreconditionError("margin bounds of a theory-inconsistent term " + t.to_string());
    }
    MarginBounds bounds;
    for (const RegressionTree& tree : bt.trees()) {
        const LeafRange r = reachable_range(tree, tree.root(), fixed);
        bounds.lo += r.lo;
        bounds.hi += r.hi;
    }
    return bounds;
}

std::vector<std::int32_t> deletion_order_ids(int n, const ExplainOptions& opts) {
    std::vector<std::int32_t> ids(static_cast<std::size_t>(n));
    std::iota(ids.begin(), ids.end(), 0);
    switch (opts.order) {
        case DeletionOrder::AscendingId:
            break;
        case DeletionOrder::DescendingId:
            std::reverse(ids.begin(), ids.end());
            break;
        case DeletionOrder::SeededShuffle: {
            std::mt19937_64 rng(opts.seed);
            std::shuffle(ids.begin(), ids.end(), rng);
            break;
        }
    }
    return ids;
}

Term tree_specific_reason(const BoostedTree& bt, const Instance& x, const DomainTheory& th,
                          const ExplainOptions& opts) {
    const bool cls = classify(bt, x);
    Term t = Term::of_instance(x);
    for (std::int32_t id : deletion_order_ids(x.size(), opts)) {
        const bool was_positive = x.bit(id);
        t.erase(id);
        if (!margin_bounds(bt, t, th).certifies(cls)) {
            t.insert({id, was_positive});
        }
    }
    return t;
}

namespace {

// Closed path terms of every leaf disagreeing with cls. A candidate term is
// abductive iff it clashes with each of them: for this theory class, two
// closed consistent terms with no literal clash always admit a common
// feasible completion.
struct OpposingPaths {
    std::vector<Term> closed_terms;
};

OpposingPaths opposing_paths(const DecisionTree& dt, bool cls, const DomainTheory& th) {
    OpposingPaths out;
    for (const auto& p : paths(dt, th)) {
        if (p.leaf == cls || !p.feasible) continue;
        out.closed_terms.push_back(closure(p.term, th));
    }
    return out;
}

bool clashes_everywhere(const OpposingPaths& opposing, const std::vector<std::int8_t>& candidate) {
    for (const Term& path : opposing.closed_terms) {
        bool clash = false;
        for (const Literal& lit : path) {
            const std::int8_t v = candidate[static_cast<std::size_t>(lit.id)];
            if (v != -1 && (v == 1) != lit.positive) {
                clash = true;
                break;
            }
        }
        if (!clash) return false;
    }
    return true;
}

}  // namespace

Term sufficient_reason(const DecisionTree& dt, const Instance& x, const DomainTheory& th,
                       const ExplainOptions& opts) {
    const bool cls = classify(dt, x);
    const OpposingPaths opposing = opposing_paths(dt, cls, th);

    Term t = Term::of_instance(x);
    std::vector<std::int8_t> closed;
    for (std::int32_t id : deletion_order_ids(x.size(), opts)) {
        const bool was_positive = x.bit(id);
        t.erase(id);
        propagate(t, th, closed);  // subsets of a feasible total term stay consistent
        if (!clashes_everywhere(opposing, closed)) {
            t.insert({id, was_positive});
        }
    }
    return t;
}

namespace {

// Incremental assignment with an undo trail, for backtracking enumeration.
class TheoryState {
public:
    explicit TheoryState(const DomainTheory& th)
        : th_(th), state_(static_cast<std::size_t>(th.condition_count()), -1) {}

    std::size_t mark() const { return trail_.size(); }

    // Propagates lit and its consequences; false (with rollback) on conflict.
    bool push(Literal lit) {
        const std::size_t at = trail_.size();
        if (!assign(lit)) {
            pop_to(at);
            return false;
        }
        std::size_t cursor = at;
        while (cursor < trail_.size()) {
            const Literal current = trail_[cursor++];
            for (const Literal& next : th_.consequents(current)) {
                if (!assign(next)) {
                    pop_to(at);
                    return false;
                }
            }
        }
        return true;
    }

    void pop_to(std::size_t at) {
        while (trail_.size() > at) {
            state_[static_cast<std::size_t>(trail_.back().id)] = -1;
            trail_.pop_back();
        }
    }

    std::int8_t value(std::int32_t id) const { return state_[static_cast<std::size_t>(id)]; }

private:
    bool assign(Literal lit) {
        std::int8_t& slot = state_[static_cast<std::size_t>(lit.id)];
        const std::int8_t want = lit.positive ? 1 : 0;
        if (slot == want) return true;
        if (slot != -1) return false;
        slot = want;
        trail_.push_back(lit);
        return true;
    }

    const DomainTheory& th_;
    std::vector<std::int8_t> state_;
    std::vector<Literal> trail_;
};

// True iff every feasible completion of t is classified cls; enumerates the
// free conditions with theory pruning and bails out on deadline.
bool abductive_by_enumeration(const BoostedTree& bt, const Term& t, bool cls,
                              const DomainTheory& th,
                              std::chrono::steady_clock::time_point deadline, bool& timed_out) {
    const int n = th.condition_count();
    TheoryState state(th);
    for (const Literal& lit : t) {
        if (!state.push(lit)) return true;  // inconsistent term covers nothing
    }
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n), 0);
    long checked = 0;

    auto walk = [&](auto&& self, std::int32_t id) -> bool {
        if (((++checked) & 0x3ff) == 0 && std::chrono::steady_clock::now() >= deadline) {
            timed_out = true;
            return false;
        }
        if (id == n) {
            return classify(bt, Instance(bits)) == cls;
        }
        const std::int8_t forced = state.value(id);
        for (int value = 0; value <= 1; ++value) {
            if (forced != -1 && forced != value) continue;
            const std::size_t at = state.mark();
            if (!state.push({id, value == 1})) continue;
            bits[static_cast<std::size_t>(id)] = static_cast<std::uint8_t>(value);
            const bool ok = self(self, id + 1);
            state.pop_to(at);
            if (!ok) return false;
        }
        return true;
    };
    return walk(walk, 0);
}

}  // namespace

std::optional<Term> exact_sufficient_reason(const BoostedTree& bt, const Instance& x,
                                            const DomainTheory& th,
                                            std::chrono::steady_clock::duration budget,
                                            const ExplainOptions& opts) {
    const auto deadline = std::chrono::steady_clock::now() + budget;
    const bool cls = classify(bt, x);
    Term t = Term::of_instance(x);
    bool timed_out = false;
    for (std::int32_t id : deletion_order_ids(x.size(), opts)) {
        const bool was_positive = x.bit(id);
        t.erase(id);
        if (!abductive_by_enumeration(bt, t, cls, th, deadline, timed_out)) {
            if (timed_out) return std::nullopt;
            t.insert({id, was_positive});
        }
    }
    return t;
}

ClassificationRule explanation_to_rule(const Term& t, bool cls, const DomainTheory& th) {
    return ClassificationRule(t, cls, th);
}

}  // namespace rectree
