#pragma once

#include <chrono>
#include <cstdint>
#include <optional>

#include "rectree/models.hpp"

namespace rectree {

// Order in which the deletion-based minimizers try to drop literals. The
// result depends on it, so it is part of the contract.
enum class DeletionOrder : std::uint8_t {
    DescendingId,
    AscendingId,
    SeededShuffle,
};

struct ExplainOptions {
    DeletionOrder order = DeletionOrder::DescendingId;
    std::uint64_t seed = 0;  // SeededShuffle only
};

// Sound per-tree relaxation of the achievable margin of a boosted tree over
// all theory-feasible completions of a term. Conditioning on more literals
// never widens the interval.
struct MarginBounds {
    double lo = 0.0;
    double hi = 0.0;

    bool certifies(bool cls) const { return cls ? lo > 0.0 : hi <= 0.0; }
};

MarginBounds margin_bounds(const BoostedTree& bt, const Term& t, const DomainTheory& th);

// Greedy-deletion abductive explanation based on margin bounds. Polynomial;
// guaranteed abductive but not guaranteed subset-minimal.
Term tree_specific_reason(const BoostedTree& bt, const Instance& x, const DomainTheory& th,
                          const ExplainOptions& opts = {});

// Deletion-based subset-minimal abductive explanation (sufficient reason)
// for a decision tree; the keep/drop test is exact.
Term sufficient_reason(const DecisionTree& dt, const Instance& x, const DomainTheory& th,
                       const ExplainOptions& opts = {});

// Deletion-based sufficient reason for a boosted tree where each drop test
// enumerates the feasible completions of the candidate. Exponential, so a
// wall-clock budget is mandatory; nullopt means the budget ran out.
std::optional<Term> exact_sufficient_reason(const BoostedTree& bt, const Instance& x,
                                            const DomainTheory& th,
                                            std::chrono::steady_clock::duration budget,
                                            const ExplainOptions& opts = {});

ClassificationRule explanation_to_rule(const Term& t, bool cls, const DomainTheory& th);

// id visit order for a deletion pass over n conditions
std::vector<std::int32_t> deletion_order_ids(int n, const ExplainOptions& opts);

}  // namespace rectree
