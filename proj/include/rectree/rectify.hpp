#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rectree/explain.hpp"
#include "rectree/models.hpp"

namespace rectree {

// Rectifies a decision tree by a classification rule (path surgery): the
// result classifies every theory-feasible instance covered by the premises
// as the rule concludes, and every other one as the input tree did. For a
// rule over y this realizes (tree OR premises); over not-y, (tree AND NOT
// premises).
DecisionTree rectify_by_rule(const DecisionTree& dt, const ClassificationRule& r,
                             const DomainTheory& th);

// Theory-aware simplification, run to a fixpoint: drops decision nodes whose
// condition is already decided by the path so far plus the theory, prunes
// infeasible branches, and merges structurally identical children. Preserves
// semantics on every feasible instance and never grows the tree.
DecisionTree simplify(const DecisionTree& dt, const DomainTheory& th);

struct DistillOptions {
    ExplainOptions explain;
    bool simplify = true;
    std::optional<int> max_steps;  // >= 1 when present
    bool stop_on_empty_diff = true;
};

struct StepRecord {
    int step = 0;
    Instance instance;
    Term rule_premises;
    bool rule_conclusion = false;
    double relative_accuracy = 0.0;  // on the stream's instance set, after the step
    int node_count = 0;
    int depth = 0;
    double elapsed_ms = 0.0;
};

struct StepOutcome {
    DecisionTree tree;
    ClassificationRule rule;
};

// One correction step: deduce a rule from a tree-specific explanation of the
// booster's prediction on x, rectify, then simplify. Precondition: dt and bt
// disagree on x.
StepOutcome distill_step(const DecisionTree& dt, const BoostedTree& bt, const Instance& x,
                         const DomainTheory& th, const DistillOptions& opts = {});

struct DistillResult {
    DecisionTree tree;
    std::vector<StepRecord> steps;
    int corrections = 0;  // f
};

// Streaming driver: walks the stream in order, skips instances the current
// tree already classifies like the booster, corrects the rest. Stops at
// stream end, step budget, or when no stream instance disagrees anymore.
DistillResult distill_stream(const DecisionTree& start, const BoostedTree& bt,
                             std::span<const Instance> stream, const DomainTheory& th,
                             const DistillOptions& opts = {});

std::vector<Instance> misclassified(const DecisionTree& dt, const BoostedTree& bt,
                                    std::span<const Instance> dataset);
double relative_accuracy(const DecisionTree& dt, const BoostedTree& bt,
                         std::span<const Instance> dataset);

}  // namespace rectree
