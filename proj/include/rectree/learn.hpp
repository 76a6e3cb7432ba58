#pragma once

#include <cstdint>
#include <optional>

#include "rectree/dataset.hpp"
#include "rectree/models.hpp"

namespace rectree {

struct CartOptions {
    // absent = default configuration: split until purity or exhaustion
    std::optional<int> max_depth;
};

// Greedy Gini-impurity CART over the binarized feature space. Impurity ties
// break on the lowest condition id; exhausted or capped nodes become
// majority leaves with ties going to class 0. Deterministic.
DecisionTree cart_learn(const Dataset& train, const CartOptions& opts = {});

struct GbtOptions {
    int depth = 3;
    int rounds = 20;
    double learning_rate = 0.3;
};

// Minimal gradient boosting with logistic loss: zero initial margin, one
// variance-reduction regression tree per round on the negative gradients,
// Newton-step leaf values scaled by the learning rate. Deterministic.
BoostedTree gbt_learn(const Dataset& train, const GbtOptions& opts = {});

enum class SampleSizeRule : std::uint8_t {
    CapAtBound,  // clamp(ceil(ratio * 2^(n-|t|)), 1, bound)
    LiteralMax,  // max(ceil(ratio * 2^(n-|t|)), bound), for comparison runs
};

struct RetrainOptions {
    double ratio = 0.01;
    int bound = 100;
    std::uint64_t seed = 0;
    SampleSizeRule size_rule = SampleSizeRule::CapAtBound;
    std::optional<int> max_depth;  // depth policy for the relearned tree
};

struct RetrainOutcome {
    Dataset train;
    DecisionTree tree;
};

// Retraining-based correction step: samples feasible instances covered by
// the rule premises (always including x), labels them with the rule's
// conclusion, drops training rows that conflict with the rule, and relearns.
RetrainOutcome retrain_correct(const Dataset& train, const DecisionTree& dt, const BoostedTree& bt,
                               const Instance& x, const ClassificationRule& rule,
                               const RetrainOptions& opts, const DomainTheory& th);

int sample_target_size(double ratio, int bound, int free_conditions, SampleSizeRule rule);

}  // namespace rectree
