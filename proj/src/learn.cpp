#include "rectree/learn.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

namespace rectree {

namespace {

struct CartGrower {
    const Dataset& data;
    const CartOptions& opts;
    DecisionTree::Builder builder;

    bool label(std::size_t i) const { return data.rows[i].second; }
    bool bit(std::size_t i, std::int32_t cond) const { return data.rows[i].first.bit(cond); }

    std::int32_t majority_leaf(const std::vector<std::size_t>& members) {
        std::size_t positives = 0;
        for (std::size_t i : members) positives += label(i) ? 1 : 0;
        // ties go to class 0
        return builder.add_leaf(positives * 2 > members.size());
    }

    // weighted Gini impurity of splitting members on cond, or nullopt when
    // the split leaves one side empty
    std::optional<double> split_impurity(const std::vector<std::size_t>& members,
                                         std::int32_t cond) const {
        std::size_t n_true = 0, pos_true = 0, pos_false = 0;
        for (std::size_t i : members) {
            if (bit(i, cond)) {
                ++n_true;
                pos_true += label(i) ? 1 : 0;
            } else {
                pos_false += label(i) ? 1 : 0;
            }
        }
        const std::size_t n_false = members.size() - n_true;
        if (n_true == 0 || n_false == 0) return std::nullopt;
        auto gini = [](std::size_t pos, std::size_t n) {
            const double p = static_cast<double>(pos) / static_cast<double>(n);
            return 2.0 * p * (1.0 - p);
        };
        const double total = static_cast<double>(members.size());
        return (static_cast<double>(n_false) / total) * gini(pos_false, n_false) +
               (static_cast<double>(n_true) / total) * gini(pos_true, n_true);
    }

    std::int32_t grow(const std::vector<std::size_t>& members, int depth) {
        bool pure = true;
        for (std::size_t i : members) {
            if (label(i) != label(members.front())) {
                pure = false;
                break;
            }
        }
        if (pure) return builder.add_leaf(label(members.front()));
        if (opts.max_depth.has_value() && depth >= *opts.max_depth) return majority_leaf(members);

        std::optional<std::int32_t> best_cond;
        double best_impurity = 0.0;
        for (std::int32_t cond = 0; cond < data.conditions->size(); ++cond) {
            const auto impurity = split_impurity(members, cond);
            if (!impurity.has_value()) continue;
            if (!best_cond.has_value() || *impurity < best_impurity) {
                best_cond = cond;  // strict comparison keeps the lowest id on ties
                best_impurity = *impurity;
            }
        }
        if (!best_cond.has_value()) return majority_leaf(members);  // exhausted

        std::vector<std::size_t> on_false, on_true;
        for (std::size_t i : members) {
            (bit(i, *best_cond) ? on_true : on_false).push_back(i);
        }
        const std::int32_t left = grow(on_false, depth + 1);
        const std::int32_t right = grow(on_true, depth + 1);
        return builder.add_split(*best_cond, left, right);
    }
};

}  // namespace

DecisionTree cart_learn(const Dataset& train, const CartOptions& opts) {
    if (train.rows.empty()) {
        throw PreconditionError("cannot learn a decision tree from an empty dataset");
    }
    CartGrower grower{train, opts, {}};
    std::vector<std::size_t> all(train.rows.size());
    std::iota(all.begin(), all.end(), 0);
    const std::int32_t root = grower.grow(all, 0);
    return grower.builder.finish(root, train.conditions);
}

namespace {

struct GbtGrower {
    const Dataset& data;
    const std::vector<double>& residuals;  // negative gradients
    const std::vector<double>& hessians;
    double learning_rate;
    int max_depth;
    RegressionTree::Builder builder;

    std::int32_t leaf_for(const std::vector<std::size_t>& members) {
        double grad_sum = 0.0, hess_sum = 0.0;
        for (std::size_t i : members) {
            grad_sum += residuals[i];
            hess_sum += hessians[i];
        }
        const double value = hess_sum > 1e-12 ? grad_sum / hess_sum : 0.0;
        return builder.add_leaf(learning_rate * value);
    }

    // variance of residuals times member count, so the split score is the
    // plain within-node sum of squared deviations
    static double sse(const std::vector<double>& residuals, const std::vector<std::size_t>& members) {
        if (members.empty()) return 0.0;
        double mean = 0.0;
        for (std::size_t i : members) mean += residuals[i];
        mean /= static_cast<double>(members.size());
        double out = 0.0;
        for (std::size_t i : members) {
            const double d = residuals[i] - mean;
            out += d * d;
        }
        return out;
    }

    std::int32_t grow(const std::vector<std::size_t>& members, int depth) {
        if (depth >= max_depth || members.size() < 2) return leaf_for(members);

        std::optional<std::int32_t> best_cond;
        double best_score = 0.0;
        std::vector<std::size_t> on_false, on_true;
        for (std::int32_t cond = 0; cond < data.conditions->size(); ++cond) {
            on_false.clear();
            on_true.clear();
            for (std::size_t i : members) {
                (data.rows[i].first.bit(cond) ? on_true : on_false).push_back(i);
            }
            if (on_false.empty() || on_true.empty()) continue;
            const double score = sse(residuals, on_false) + sse(residuals, on_true);
            if (!best_cond.has_value() || score < best_score) {
                best_cond = cond;
                best_score = score;
            }
        }
        if (!best_cond.has_value()) return leaf_for(members);

        on_false.clear();
        on_true.clear();
        for (std::size_t i : members) {
            (data.rows[i].first.bit(*best_cond) ? on_true : on_false).push_back(i);
        }
        const std::int32_t left = grow(on_false, depth + 1);
        const std::int32_t right = grow(on_true, depth + 1);
        return builder.add_split(*best_cond, left, right);
    }
};

}  // namespace

BoostedTree gbt_learn(const Dataset& train, const GbtOptions& opts) {
    if (train.rows.empty()) {
        throw PreconditionError("cannot learn a boosted tree from an empty dataset");
    }
    const std::size_t n = train.rows.size();
    std::vector<double> margin(n, 0.0);
    std::vector<double> residuals(n), hessians(n);
    std::vector<RegressionTree> trees;
    trees.reserve(static_cast<std::size_t>(std::max(opts.rounds, 0)));

    for (int round = 0; round < opts.rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = 1.0 / (1.0 + std::exp(-margin[i]));
            residuals[i] = (train.rows[i].second ? 1.0 : 0.0) - p;
            hessians[i] = std::max(p * (1.0 - p), 1e-12);
        }
        GbtGrower grower{train, residuals, hessians, opts.learning_rate, opts.depth, {}};
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), 0);
        const std::int32_t root = grower.grow(all, 0);
        RegressionTree tree = grower.builder.finish(root, train.conditions);
        for (std::size_t i = 0; i < n; ++i) {
            margin[i] += tree.evaluate(train.rows[i].first);
        }
        trees.push_back(std::move(tree));
    }
    return BoostedTree(std::move(trees), train.conditions);
}

int sample_target_size(double ratio, int bound, int free_conditions, SampleSizeRule rule) {
    if (ratio <= 0.0 || ratio > 1.0) {
        throw PreconditionError("sample ratio must lie in (0, 1]");
    }
    if (bound < 1) {
        throw PreconditionError("sample bound must be at least 1");
    }
    const long double raw = std::ceil(static_cast<long double>(ratio) *
                                      std::exp2(static_cast<long double>(free_conditions)));
    const long double want = rule == SampleSizeRule::CapAtBound
                                 ? std::min<long double>(raw, bound)
                                 : std::max<long double>(raw, bound);
    return static_cast<int>(std::max<long double>(1.0L, want));
}

RetrainOutcome retrain_correct(const Dataset& train, const DecisionTree& dt, const BoostedTree& bt,
                               const Instance& x, const ClassificationRule& rule,
                               const RetrainOptions& opts, const DomainTheory& th) {
    if (classify(dt, x) == classify(bt, x)) {
        throw PreconditionError("retraining step on instance " + x.to_string() +
                                " which the tree already classifies correctly");
    }
    const Term& premises = rule.premises();
    const int n = th.condition_count();
    const int free = n - premises.size();
    const int target = sample_target_size(opts.ratio, opts.bound, free, opts.size_rule);

    // sample feasible instances covered by the premises, x first, the rest
    // by assigning uniform bits to the free conditions and rejecting
    // theory-violating draws
    std::unordered_set<Instance, InstanceHash> sample;
    sample.insert(x);
    std::mt19937_64 rng(opts.seed);
    std::bernoulli_distribution coin(0.5);
    const long attempts = 64L * target + 256;
    for (long k = 0; k < attempts && static_cast<int>(sample.size()) < target; ++k) {
        std::vector<std::uint8_t> bits(static_cast<std::size_t>(n), 0);
        for (std::int32_t id = 0; id < n; ++id) {
            const auto pol = premises.polarity_of(id);
            const bool value = pol.has_value() ? *pol : coin(rng);
            bits[static_cast<std::size_t>(id)] = value ? 1 : 0;
        }
        Instance candidate(std::move(bits));
        if (satisfies(candidate, th)) sample.insert(std::move(candidate));
    }

    Dataset updated;
    updated.conditions = train.conditions;
    updated.provenance = train.provenance;
    for (const auto& [instance, label] : train.rows) {
        // drop rows whose own classification rule conflicts with the new one
        if (premises.covers(instance) && label != rule.conclusion()) continue;
        updated.rows.emplace_back(instance, label);
    }
    // deterministic insertion order for the sampled block
    std::vector<Instance> fresh(sample.begin(), sample.end());
    std::sort(fresh.begin(), fresh.end(),
              [](const Instance& a, const Instance& b) { return a.bits() < b.bits(); });
    for (Instance& instance : fresh) {
        updated.rows.emplace_back(std::move(instance), rule.conclusion());
    }

    CartOptions cart{opts.max_depth};
    DecisionTree relearned = cart_learn(updated, cart);
    return {std::move(updated), std::move(relearned)};
}

}  // namespace rectree
