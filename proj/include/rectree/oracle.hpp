#pragma once

#include <functional>
#include <vector>

#include "rectree/models.hpp"

namespace rectree {

inline constexpr int kEnumerationLimit = 20;
inline constexpr int kMinExplanationLimit = 12;

// Every theory-feasible instance over n conditions, in binary counting order
// (condition 0 is the most significant bit).
struct FeasibleSpace {
    int condition_count = 0;
    std::vector<Instance> instances;
};

FeasibleSpace enumerate_instances(int condition_count, const DomainTheory& th,
                                  int limit = kEnumerationLimit);

using Classifier = std::function<bool(const Instance&)>;

Classifier as_classifier(const DecisionTree& dt);
Classifier as_classifier(const BoostedTree& bt);

std::vector<Instance> exact_diff(const Classifier& a, const Classifier& b,
                                 const FeasibleSpace& space);
bool semantically_equal(const Classifier& a, const Classifier& b, const FeasibleSpace& space);

// Def.-style abductiveness: every feasible instance covered by t gets cls.
bool is_abductive_exact(const Classifier& c, const Term& t, bool cls, const FeasibleSpace& space);

// All subset-minimal abductive explanations for x given c, by monotone
// subset search over t_x. Doubly exponential in the worst case, hence the
// tighter limit.
std::vector<Term> min_explanations_exact(const Classifier& c, const Instance& x,
                                         const DomainTheory& th, int limit = kMinExplanationLimit);

}  // namespace rectree
