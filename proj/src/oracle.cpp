#include "rectree/oracle.hpp"

#include <algorithm>
#include <string>

namespace rectree {

FeasibleSpace enumerate_instances(int condition_count, const DomainTheory& th, int limit) {
    if (condition_count > limit) {
        throw CapacityError("enumeration over " + std::to_string(condition_count) +
                            " conditions exceeds the limit of " + std::to_string(limit));
    }
    if (condition_count != th.condition_count()) {
        throw PreconditionError("theory covers " + std::to_string(th.condition_count()) +
                                " conditions, not " + std::to_string(condition_count));
    }
    FeasibleSpace space;
    space.condition_count = condition_count;

    // DFS in id order, false branch first, pruning assignments the theory
    // already contradicts; yields binary counting order over the survivors.
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(condition_count), 0);
    Term partial;
    auto walk = [&](auto&& self, std::int32_t id) -> void {
        if (id == condition_count) {
            space.instances.emplace_back(bits);
            return;
        }
        for (int value = 0; value <= 1; ++value) {
            Literal lit{id, value == 1};
            partial.insert(lit);
            if (th_consistent(partial, th)) {
                bits[static_cast<std::size_t>(id)] = static_cast<std::uint8_t>(value);
                self(self, id + 1);
            }
            partial.erase(id);
        }
    };
    walk(walk, 0);
    return space;
}

Classifier as_classifier(const DecisionTree& dt) {
    return [dt](const Instance& x) { return classify(dt, x); };
}

Classifier as_classifier(const BoostedTree& bt) {
    return [bt](const Instance& x) { return classify(bt, x); };
}

std::vector<Instance> exact_diff(const Classifier& a, const Classifier& b,
                                 const FeasibleSpace& space) {
    std::vector<Instance> out;
    for (const Instance& x : space.instances) {
        if (a(x) != b(x)) out.push_back(x);
    }
    return out;
}

bool semantically_equal(const Classifier& a, const Classifier& b, const FeasibleSpace& space) {
    for (const Instance& x : space.instances) {
        if (a(x) != b(x)) return false;
    }
    return true;
}

bool is_abductive_exact(const Classifier& c, const Term& t, bool cls, const FeasibleSpace& space) {
    for (const Instance& x : space.instances) {
        if (t.covers(x) && c(x) != cls) return false;
    }
    return true;
}

std::vector<Term> min_explanations_exact(const Classifier& c, const Instance& x,
                                         const DomainTheory& th, int limit) {
    const int n = x.size();
    if (n > limit) {
        throw CapacityError("minimal-explanation search over " + std::to_string(n) +
                            " conditions exceeds the limit of " + std::to_string(limit));
    }
    FeasibleSpace space = enumerate_instances(n, th, limit);
    const bool cls = c(x);

    // Pack the feasible space once; a subset mask of t_x covers x' iff x'
    // agrees with x on the masked positions.
    std::vector<std::uint32_t> packed(space.instances.size());
    std::vector<std::uint8_t> labels(space.instances.size());
    std::uint32_t x_bits = 0;
    for (int id = 0; id < n; ++id) {
        if (x.bit(id)) x_bits |= (1u << id);
    }
    for (std::size_t i = 0; i < space.instances.size(); ++i) {
        std::uint32_t v = 0;
        for (int id = 0; id < n; ++id) {
            if (space.instances[i].bit(id)) v |= (1u << id);
        }
        packed[i] = v;
        labels[i] = c(space.instances[i]) ? 1 : 0;
    }
    auto abductive = [&](std::uint32_t mask) {
        for (std::size_t i = 0; i < packed.size(); ++i) {
            if (((packed[i] ^ x_bits) & mask) == 0 && (labels[i] == 1) != cls) return false;
        }
        return true;
    };

    // Masks in increasing cardinality; supersets of found minimal masks are
    // skipped outright (abductiveness is monotone).
    std::vector<std::uint32_t> masks;
    masks.reserve(1u << n);
    for (std::uint32_t m = 0; m < (1u << n); ++m) masks.push_back(m);
    std::sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) {
        const int pa = std::popcount(a), pb = std::popcount(b);
        return pa != pb ? pa < pb : a < b;
    });

    std::vector<std::uint32_t> minimal_masks;
    for (std::uint32_t m : masks) {
        bool dominated = false;
        for (std::uint32_t w : minimal_masks) {
            if ((w & m) == w) {
                dominated = true;
                break;
            }
        }
        if (!dominated && abductive(m)) minimal_masks.push_back(m);
    }

    std::vector<Term> out;
    out.reserve(minimal_masks.size());
    for (std::uint32_t m : minimal_masks) {
        Term t;
        for (int id = 0; id < n; ++id) {
            if (m & (1u << id)) t.insert({id, x.bit(id)});
        }
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace rectree
