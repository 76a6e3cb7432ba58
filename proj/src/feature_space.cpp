#include "rectree/feature_space.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <deque>
#include <sstream>

namespace rectree {

std::string Condition::display() const {
    std::ostringstream out;
    switch (kind) {
        case ConditionKind::NumericGreater: {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%g", threshold);
            out << attribute << ">" << buf;
            break;
        }
        case ConditionKind::CategoricalEqual:
            out << attribute << "=" << category;
            break;
        case ConditionKind::BooleanFlag:
            out << attribute;
            break;
    }
    return out.str();
}

bool Condition::operator==(const Condition& other) const {
    if (kind != other.kind || attribute != other.attribute) return false;
    switch (kind) {
        case ConditionKind::NumericGreater:
            // exact bit comparison, so -0.0 != 0.0 never arises from dedup
            return std::bit_cast<std::uint64_t>(threshold) == std::bit_cast<std::uint64_t>(other.threshold);
        case ConditionKind::CategoricalEqual:
            return category == other.category;
        case ConditionKind::BooleanFlag:
            return true;
    }
    return false;
}

std::string condition_key(const Condition& c) {
    std::ostringstream key;
    key << c.attribute << '\x1f' << static_cast<int>(c.kind) << '\x1f';
    if (c.kind == ConditionKind::NumericGreater) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(c.threshold)));
        key << buf;
    } else if (c.kind == ConditionKind::CategoricalEqual) {
        key << c.category;
    }
    return key.str();
}

ConditionSet::ConditionSet(std::vector<Condition> conditions) : conditions_(std::move(conditions)) {
    for (int id = 0; id < size(); ++id) {
        const Condition& c = conditions_[static_cast<std::size_t>(id)];
        if (c.attribute.empty()) {
            throw DataError("condition " + std::to_string(id) + " has no attribute");
        }
        if (c.kind == ConditionKind::NumericGreater && !std::isfinite(c.threshold)) {
            throw DataError("condition " + std::to_string(id) + " has a non-finite threshold");
        }
        auto [it, inserted] = index_.emplace(condition_key(c), id);
        if (!inserted) {
            throw DataError("duplicate condition '" + c.display() + "'");
        }
    }
}

const Condition& ConditionSet::at(int id) const {
    if (id < 0 || id >= size()) {
        throw PreconditionError("condition id " + std::to_string(id) + " out of range");
    }
    return conditions_[static_cast<std::size_t>(id)];
}

std::optional<int> ConditionSet::find(const Condition& c) const {
    auto it = index_.find(condition_key(c));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Term Term::of_instance(const Instance& x) {
    Term t;
    t.literals_.reserve(static_cast<std::size_t>(x.size()));
    for (std::int32_t id = 0; id < x.size(); ++id) {
        t.literals_.push_back({id, x.bit(id)});
    }
    return t;
}

namespace {
auto lower_bound_by_id(const std::vector<Literal>& lits, std::int32_t id) {
    return std::lower_bound(lits.begin(), lits.end(), id,
                            [](const Literal& l, std::int32_t v) { return l.id < v; });
}
}  // namespace

bool Term::insert(Literal lit) {
    auto it = lower_bound_by_id(literals_, lit.id);
    if (it != literals_.end() && it->id == lit.id) {
        if (it->positive == lit.positive) return false;
        throw PreconditionError("term already contains condition " + std::to_string(lit.id) +
                                " with the opposite polarity");
    }
    literals_.insert(it, lit);
    return true;
}

bool Term::erase(std::int32_t id) {
    auto it = lower_bound_by_id(literals_, id);
    if (it == literals_.end() || it->id != id) return false;
    literals_.erase(it);
    return true;
}

bool Term::contains(Literal lit) const {
    auto it = lower_bound_by_id(literals_, lit.id);
    return it != literals_.end() && *it == lit;
}

std::optional<bool> Term::polarity_of(std::int32_t id) const {
    auto it = lower_bound_by_id(literals_, id);
    if (it == literals_.end() || it->id != id) return std::nullopt;
    return it->positive;
}

bool Term::subset_of(const Term& other) const {
    return std::includes(other.literals_.begin(), other.literals_.end(),
                         literals_.begin(), literals_.end());
}

bool Term::covers(const Instance& x) const {
    for (const Literal& lit : literals_) {
        if (lit.id >= x.size() || x.bit(lit.id) != lit.positive) return false;
    }
    return true;
}

std::optional<Term> Term::merged(const Term& a, const Term& b) {
    Term out = a;
    for (const Literal& lit : b) {
        auto pol = out.polarity_of(lit.id);
        if (pol.has_value()) {
            if (*pol != lit.positive) return std::nullopt;
        } else {
            out.insert(lit);
        }
    }
    return out;
}

std::string Term::to_string() const {
    std::ostringstream out;
    out << "{";
    bool first = true;
    for (const Literal& lit : literals_) {
        if (!first) out << ", ";
        first = false;
        if (!lit.positive) out << "!";
        out << "x" << lit.id;
    }
    out << "}";
    return out.str();
}

std::string Instance::to_string() const {
    std::ostringstream out;
    out << "(";
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (i > 0) out << ", ";
        out << (bits_[i] ? 1 : 0);
    }
    out << ")";
    return out.str();
}

std::size_t InstanceHash::operator()(const Instance& x) const {
    std::size_t h = 1469598103934665603ull;
    for (std::uint8_t b : x.bits()) {
        h ^= b;
        h *= 1099511628211ull;
    }
    return h;
}

DomainTheory::DomainTheory(int condition_count,
                           std::vector<std::pair<Literal, Literal>> implications,
                           std::vector<std::pair<std::int32_t, std::int32_t>> exclusions)
    : condition_count_(condition_count),
      implications_(std::move(implications)),
      exclusions_(std::move(exclusions)) {
    edges_.resize(static_cast<std::size_t>(condition_count_) * 2);
    auto add_edge = [this](Literal from, Literal to) {
        if (from.id < 0 || from.id >= condition_count_ || to.id < 0 || to.id >= condition_count_) {
            throw PreconditionError("theory literal references an unknown condition id");
        }
        edges_[static_cast<std::size_t>(from.code())].push_back(to);
    };
    for (const auto& [antecedent, consequent] : implications_) {
        add_edge(antecedent, consequent);
        add_edge(consequent.negated(), antecedent.negated());
    }
    for (const auto& [a, b] : exclusions_) {
        add_edge({a, true}, {b, false});
        add_edge({b, true}, {a, false});
    }
}

const std::vector<Literal>& DomainTheory::consequents(Literal lit) const {
    static const std::vector<Literal> kNone;
    const auto code = static_cast<std::size_t>(lit.code());
    if (code >= edges_.size()) return kNone;
    return edges_[code];
}

DomainTheory derive_theory(const ConditionSet& cs) {
    std::map<std::string, std::vector<int>> numeric_by_attr;
    std::map<std::string, std::vector<int>> categorical_by_attr;
    for (int id = 0; id < cs.size(); ++id) {
        const Condition& c = cs.at(id);
        if (c.kind == ConditionKind::NumericGreater) {
            numeric_by_attr[c.attribute].push_back(id);
        } else if (c.kind == ConditionKind::CategoricalEqual) {
            categorical_by_attr[c.attribute].push_back(id);
        }
    }

    std::vector<std::pair<Literal, Literal>> implications;
    for (auto& [attr, ids] : numeric_by_attr) {
        // (A > hi) implies (A > lo) for every hi > lo; stored closed.
        std::sort(ids.begin(), ids.end(), [&](int a, int b) {
            return cs.at(a).threshold > cs.at(b).threshold;
        });
        for (std::size_t i = 0; i < ids.size(); ++i) {
            for (std::size_t j = i + 1; j < ids.size(); ++j) {
                implications.push_back({Literal{ids[i], true}, Literal{ids[j], true}});
            }
        }
    }

    std::vector<std::pair<std::int32_t, std::int32_t>> exclusions;
    for (auto& [attr, ids] : categorical_by_attr) {
        for (std::size_t i = 0; i < ids.size(); ++i) {
            for (std::size_t j = i + 1; j < ids.size(); ++j) {
                exclusions.push_back({ids[i], ids[j]});
            }
        }
    }
    return DomainTheory(cs.size(), std::move(implications), std::move(exclusions));
}

bool propagate(const Term& t, const DomainTheory& th, std::vector<std::int8_t>& assignment) {
    assignment.assign(static_cast<std::size_t>(th.condition_count()), -1);
    std::deque<Literal> queue;
    auto assign = [&](Literal lit) -> bool {
        if (lit.id < 0 || lit.id >= th.condition_count()) {
            throw PreconditionError("literal references condition id " + std::to_string(lit.id) +
                                    " outside the theory");
        }
        std::int8_t& slot = assignment[static_cast<std::size_t>(lit.id)];
        const std::int8_t want = lit.positive ? 1 : 0;
        if (slot == want) return true;
        if (slot != -1) return false;
        slot = want;
        queue.push_back(lit);
        return true;
    };
    for (const Literal& lit : t) {
        if (!assign(lit)) return false;
    }
    while (!queue.empty()) {
        Literal lit = queue.front();
        queue.pop_front();
        for (const Literal& next : th.consequents(lit)) {
            if (!assign(next)) return false;
        }
    }
    return true;
}

bool th_consistent(const Term& t, const DomainTheory& th) {
    std::vector<std::int8_t> assignment;
    return propagate(t, th, assignment);
}

Term closure(const Term& t, const DomainTheory& th) {
    std::vector<std::int8_t> assignment;
    if (!propagate(t, th, assignment)) {
        throw PreconditionError("closure of a theory-inconsistent term " + t.to_string());
    }
    Term out;
    for (std::int32_t id = 0; id < th.condition_count(); ++id) {
        const std::int8_t v = assignment[static_cast<std::size_t>(id)];
        if (v != -1) out.insert({id, v == 1});
    }
    return out;
}

bool satisfies(const Instance& x, const DomainTheory& th) {
    if (x.size() != th.condition_count()) return false;
    return th_consistent(Term::of_instance(x), th);
}

Instance checked_instance(std::vector<std::uint8_t> bits, const DomainTheory& th) {
    Instance x(std::move(bits));
    if (!satisfies(x, th)) {
        throw DataError("instance " + x.to_string() + " violates the domain theory");
    }
    return x;
}

bool condition_holds(const Condition& c, const RawValue& v) {
    switch (c.kind) {
        case ConditionKind::NumericGreater:
            if (const double* d = std::get_if<double>(&v)) return *d > c.threshold;
            throw DataError("attribute '" + c.attribute + "' is not numeric");
        case ConditionKind::CategoricalEqual:
            if (const std::string* s = std::get_if<std::string>(&v)) return *s == c.category;
            // numeric categories serialize as their %g rendering
            if (const double* d = std::get_if<double>(&v)) {
                char buf[64];
                std::snprintf(buf, sizeof(buf), "%g", *d);
                return c.category == buf;
            }
            return false;
        case ConditionKind::BooleanFlag:
            if (const double* d = std::get_if<double>(&v)) return *d != 0.0;
            if (const std::string* s = std::get_if<std::string>(&v)) return *s == "1" || *s == "true";
            return false;
    }
    return false;
}

Instance binarize(const RawRow& row, const ConditionSet& cs) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(cs.size()), 0);
    for (int id = 0; id < cs.size(); ++id) {
        const Condition& c = cs.at(id);
        auto it = row.find(c.attribute);
        if (it == row.end()) {
            throw DataError("row is missing attribute '" + c.attribute + "'");
        }
        bits[static_cast<std::size_t>(id)] = condition_holds(c, it->second) ? 1 : 0;
    }
    return Instance(std::move(bits));
}

}  // namespace rectree
