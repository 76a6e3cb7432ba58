#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rectree/errors.hpp"

namespace rectree {

// A Boolean condition derived from a primitive attribute. Numeric splits are
// normalized to strict greater-than form; categorical splits to equality
// tests; plain Boolean attributes stand for themselves.
enum class ConditionKind : std::uint8_t {
    NumericGreater,
    CategoricalEqual,
    BooleanFlag,
};

struct Condition {
    ConditionKind kind = ConditionKind::BooleanFlag;
    std::string attribute;
    double threshold = 0.0;  // NumericGreater only
    std::string category;    // CategoricalEqual only

    std::string display() const;
    bool operator==(const Condition& other) const;
};

// Dense, immutable set of conditions; a condition's id is its index.
class ConditionSet {
public:
    ConditionSet() = default;
    explicit ConditionSet(std::vector<Condition> conditions);

    int size() const { return static_cast<int>(conditions_.size()); }
    bool empty() const { return conditions_.empty(); }
    const Condition& at(int id) const;
    std::optional<int> find(const Condition& c) const;

    auto begin() const { return conditions_.begin(); }
    auto end() const { return conditions_.end(); }

    bool operator==(const ConditionSet& other) const { return conditions_ == other.conditions_; }

private:
    std::vector<Condition> conditions_;
    std::map<std::string, int> index_;  // dedup key -> id
};

// Canonical dedup/sort key used for id assignment and lookups.
std::string condition_key(const Condition& c);

struct Literal {
    std::int32_t id = 0;
    bool positive = true;

    Literal negated() const { return {id, !positive}; }
    // encoding used by the theory propagation tables
    int code() const { return static_cast<int>(id) * 2 + (positive ? 1 : 0); }

    auto operator<=>(const Literal&) const = default;
};

class Instance;

// A partial conjunction of literals, kept sorted by condition id. At most one
// polarity per id.
class Term {
public:
    Term() = default;

    static Term of_instance(const Instance& x);

    // Adds a literal. Returns false if the identical literal is already
    // present; throws PreconditionError on an opposite-polarity clash.
    bool insert(Literal lit);
    bool erase(std::int32_t id);

    bool contains(Literal lit) const;
    std::optional<bool> polarity_of(std::int32_t id) const;
    bool subset_of(const Term& other) const;
    bool covers(const Instance& x) const;

    // Union of two terms, or nullopt if they clash on some id.
    static std::optional<Term> merged(const Term& a, const Term& b);

    int size() const { return static_cast<int>(literals_.size()); }
    bool empty() const { return literals_.empty(); }
    auto begin() const { return literals_.begin(); }
    auto end() const { return literals_.end(); }

    std::string to_string() const;
    bool operator==(const Term&) const = default;

private:
    std::vector<Literal> literals_;
};

// Total assignment over a condition set, one bit per condition id.
class Instance {
public:
    Instance() = default;
    explicit Instance(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {}

    int size() const { return static_cast<int>(bits_.size()); }
    bool bit(std::int32_t id) const { return bits_[static_cast<std::size_t>(id)] != 0; }
    const std::vector<std::uint8_t>& bits() const { return bits_; }

    std::string to_string() const;  // "(0, 1, 1, 1)"
    bool operator==(const Instance&) const = default;

private:
    std::vector<std::uint8_t> bits_;
};

struct InstanceHash {
    std::size_t operator()(const Instance& x) const;
};

// Constraints among conditions sharing a primitive attribute: threshold
// implications (stored transitively closed) and categorical mutual
// exclusions. Immutable once built.
class DomainTheory {
public:
    DomainTheory() = default;
    DomainTheory(int condition_count,
                 std::vector<std::pair<Literal, Literal>> implications,
                 std::vector<std::pair<std::int32_t, std::int32_t>> exclusions);

    int condition_count() const { return condition_count_; }
    const std::vector<std::pair<Literal, Literal>>& implications() const { return implications_; }
    const std::vector<std::pair<std::int32_t, std::int32_t>>& exclusions() const { return exclusions_; }
    bool empty() const { return implications_.empty() && exclusions_.empty(); }

    // literals directly forced true by `lit` (one propagation step)
    const std::vector<Literal>& consequents(Literal lit) const;

private:
    int condition_count_ = 0;
    std::vector<std::pair<Literal, Literal>> implications_;
    std::vector<std::pair<std::int32_t, std::int32_t>> exclusions_;
    std::vector<std::vector<Literal>> edges_;  // indexed by Literal::code()
};

DomainTheory derive_theory(const ConditionSet& cs);

// Unit-propagates t under th into `assignment` (-1 unset / 0 false / 1 true).
// Returns false on a polarity conflict. Complete for this theory class.
bool propagate(const Term& t, const DomainTheory& th, std::vector<std::int8_t>& assignment);

bool th_consistent(const Term& t, const DomainTheory& th);

// All literals entailed by t under th. Precondition: th_consistent(t, th).
Term closure(const Term& t, const DomainTheory& th);

bool satisfies(const Instance& x, const DomainTheory& th);

// Validating constructor for instances from untrusted sources.
Instance checked_instance(std::vector<std::uint8_t> bits, const DomainTheory& th);

// Raw (pre-binarization) attribute values.
using RawValue = std::variant<double, std::string>;
using RawRow = std::map<std::string, RawValue>;

bool condition_holds(const Condition& c, const RawValue& v);

// Evaluates every condition against the row. Missing attributes raise a
// DataError naming the attribute. The result satisfies derive_theory(cs) by
// construction.
Instance binarize(const RawRow& row, const ConditionSet& cs);

}  // namespace rectree
