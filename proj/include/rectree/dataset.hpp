#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "rectree/feature_space.hpp"

namespace rectree {

// Rows of primitive attribute values plus a Boolean label, as read from CSV.
struct RawTable {
    std::vector<std::string> attributes;
    std::vector<std::vector<RawValue>> rows;  // one RawValue per attribute
    std::vector<bool> labels;

    std::size_t size() const { return rows.size(); }
    RawRow row(std::size_t i) const;
};

// CSV with a header row, one column per attribute, final column `label` in
// {0,1}. Plain comma separation, no quoting.
RawTable load_csv(const std::filesystem::path& path);
void save_csv(const std::filesystem::path& path, const RawTable& table);

// Candidate split conditions read off the data: thresholds at midpoints of
// consecutive distinct values for numeric columns, one equality condition
// per distinct value for text columns.
std::vector<Condition> propose_conditions(const RawTable& table);

struct Dataset {
    std::shared_ptr<const ConditionSet> conditions;
    std::vector<std::pair<Instance, bool>> rows;
    std::string provenance;

    std::vector<Instance> instances() const;
};

Dataset binarize_table(const RawTable& table, std::shared_ptr<const ConditionSet> cs,
                       std::string provenance = {});

}  // namespace rectree
