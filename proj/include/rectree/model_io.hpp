#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <variant>

#include <json.hpp>

#include "rectree/models.hpp"

namespace rectree {

// Wire schema:
//   model.json      {"kind": "decision-tree"|"boosted-tree",
//                    "conditions": [{"id","attribute","kind","threshold"?,"value"?}, ...],
//                    "trees": [{"root": idx,
//                               "nodes": [{"leaf": bool|number} |
//                                         {"cond": id, "left": idx, "right": idx}, ...]}, ...]}
//   conditions.json the bare conditions array; the theory is re-derived on
//                   load, never stored.

nlohmann::json conditions_to_json(const ConditionSet& cs);
ConditionSet conditions_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const DecisionTree& dt);
nlohmann::json to_json(const BoostedTree& bt);
DecisionTree dt_from_json(const nlohmann::json& doc);
BoostedTree bt_from_json(const nlohmann::json& doc);

using AnyModel = std::variant<DecisionTree, BoostedTree>;
AnyModel model_from_json(const nlohmann::json& doc);
AnyModel load_model_file(const std::filesystem::path& path);
DecisionTree load_decision_tree_file(const std::filesystem::path& path);
BoostedTree load_boosted_tree_file(const std::filesystem::path& path);

// Writes to a temporary sibling and renames, so failures never leave a
// partial file behind.
void atomic_write_file(const std::filesystem::path& path, const std::string& contents);
void save_json_file(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace rectree
