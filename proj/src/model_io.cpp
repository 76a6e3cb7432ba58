#include "rectree/model_io.hpp"

#include <fstream>
#include <utility>

namespace rectree {

namespace {

using nlohmann::json;

std::string kind_name(ConditionKind kind) {
    switch (kind) {
        case ConditionKind::NumericGreater: return "numeric-greater";
        case ConditionKind::CategoricalEqual: return "categorical-equal";
        case ConditionKind::BooleanFlag: return "boolean";
    }
    return "boolean";
}

ConditionKind kind_from_name(const std::string& name, const std::string& where) {
    if (name == "numeric-greater") return ConditionKind::NumericGreater;
    if (name == "categorical-equal") return ConditionKind::CategoricalEqual;
    if (name == "boolean") return ConditionKind::BooleanFlag;
    throw DataError(where + ": unknown condition kind '" + name + "'");
}

const json& require(const json& doc, const char* field, const std::string& where) {
    auto it = doc.find(field);
    if (it == doc.end()) {
        throw DataError(where + ": missing field '" + field + "'");
    }
    return *it;
}

template <typename LeafT>
json tree_to_json(const Tree<LeafT>& tree) {
    json nodes = json::array();
    for (std::int32_t id = 0; id < tree.node_count(); ++id) {
        const auto& n = tree.node(id);
        if (n.is_leaf()) {
            nodes.push_back({{"leaf", n.leaf}});
        } else {
            nodes.push_back({{"cond", n.cond}, {"left", n.left}, {"right", n.right}});
        }
    }
    return {{"root", tree.root()}, {"nodes", std::move(nodes)}};
}

template <typename LeafT>
Tree<LeafT> tree_from_json(const json& doc, const std::string& where, int n_conditions,
                           std::shared_ptr<const ConditionSet> cs) {
    const json& nodes = require(doc, "nodes", where);
    if (!nodes.is_array() || nodes.empty()) {
        throw DataError(where + ".nodes: expected a non-empty array");
    }
    typename Tree<LeafT>::Builder builder;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const json& n = nodes[i];
        const std::string node_where = where + ".nodes[" + std::to_string(i) + "]";
        if (n.contains("leaf")) {
            const json& leaf = n["leaf"];
            if constexpr (std::is_same_v<LeafT, bool>) {
                if (!leaf.is_boolean()) {
                    throw DataError(node_where + ".leaf: decision tree leaves must be booleans");
                }
            } else {
                if (!leaf.is_number()) {
                    throw DataError(node_where + ".leaf: regression tree leaves must be numbers");
                }
            }
            builder.add_leaf(leaf.get<LeafT>());
        } else if (n.contains("cond")) {
            const std::int32_t cond = require(n, "cond", node_where).get<std::int32_t>();
            if (cond < 0 || cond >= n_conditions) {
                throw DataError(node_where + ".cond: condition id " + std::to_string(cond) +
                                " out of range");
            }
            builder.add_split(cond, require(n, "left", node_where).get<std::int32_t>(),
                              require(n, "right", node_where).get<std::int32_t>());
        } else {
            throw DataError(node_where + ": node needs either 'leaf' or 'cond'");
        }
    }
    const std::int32_t root = require(doc, "root", where).get<std::int32_t>();
    try {
        return builder.finish(root, std::move(cs));
    } catch (const DataError& e) {
        throw DataError(where + ": " + e.what());
    }
}

}  // namespace

json conditions_to_json(const ConditionSet& cs) {
    json out = json::array();
    for (int id = 0; id < cs.size(); ++id) {
        const Condition& c = cs.at(id);
        json entry{{"id", id}, {"attribute", c.attribute}, {"kind", kind_name(c.kind)}};
        if (c.kind == ConditionKind::NumericGreater) entry["threshold"] = c.threshold;
        if (c.kind == ConditionKind::CategoricalEqual) entry["value"] = c.category;
        out.push_back(std::move(entry));
    }
    return out;
}

ConditionSet conditions_from_json(const json& doc) {
    if (!doc.is_array()) {
        throw DataError("conditions: expected an array");
    }
    std::vector<Condition> conditions(doc.size());
    std::vector<std::uint8_t> filled(doc.size(), 0);
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const json& entry = doc[i];
        const std::string where = "conditions[" + std::to_string(i) + "]";
        const auto id = require(entry, "id", where).get<std::int64_t>();
        if (id < 0 || id >= static_cast<std::int64_t>(doc.size())) {
            throw DataError(where + ".id: ids must be dense in [0, " + std::to_string(doc.size()) + ")");
        }
        if (filled[static_cast<std::size_t>(id)]++) {
            throw DataError(where + ".id: duplicate id " + std::to_string(id));
        }
        Condition c;
        c.attribute = require(entry, "attribute", where).get<std::string>();
        c.kind = kind_from_name(require(entry, "kind", where).get<std::string>(), where);
        if (c.kind == ConditionKind::NumericGreater) {
            c.threshold = require(entry, "threshold", where).get<double>();
        } else if (c.kind == ConditionKind::CategoricalEqual) {
            c.category = require(entry, "value", where).get<std::string>();
        }
        conditions[static_cast<std::size_t>(id)] = std::move(c);
    }
    return ConditionSet(std::move(conditions));
}

json to_json(const DecisionTree& dt) {
    if (!dt.conditions()) {
        throw PreconditionError("decision tree has no condition set to serialize");
    }
    return {{"kind", "decision-tree"},
            {"conditions", conditions_to_json(*dt.conditions())},
            {"trees", json::array({tree_to_json(dt)})}};
}

json to_json(const BoostedTree& bt) {
    if (!bt.conditions()) {
        throw PreconditionError("boosted tree has no condition set to serialize");
    }
    json trees = json::array();
    for (const RegressionTree& t : bt.trees()) {
        trees.push_back(tree_to_json(t));
    }
    return {{"kind", "boosted-tree"},
            {"conditions", conditions_to_json(*bt.conditions())},
            {"trees", std::move(trees)}};
}

DecisionTree dt_from_json(const json& doc) {
    if (require(doc, "kind", "model").get<std::string>() != "decision-tree") {
        throw DataError("model.kind: expected 'decision-tree'");
    }
    auto cs = std::make_shared<const ConditionSet>(conditions_from_json(require(doc, "conditions", "model")));
    const json& trees = require(doc, "trees", "model");
    if (!trees.is_array() || trees.size() != 1) {
        throw DataError("model.trees: a decision tree holds exactly one tree");
    }
    return tree_from_json<bool>(trees[0], "trees[0]", cs->size(), cs);
}

BoostedTree bt_from_json(const json& doc) {
    if (require(doc, "kind", "model").get<std::string>() != "boosted-tree") {
        throw DataError("model.kind: expected 'boosted-tree'");
    }
    auto cs = std::make_shared<const ConditionSet>(conditions_from_json(require(doc, "conditions", "model")));
    const json& trees = require(doc, "trees", "model");
    if (!trees.is_array()) {
        throw DataError("model.trees: expected an array");
    }
    std::vector<RegressionTree> members;
    members.reserve(trees.size());
    for (std::size_t i = 0; i < trees.size(); ++i) {
        members.push_back(
            tree_from_json<double>(trees[i], "trees[" + std::to_string(i) + "]", cs->size(), cs));
    }
    return BoostedTree(std::move(members), std::move(cs));
}

AnyModel model_from_json(const json& doc) {
    const std::string kind = require(doc, "kind", "model").get<std::string>();
    if (kind == "decision-tree") return dt_from_json(doc);
    if (kind == "boosted-tree") return bt_from_json(doc);
    throw DataError("model.kind: unknown kind '" + kind + "'");
}

namespace {
json parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open '" + path.string() + "'");
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw DataError("'" + path.string() + "': " + e.what());
    }
    return doc;
}
}  // namespace

AnyModel load_model_file(const std::filesystem::path& path) {
    try {
        return model_from_json(parse_file(path));
    } catch (const json::exception& e) {
        throw DataError("'" + path.string() + "': " + e.what());
    }
}

DecisionTree load_decision_tree_file(const std::filesystem::path& path) {
    AnyModel m = load_model_file(path);
    if (auto* dt = std::get_if<DecisionTree>(&m)) return std::move(*dt);
    throw DataError("'" + path.string() + "' is not a decision tree");
}

BoostedTree load_boosted_tree_file(const std::filesystem::path& path) {
    AnyModel m = load_model_file(path);
    if (auto* bt = std::get_if<BoostedTree>(&m)) return std::move(*bt);
    throw DataError("'" + path.string() + "' is not a boosted tree");
}

void atomic_write_file(const std::filesystem::path& path, const std::string& contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw DataError("cannot write '" + tmp.string() + "'");
        }
        out << contents;
        if (!out.flush()) {
            throw DataError("failed writing '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw DataError("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
    }
}

void save_json_file(const std::filesystem::path& path, const json& doc) {
    atomic_write_file(path, doc.dump(2) + "\n");
}

}  // namespace rectree
