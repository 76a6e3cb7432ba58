#include "rectree/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "rectree/model_io.hpp"

namespace rectree {

RawRow RawTable::row(std::size_t i) const {
    RawRow out;
    const auto& cells = rows.at(i);
    for (std::size_t a = 0; a < attributes.size(); ++a) {
        out.emplace(attributes[a], cells[a]);
    }
    return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        // trim surrounding whitespace
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.push_back({});
    return out;
}

RawValue parse_cell(const std::string& cell) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec == std::errc() && ptr == last && !cell.empty()) return value;
    return cell;
}

std::string render_cell(const RawValue& v) {
    if (const double* d = std::get_if<double>(&v)) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%g", *d);
        return buf;
    }
    return std::get<std::string>(v);
}

}  // namespace

RawTable load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open '" + path.string() + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("'" + path.string() + "' is empty");
    }
    RawTable table;
    std::vector<std::string> header = split_line(line);
    if (header.empty() || header.back() != "label") {
        throw DataError("'" + path.string() + "': last column must be 'label'");
    }
    header.pop_back();
    table.attributes = std::move(header);

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells = split_line(line);
        if (cells.size() != table.attributes.size() + 1) {
            throw DataError("'" + path.string() + "' line " + std::to_string(line_no) + ": expected " +
                            std::to_string(table.attributes.size() + 1) + " cells, found " +
                            std::to_string(cells.size()));
        }
        const std::string& label = cells.back();
        if (label != "0" && label != "1") {
            throw DataError("'" + path.string() + "' line " + std::to_string(line_no) +
                            ": label must be 0 or 1");
        }
        std::vector<RawValue> row;
        row.reserve(table.attributes.size());
        for (std::size_t a = 0; a < table.attributes.size(); ++a) {
            if (cells[a].empty()) {
                throw DataError("'" + path.string() + "' line " + std::to_string(line_no) +
                                ": missing value for attribute '" + table.attributes[a] + "'");
            }
            row.push_back(parse_cell(cells[a]));
        }
        table.rows.push_back(std::move(row));
        table.labels.push_back(label == "1");
    }
    return table;
}

void save_csv(const std::filesystem::path& path, const RawTable& table) {
    std::ostringstream out;
    for (const std::string& a : table.attributes) out << a << ",";
    out << "label\n";
    for (std::size_t i = 0; i < table.size(); ++i) {
        for (const RawValue& v : table.rows[i]) out << render_cell(v) << ",";
        out << (table.labels[i] ? 1 : 0) << "\n";
    }
    atomic_write_file(path, out.str());
}

std::vector<Condition> propose_conditions(const RawTable& table) {
    std::vector<Condition> out;
    for (std::size_t a = 0; a < table.attributes.size(); ++a) {
        std::set<double> numeric;
        std::set<std::string> text;
        for (const auto& row : table.rows) {
            if (const double* d = std::get_if<double>(&row[a])) {
                numeric.insert(*d);
            } else {
                text.insert(std::get<std::string>(row[a]));
            }
        }
        if (!text.empty()) {
            for (const std::string& value : text) {
                out.push_back({ConditionKind::CategoricalEqual, table.attributes[a], 0.0, value});
            }
            continue;
        }
        std::vector<double> values(numeric.begin(), numeric.end());
        for (std::size_t i = 0; i + 1 < values.size(); ++i) {
            out.push_back({ConditionKind::NumericGreater, table.attributes[a],
                           (values[i] + values[i + 1]) / 2.0, {}});
        }
    }
    return out;
}

std::vector<Instance> Dataset::instances() const {
    std::vector<Instance> out;
    out.reserve(rows.size());
    for (const auto& [x, label] : rows) out.push_back(x);
    return out;
}

Dataset binarize_table(const RawTable& table, std::shared_ptr<const ConditionSet> cs,
                       std::string provenance) {
    Dataset data;
    data.conditions = std::move(cs);
    data.provenance = std::move(provenance);
    data.rows.reserve(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
        data.rows.emplace_back(binarize(table.row(i), *data.conditions), table.labels[i]);
    }
    return data;
}

}  // namespace rectree
