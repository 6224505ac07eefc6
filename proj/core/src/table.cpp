#include "eqcov/table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace eqcov {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(field);
    return fields;
}

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::optional<double> parse_double(const std::string& raw) {
    const std::string s = trimmed(raw);
    if (s.empty()) return std::nullopt;
    double value = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) return std::nullopt;
    return value;
}

std::optional<int> parse_group(const std::string& raw,
                               const std::map<std::string, int>& mapping) {
    const std::string s = trimmed(raw);
    if (s.empty()) return std::nullopt;
    if (!mapping.empty()) {
        auto it = mapping.find(s);
        if (it == mapping.end()) return std::nullopt;
        return it->second;
    }
    int value = 0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || value < 0) return std::nullopt;
    return value;
}

void validate_schema(const TableSchema& schema) {
    if (schema.feature_columns.empty()) {
        throw ConfigError("schema must name at least one feature column");
    }
    if (schema.group_column.empty() || schema.response_column.empty()) {
        throw ConfigError("schema must name exactly one group column and one response column");
    }
    for (const auto& [name, label] : schema.group_mapping) {
        if (label < 0) {
            throw ConfigError("group mapping for '" + name + "' must be non-negative");
        }
    }
}

}  // namespace

LoadResult parse_table(const std::string& text, const TableSchema& schema,
                       const std::string& origin) {
    validate_schema(schema);

    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError(origin + ": empty file");
    }
    const std::vector<std::string> header = split_csv_line(line);
    std::map<std::string, std::size_t> column_index;
    for (std::size_t j = 0; j < header.size(); ++j) {
        column_index[trimmed(header[j])] = j;
    }

    auto require_column = [&](const std::string& name) {
        auto it = column_index.find(name);
        if (it == column_index.end()) {
            throw DataError(origin + ": column '" + name + "' not found in header");
        }
        return it->second;
    };
    std::vector<std::size_t> feature_idx;
    feature_idx.reserve(schema.feature_columns.size());
    for (const std::string& name : schema.feature_columns) {
        feature_idx.push_back(require_column(name));
    }
    const std::size_t group_idx = require_column(schema.group_column);
    const std::size_t response_idx = require_column(schema.response_column);

    std::vector<Sample> rows;
    std::size_t skipped = 0;
    while (std::getline(in, line)) {
        if (trimmed(line).empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        Sample s;
        s.features.reserve(feature_idx.size());
        bool ok = fields.size() >= header.size();
        if (ok) {
            for (std::size_t j : feature_idx) {
                if (auto v = parse_double(fields[j])) {
                    s.features.push_back(*v);
                } else {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) {
            auto g = parse_group(fields[group_idx], schema.group_mapping);
            auto y = parse_double(fields[response_idx]);
            if (g && y) {
                s.group = *g;
                s.response = *y;
            } else {
                ok = false;
            }
        }
        if (ok) {
            rows.push_back(std::move(s));
        } else {
            ++skipped;
        }
    }

    if (rows.empty()) {
        throw DataError(origin + ": no usable rows (" + std::to_string(skipped) +
                        " rejected)");
    }
    LoadResult result;
    result.dataset = Dataset::from_samples(std::move(rows));
    result.skipped_rows = skipped;
    return result;
}

LoadResult load_table(const std::string& path, const TableSchema& schema) {
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw DataError("cannot open file: " + path);
    }
    std::ostringstream buf;
    buf << file.rdbuf();
    return parse_table(buf.str(), schema, path);
}

}  // namespace eqcov
