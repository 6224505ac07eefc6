#ifndef EQCOV_TABLE_HPP
#define EQCOV_TABLE_HPP

#include <map>
#include <string>
#include <vector>

#include "eqcov/dataset.hpp"

namespace eqcov {

// Column roles for a header-row, comma-delimited file. Group values must be
// non-negative integers unless a string-to-label mapping is supplied.
struct TableSchema {
    std::vector<std::string> feature_columns;
    std::string group_column;
    std::string response_column;
    std::map<std::string, int> group_mapping;  // optional
};

struct LoadResult {
    Dataset dataset;
    std::size_t skipped_rows = 0;  // rows dropped for missing/non-numeric entries
};

LoadResult load_table(const std::string& path, const TableSchema& schema);

// Same parser over an in-memory document; load_table delegates here.
LoadResult parse_table(const std::string& text, const TableSchema& schema,
                       const std::string& origin = "<memory>");

}  // namespace eqcov

#endif  // EQCOV_TABLE_HPP
