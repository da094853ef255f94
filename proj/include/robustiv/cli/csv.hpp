#pragma once

#include <istream>
#include <string>
#include <vector>

#include "robustiv/dataset.hpp"

namespace robustiv::cli {

/// Parses an RFC-4180 CSV with a header row. Only columns named in `wanted`
/// are converted to numbers (all columns when `wanted` is empty). "NA", ""
/// and "NaN" are missing values. Throws ParseError naming the 1-based data
/// row and column on any non-numeric cell.
ColumnTable parse_csv(std::istream& in, const std::vector<std::string>& wanted = {});

ColumnTable read_csv_table(const std::string& path, const std::vector<std::string>& wanted = {});

Dataset read_csv(const std::string& path, const ColumnSpec& spec,
                 ValidationSummary* summary = nullptr);

/// Expands "Z1..Z10" into Z1, Z2, ..., Z10 (shared prefix, numeric suffix);
/// other items pass through.
std::vector<std::string> expand_column_list(const std::string& list);

/// Writes a dataset with header Y, D, Z names, X names.
void write_csv(std::ostream& out, const Dataset& ds, const std::string& y_name = "Y",
               const std::string& d_name = "D");

}  // namespace robustiv::cli
