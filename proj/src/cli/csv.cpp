#include "robustiv/cli/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <regex>
#include <sstream>

namespace robustiv::cli {

namespace {

// Reads one record, honouring quoted fields that may contain separators,
// doubled quotes and line breaks. Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  std::string cur;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          cur.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c == '\r') {
      if (in.peek() == '\n') in.get(c);
      break;
    } else if (c == '\n') {
      break;
    } else {
      cur.push_back(c);
    }
  }
  ++line;
  if (quoted) throw Error(ErrorCode::ParseError, "unterminated quoted field at line " + std::to_string(line));
  fields.push_back(std::move(cur));
  return any;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool is_missing(const std::string& s) { return s.empty() || s == "NA" || s == "NaN"; }

}  // namespace

ColumnTable parse_csv(std::istream& in, const std::vector<std::string>& wanted) {
  std::vector<std::string> fields;
  std::size_t line = 0;
  if (!read_record(in, fields, line)) throw Error(ErrorCode::ParseError, "empty CSV input (header row required)");
  if (!fields.empty() && fields[0].rfind("\xEF\xBB\xBF", 0) == 0) fields[0].erase(0, 3);

  ColumnTable table;
  std::vector<std::size_t> source;
  for (std::size_t k = 0; k < fields.size(); ++k) {
    const std::string name = trim(fields[k]);
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), name) == wanted.end()) continue;
    table.names.push_back(name);
    source.push_back(k);
  }
  const std::size_t width = fields.size();
  table.columns.resize(table.names.size());

  std::size_t row = 0;
  while (read_record(in, fields, line)) {
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;
    ++row;
    if (fields.size() != width)
      throw Error(ErrorCode::ParseError, "row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                                             " fields, expected " + std::to_string(width));
    for (std::size_t c = 0; c < source.size(); ++c) {
      const std::string cell = trim(fields[source[c]]);
      double v = std::numeric_limits<double>::quiet_NaN();
      if (!is_missing(cell)) {
        const char* first = cell.data();
        const char* last = first + cell.size();
        if (*first == '+') ++first;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last || !std::isfinite(v))
          throw Error(ErrorCode::ParseError, "non-numeric value '" + cell + "' at row " + std::to_string(row) +
                                                 ", column \"" + table.names[c] + "\"");
      }
      table.columns[c].push_back(v);
    }
  }
  return table;
}

ColumnTable read_csv_table(const std::string& path, const std::vector<std::string>& wanted) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
  return parse_csv(in, wanted);
}

Dataset read_csv(const std::string& path, const ColumnSpec& spec, ValidationSummary* summary) {
  std::vector<std::string> wanted{spec.outcome, spec.treatment};
  wanted.insert(wanted.end(), spec.instruments.begin(), spec.instruments.end());
  wanted.insert(wanted.end(), spec.covariates.begin(), spec.covariates.end());
  return validate_dataset(read_csv_table(path, wanted), spec, summary);
}

std::vector<std::string> expand_column_list(const std::string& list) {
  static const std::regex range(R"(^(.*?)(\d+)\.\.(.*?)(\d+)$)");
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::smatch m;
    if (std::regex_match(item, m, range) && m[1].str() == m[3].str()) {
      const long a = std::stol(m[2].str());
      const long b = std::stol(m[4].str());
      if (b < a) throw Error(ErrorCode::InvalidArgument, "descending column range '" + item + "'");
      for (long k = a; k <= b; ++k) out.push_back(m[1].str() + std::to_string(k));
    } else {
      out.push_back(item);
    }
  }
  return out;
}

void write_csv(std::ostream& out, const Dataset& ds, const std::string& y_name, const std::string& d_name) {
  out << y_name << ',' << d_name;
  for (const auto& n : ds.z_names) out << ',' << n;
  for (const auto& n : ds.x_names) out << ',' << n;
  out << '\n';
  const auto old = out.precision(17);
  for (std::ptrdiff_t i = 0; i < ds.n(); ++i) {
    out << ds.y(i) << ',' << ds.d(i);
    for (std::ptrdiff_t j = 0; j < ds.pz(); ++j) out << ',' << ds.z(i, j);
    for (std::ptrdiff_t j = 0; j < ds.px(); ++j) out << ',' << ds.x(i, j);
    out << '\n';
  }
  out.precision(old);
}

}  // namespace robustiv::cli
