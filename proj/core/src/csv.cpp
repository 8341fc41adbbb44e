#include "krv/csv.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "krv/error.hpp"

namespace krv {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc{} && res.ptr == last && std::isfinite(out);
}

bool is_numeric(const std::string& s) {
  double tmp;
  return parse_double(s, tmp);
}

}  // namespace

Dataset load_csv(const std::string& path, const LabelColumn& label_column) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");

  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    rows.push_back(split_fields(line));
  }
  if (rows.empty()) throw Error(path + ": no instances");

  const std::size_t ncols = rows[0].size();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != ncols)
      throw Error(path + ": ragged row " + std::to_string(r + 1) + " (expected " +
                  std::to_string(ncols) + " fields, got " + std::to_string(rows[r].size()) + ")");
  }

  // Header row: present when any first-row field is non-numeric. Files with
  // nominal data columns therefore need a header to parse correctly.
  bool has_header = false;
  for (const auto& f : rows[0]) {
    if (!is_numeric(f)) {
      has_header = true;
      break;
    }
  }
  std::vector<std::string> header;
  std::size_t first_data = 0;
  if (has_header) {
    header = rows[0];
    first_data = 1;
  } else {
    for (std::size_t c = 0; c < ncols; ++c) header.push_back("col" + std::to_string(c));
  }
  if (first_data >= rows.size()) throw Error(path + ": no instances");

  // Resolve the label column.
  std::size_t label_idx;
  if (std::holds_alternative<int>(label_column)) {
    int idx = std::get<int>(label_column);
    if (idx < 0) idx += static_cast<int>(ncols);
    if (idx < 0 || idx >= static_cast<int>(ncols))
      throw Error(path + ": label column index out of range");
    label_idx = static_cast<std::size_t>(idx);
  } else {
    const std::string& name = std::get<std::string>(label_column);
    if (!has_header) throw Error(path + ": label column '" + name + "' needs a header row");
    std::size_t found = ncols;
    for (std::size_t c = 0; c < ncols; ++c) {
      if (header[c] == name) {
        found = c;
        break;
      }
    }
    if (found == ncols) throw Error(path + ": no column named '" + name + "'");
    label_idx = found;
  }

  const std::size_t n = rows.size() - first_data;

  // Labels in first-appearance order.
  std::vector<int> labels(n);
  std::vector<std::string> label_names;
  std::unordered_map<std::string, int> label_ids;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& raw = rows[first_data + i][label_idx];
    if (raw.empty() || raw == "?")
      throw Error(path + ": missing label at row " + std::to_string(first_data + i + 1));
    auto it = label_ids.find(raw);
    if (it == label_ids.end()) {
      it = label_ids.emplace(raw, static_cast<int>(label_names.size())).first;
      label_names.push_back(raw);
    }
    labels[i] = it->second;
  }
  if (label_names.size() < 2) throw Error(path + ": label column has fewer than two distinct values");

  // Classify attribute columns and collect their values.
  struct Column {
    std::size_t src;
    AttrKind kind;
    std::vector<double> numeric;             // real/integer
    std::vector<int> level_of_row;           // nominal
    std::vector<std::string> levels;         // nominal, first-appearance order
  };
  std::vector<Column> columns;
  for (std::size_t c = 0; c < ncols; ++c) {
    if (c == label_idx) continue;
    Column col;
    col.src = c;
    bool numeric = true;
    bool integral = true;
    col.numeric.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string& raw = rows[first_data + i][c];
      if (raw.empty() || raw == "?")
        throw Error(path + ": missing value at row " + std::to_string(first_data + i + 1) +
                    ", column '" + header[c] + "'");
      double v;
      if (!parse_double(raw, v)) {
        numeric = false;
        break;
      }
      col.numeric[i] = v;
      if (v != std::floor(v)) integral = false;
    }
    if (numeric) {
      col.kind = integral ? AttrKind::integer : AttrKind::real;
    } else {
      col.kind = AttrKind::nominal;
      col.level_of_row.resize(n);
      std::unordered_map<std::string, int> level_ids;
      for (std::size_t i = 0; i < n; ++i) {
        const std::string& raw = rows[first_data + i][c];
        if (raw.empty() || raw == "?")
          throw Error(path + ": missing value at row " + std::to_string(first_data + i + 1) +
                      ", column '" + header[c] + "'");
        auto it = level_ids.find(raw);
        if (it == level_ids.end()) {
          it = level_ids.emplace(raw, static_cast<int>(col.levels.size())).first;
          col.levels.push_back(raw);
        }
        col.level_of_row[i] = it->second;
      }
    }
    columns.push_back(std::move(col));
  }
  if (columns.empty()) throw Error(path + ": no attribute columns");

  // Assemble the encoded matrix; each nominal level becomes a 0/1 column.
  std::size_t total_cols = 0;
  for (const auto& col : columns)
    total_cols += (col.kind == AttrKind::nominal) ? col.levels.size() : 1;

  Dataset d;
  d.name = std::filesystem::path(path).stem().string();
  d.instances.setZero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(total_cols));
  d.labels = std::move(labels);
  d.label_names = std::move(label_names);
  d.attribute_kinds.reserve(total_cols);

  Eigen::Index out_c = 0;
  for (const auto& col : columns) {
    if (col.kind == AttrKind::nominal) {
      for (std::size_t l = 0; l < col.levels.size(); ++l) {
        for (std::size_t i = 0; i < n; ++i)
          d.instances(static_cast<Eigen::Index>(i), out_c) =
              (col.level_of_row[i] == static_cast<int>(l)) ? 1.0 : 0.0;
        d.attribute_kinds.push_back(AttrKind::nominal);
        ++out_c;
      }
    } else {
      for (std::size_t i = 0; i < n; ++i)
        d.instances(static_cast<Eigen::Index>(i), out_c) = col.numeric[i];
      d.attribute_kinds.push_back(col.kind);
      ++out_c;
    }
  }

  d.validate();
  return d;
}

}  // namespace krv
