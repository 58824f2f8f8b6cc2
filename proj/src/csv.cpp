// Copyright 2026 the corrfilt authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "corrfilt/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace corrfilt {

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_numeric_csv(const std::string& file, const CsvTable& table) {
  std::ofstream out(file, std::ios::binary);  // binary: no newline surprises
  if (!out) throw std::runtime_error("cannot open for writing: " + file);
  for (const auto& c : table.comments) out << "# " << c << "\n";
  for (std::size_t j = 0; j < table.columns.size(); ++j) {
    if (j) out << ",";
    out << table.columns[j];
  }
  out << "\n";
  if (table.rows.size() > 0 &&
      static_cast<std::size_t>(table.rows.cols()) != table.columns.size())
    throw std::invalid_argument("csv column count mismatch");
  for (Eigen::Index i = 0; i < table.rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < table.rows.cols(); ++j) {
      if (j) out << ",";
      out << format_double(table.rows(i, j));
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + file);
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    // Trim surrounding spaces so hand-edited files still parse.
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? std::string()
                                            : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

CsvTable read_numeric_csv(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open for reading: " + file);
  CsvTable table;
  std::string line;
  bool have_header = false;
  std::vector<std::vector<double>> body;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::size_t start = line.size() > 1 && line[1] == ' ' ? 2 : 1;
      table.comments.push_back(line.substr(start));
      continue;
    }
    if (!have_header) {
      table.columns = split_fields(line);
      have_header = true;
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != table.columns.size())
      throw std::invalid_argument("csv row width mismatch in " + file);
    std::vector<double> row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      std::size_t used = 0;
      try {
        row[j] = std::stod(fields[j], &used);
      } catch (const std::exception&) {
        throw std::invalid_argument("non-numeric csv field '" + fields[j] +
                                    "' in " + file);
      }
      if (used != fields[j].size())
        throw std::invalid_argument("non-numeric csv field '" + fields[j] +
                                    "' in " + file);
    }
    body.push_back(std::move(row));
  }
  if (!have_header) throw std::invalid_argument("csv missing header: " + file);
  table.rows.resize(static_cast<Eigen::Index>(body.size()),
                    static_cast<Eigen::Index>(table.columns.size()));
  for (std::size_t i = 0; i < body.size(); ++i)
    for (std::size_t j = 0; j < body[i].size(); ++j)
      table.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          body[i][j];
  return table;
}

void write_path_csv(const std::string& file, const Path& path,
                    const std::string& coord_prefix,
                    const std::vector<std::string>& comments) {
  CsvTable table;
  table.comments = comments;
  table.columns.push_back("t");
  for (Eigen::Index k = 0; k < path.dim(); ++k)
    table.columns.push_back(coord_prefix + std::to_string(k + 1));
  const auto rows = static_cast<Eigen::Index>(path.grid->size());
  table.rows.resize(rows, 1 + path.dim());
  for (Eigen::Index i = 0; i < rows; ++i) {
    table.rows(i, 0) = path.grid->times[static_cast<std::size_t>(i)];
    table.rows.block(i, 1, 1, path.dim()) = path.values.row(i);
  }
  write_numeric_csv(file, table);
}

Path read_path_csv(const std::string& file) {
  const CsvTable table = read_numeric_csv(file);
  if (table.columns.empty() || table.columns[0] != "t")
    throw std::invalid_argument("path csv must start with a t column: " + file);
  const Eigen::Index rows = table.rows.rows();
  if (rows < 2) throw std::invalid_argument("path csv too short: " + file);
  const std::size_t steps = static_cast<std::size_t>(rows) - 1;
  if ((steps & (steps - 1)) != 0)
    throw std::invalid_argument("path csv rows must be 2^level + 1: " + file);
  int level = 0;
  while ((std::size_t{1} << level) < steps) ++level;
  const double T = table.rows(rows - 1, 0);
  auto grid = make_dyadic_grid(level, T);
  for (Eigen::Index i = 0; i < rows; ++i)
    if (table.rows(i, 0) != grid->times[static_cast<std::size_t>(i)])
      throw std::invalid_argument("path csv time column is not dyadic: " + file);
  Path path;
  path.grid = grid;
  path.values = table.rows.rightCols(table.rows.cols() - 1);
  return path;
}

}  // namespace corrfilt
