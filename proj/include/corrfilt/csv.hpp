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

#ifndef CORRFILT_CSV_HPP
#define CORRFILT_CSV_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "corrfilt/model.hpp"

/**
 * \file
 * \brief CSV input/output for paths and experiment tables.
 *
 * Format contract: leading comment lines start with "# ", one header line
 * of comma-separated column names, then numeric rows printed with 17
 * significant digits so doubles round-trip exactly.
 */

namespace corrfilt {

/// Shortest-round-trip decimal rendering of a double (printf %.17g).
std::string format_double(double value);

/// A parsed CSV file: comment lines (without the "# " prefix), column
/// names, and the numeric body.
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  Eigen::MatrixXd rows;
};

/// Writes comments, the header line, and the rows of `table` to `file`.
/// Parent directories must already exist.
void write_numeric_csv(const std::string& file, const CsvTable& table);

/// Reads a file written by write_numeric_csv. Ragged rows or non-numeric
/// fields raise std::invalid_argument.
CsvTable read_numeric_csv(const std::string& file);

/// Writes a sampled path as `t, <prefix>1..<prefix>dim` rows.
void write_path_csv(const std::string& file, const Path& path,
                    const std::string& coord_prefix,
                    const std::vector<std::string>& comments = {});

/// Reads a path written by write_path_csv. The time column must match a
/// dyadic grid bit-for-bit; anything else is rejected.
Path read_path_csv(const std::string& file);

}  // namespace corrfilt

#endif  // CORRFILT_CSV_HPP
