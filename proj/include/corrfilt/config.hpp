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

#ifndef CORRFILT_CONFIG_HPP
#define CORRFILT_CONFIG_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "corrfilt/model.hpp"

/**
 * \file
 * \brief Strict plain-text experiment configuration.
 *
 * Grammar (a deliberate subset of the common [section] key = value
 * format): comment lines and trailing comments start with '#'; sections
 * are single-bracket names; values are integers, floats, booleans,
 * double-quoted strings (no escapes), or single-line arrays, possibly
 * nested for row-major matrices:
 *
 *   [model]
 *   kind = "linear"
 *   A = [[-1.0]]
 *   x0 = [1.0]
 *
 * Strictness is the config-drift guard: unknown sections, unknown keys,
 * duplicate keys, and malformed values are all hard errors
 * (std::invalid_argument), never silently ignored.
 */

namespace corrfilt {

/// One parsed value. Integers keep their exact 64-bit representation in
/// addition to the double view so seeds survive the round trip.
struct ConfigValue {
  enum class Kind { number, boolean, string, array };
  Kind kind = Kind::number;
  double number = 0.0;
  bool is_integer = false;
  std::uint64_t uint_value = 0;  ///< valid for nonnegative integers
  bool boolean = false;
  std::string str;
  std::vector<ConfigValue> array;
};

/// A whole parsed file plus the FNV-1a hash of its raw bytes (stamped
/// into every output file so results are traceable to their config).
struct ParsedConfig {
  std::map<std::string, std::map<std::string, ConfigValue>> sections;
  std::uint64_t hash = 0;
};

ParsedConfig parse_config_text(const std::string& text);
ParsedConfig parse_config_file(const std::string& path);

/// Typed, consumption-tracked access to one section. finish() rejects
/// any key that was never read.
class SectionReader {
 public:
  /// Missing sections behave as empty (every require_* then fails with a
  /// "missing key" error naming the section).
  SectionReader(const ParsedConfig& config, const std::string& section);

  bool has(const std::string& key) const;
  double require_double(const std::string& key);
  double get_double(const std::string& key, double fallback);
  std::int64_t require_int(const std::string& key);
  std::int64_t get_int(const std::string& key, std::int64_t fallback);
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback);
  bool get_bool(const std::string& key, bool fallback);
  std::string require_string(const std::string& key);
  std::string get_string(const std::string& key, const std::string& fallback);
  Eigen::VectorXd require_vector(const std::string& key);
  Eigen::MatrixXd require_matrix(const std::string& key);
  std::vector<double> get_double_list(const std::string& key,
                                      std::vector<double> fallback);
  std::vector<std::int64_t> get_int_list(const std::string& key,
                                         std::vector<std::int64_t> fallback);
  std::vector<std::string> get_string_list(const std::string& key,
                                           std::vector<std::string> fallback);

  /// \throws std::invalid_argument listing unconsumed keys.
  void finish();

 private:
  const ConfigValue* find(const std::string& key);
  const ConfigValue& require(const std::string& key);

  std::string section_;
  const std::map<std::string, ConfigValue>* entries_;
  std::set<std::string> consumed_;
};

/// \throws std::invalid_argument if the config contains a section outside
/// `allowed` (command-specific allowlists).
void check_sections(const ParsedConfig& config,
                    const std::set<std::string>& allowed);

/// Model specification: exactly one of the two variants is populated.
struct ModelSpec {
  bool is_linear = true;
  LinearModel linear;
  NonlinearModel nonlinear;
};

/// Execution parameters shared by all commands.
struct RunSpec {
  std::size_t M = 1000;
  std::uint64_t master_seed = 0;
  std::string out_dir = ".";
  int threads = 1;
};

/// Loads and finishes the [grid] section (keys: level, T).
std::shared_ptr<const TimeGrid> load_grid(const ParsedConfig& config);

/// Loads and finishes the [model] section. kind = "linear" takes matrices
/// A, C, sigma0, sigma1 (row-major nested arrays) and vector x0;
/// kind = "tanh" takes scalars a, c, sigma0, sigma1, x0. The horizon T is
/// taken from the grid.
ModelSpec load_model(const ParsedConfig& config, double T);

/// Loads and finishes the [run] section (keys: M, master_seed, out_dir,
/// threads; all optional).
RunSpec load_run(const ParsedConfig& config);

}  // namespace corrfilt

#endif  // CORRFILT_CONFIG_HPP
