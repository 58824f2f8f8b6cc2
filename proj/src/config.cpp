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

#include "corrfilt/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace corrfilt {

namespace {

[[noreturn]] void fail(const std::string& message) {
  throw std::invalid_argument("config error: " + message);
}

bool is_bare_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

/// Recursive-descent value parser over one logical line.
class ValueParser {
 public:
  ValueParser(const std::string& text, std::size_t pos) : text_(text), pos_(pos) {}

  ConfigValue parse() {
    skip_spaces();
    ConfigValue v = parse_value();
    skip_spaces();
    if (pos_ != text_.size()) fail("trailing characters after value: '" +
                                   text_.substr(pos_) + "'");
    return v;
  }

 private:
  void skip_spaces() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t'))
      ++pos_;
  }

  ConfigValue parse_value() {
    if (pos_ >= text_.size()) fail("missing value");
    const char c = text_[pos_];
    if (c == '[') return parse_array();
    if (c == '"') return parse_string();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_boolean();
    return parse_number();
  }

  ConfigValue parse_array() {
    ConfigValue v;
    v.kind = ConfigValue::Kind::array;
    ++pos_;  // consume '['
    skip_spaces();
    if (pos_ < text_.size() && text_[pos_] == ']') {
      ++pos_;
      return v;
    }
    while (true) {
      skip_spaces();
      v.array.push_back(parse_value());
      skip_spaces();
      if (pos_ >= text_.size()) fail("unterminated array");
      if (text_[pos_] == ',') {
        ++pos_;
        continue;
      }
      if (text_[pos_] == ']') {
        ++pos_;
        return v;
      }
      fail("expected ',' or ']' in array");
    }
  }

  ConfigValue parse_string() {
    ConfigValue v;
    v.kind = ConfigValue::Kind::string;
    ++pos_;  // consume opening quote
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\') fail("string escapes are not supported");
      v.str.push_back(text_[pos_++]);
    }
    if (pos_ >= text_.size()) fail("unterminated string");
    ++pos_;  // closing quote
    return v;
  }

  ConfigValue parse_boolean() {
    std::string word;
    while (pos_ < text_.size() && is_bare_char(text_[pos_]))
      word.push_back(text_[pos_++]);
    ConfigValue v;
    v.kind = ConfigValue::Kind::boolean;
    if (word == "true")
      v.boolean = true;
    else if (word == "false")
      v.boolean = false;
    else
      fail("unrecognized bare word '" + word + "'");
    return v;
  }

  ConfigValue parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']' &&
           text_[pos_] != ' ' && text_[pos_] != '\t')
      ++pos_;
    const std::string token = text_.substr(start, pos_ - start);
    ConfigValue v;
    v.kind = ConfigValue::Kind::number;
    std::size_t used = 0;
    try {
      v.number = std::stod(token, &used);
    } catch (const std::exception&) {
      fail("malformed number '" + token + "'");
    }
    if (used != token.size()) fail("malformed number '" + token + "'");
    // Pure-digit tokens are integers and keep exact 64-bit values.
    std::size_t digits_from = token.size() > 0 && (token[0] == '+' || token[0] == '-') ? 1 : 0;
    bool all_digits = token.size() > digits_from;
    for (std::size_t i = digits_from; i < token.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(token[i]))) all_digits = false;
    if (all_digits) {
      v.is_integer = true;
      if (token[0] != '-') {
        errno = 0;
        v.uint_value = std::strtoull(token.c_str(), nullptr, 10);
        if (errno != 0) fail("integer out of range '" + token + "'");
      }
    }
    return v;
  }

  const std::string& text_;
  std::size_t pos_;
};

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void hash_bytes(std::uint64_t& h, const std::string& bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
}

}  // namespace

ParsedConfig parse_config_text(const std::string& text) {
  ParsedConfig config;
  config.hash = 0xcbf29ce484222325ull;
  hash_bytes(config.hash, text);

  std::istringstream in(text);
  std::string raw_line;
  std::string current_section;
  int line_no = 0;
  while (std::getline(in, raw_line)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw_line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        fail("line " + std::to_string(line_no) + ": malformed section header");
      current_section = trim(line.substr(1, line.size() - 2));
      if (current_section.empty())
        fail("line " + std::to_string(line_no) + ": empty section name");
      for (char c : current_section)
        if (!is_bare_char(c))
          fail("line " + std::to_string(line_no) + ": bad section name '" +
               current_section + "'");
      if (config.sections.count(current_section))
        fail("line " + std::to_string(line_no) + ": duplicate section [" +
             current_section + "]");
      config.sections[current_section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      fail("line " + std::to_string(line_no) + ": empty key");
    for (char c : key)
      if (!is_bare_char(c))
        fail("line " + std::to_string(line_no) + ": bad key '" + key + "'");
    if (current_section.empty())
      fail("line " + std::to_string(line_no) + ": key outside any section");
    auto& section = config.sections[current_section];
    if (section.count(key))
      fail("line " + std::to_string(line_no) + ": duplicate key '" + key +
           "' in [" + current_section + "]");
    ValueParser parser(line, eq + 1);
    section[key] = parser.parse();
  }
  return config;
}

ParsedConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

SectionReader::SectionReader(const ParsedConfig& config,
                             const std::string& section)
    : section_(section) {
  const auto it = config.sections.find(section);
  entries_ = it == config.sections.end() ? nullptr : &it->second;
}

bool SectionReader::has(const std::string& key) const {
  return entries_ && entries_->count(key) > 0;
}

const ConfigValue* SectionReader::find(const std::string& key) {
  if (!entries_) return nullptr;
  const auto it = entries_->find(key);
  if (it == entries_->end()) return nullptr;
  consumed_.insert(key);
  return &it->second;
}

const ConfigValue& SectionReader::require(const std::string& key) {
  const ConfigValue* v = find(key);
  if (!v) fail("missing key '" + key + "' in [" + section_ + "]");
  return *v;
}

double SectionReader::require_double(const std::string& key) {
  const ConfigValue& v = require(key);
  if (v.kind != ConfigValue::Kind::number)
    fail("key '" + key + "' in [" + section_ + "] must be a number");
  return v.number;
}

double SectionReader::get_double(const std::string& key, double fallback) {
  return find(key) ? require_double(key) : fallback;
}

std::int64_t SectionReader::require_int(const std::string& key) {
  const ConfigValue& v = require(key);
  if (v.kind != ConfigValue::Kind::number || !v.is_integer)
    fail("key '" + key + "' in [" + section_ + "] must be an integer");
  return static_cast<std::int64_t>(v.number);
}

std::int64_t SectionReader::get_int(const std::string& key,
                                    std::int64_t fallback) {
  return find(key) ? require_int(key) : fallback;
}

std::uint64_t SectionReader::get_uint(const std::string& key,
                                      std::uint64_t fallback) {
  const ConfigValue* v = find(key);
  if (!v) return fallback;
  if (v->kind != ConfigValue::Kind::number || !v->is_integer ||
      v->number < 0.0)
    fail("key '" + key + "' in [" + section_ +
         "] must be a nonnegative integer");
  return v->uint_value;
}

bool SectionReader::get_bool(const std::string& key, bool fallback) {
  const ConfigValue* v = find(key);
  if (!v) return fallback;
  if (v->kind != ConfigValue::Kind::boolean)
    fail("key '" + key + "' in [" + section_ + "] must be true or false");
  return v->boolean;
}

std::string SectionReader::require_string(const std::string& key) {
  const ConfigValue& v = require(key);
  if (v.kind != ConfigValue::Kind::string)
    fail("key '" + key + "' in [" + section_ + "] must be a string");
  return v.str;
}

std::string SectionReader::get_string(const std::string& key,
                                      const std::string& fallback) {
  return find(key) ? require_string(key) : fallback;
}

Eigen::VectorXd SectionReader::require_vector(const std::string& key) {
  const ConfigValue& v = require(key);
  if (v.kind != ConfigValue::Kind::array)
    fail("key '" + key + "' in [" + section_ + "] must be an array");
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.array.size()));
  for (std::size_t i = 0; i < v.array.size(); ++i) {
    if (v.array[i].kind != ConfigValue::Kind::number)
      fail("key '" + key + "' in [" + section_ + "] must hold numbers");
    out(static_cast<Eigen::Index>(i)) = v.array[i].number;
  }
  return out;
}

Eigen::MatrixXd SectionReader::require_matrix(const std::string& key) {
  const ConfigValue& v = require(key);
  if (v.kind != ConfigValue::Kind::array || v.array.empty())
    fail("key '" + key + "' in [" + section_ +
         "] must be a nonempty array of rows");
  const std::size_t rows = v.array.size();
  std::size_t cols = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (v.array[i].kind != ConfigValue::Kind::array)
      fail("key '" + key + "' in [" + section_ +
           "] must be a row-major nested array");
    if (i == 0)
      cols = v.array[i].array.size();
    else if (v.array[i].array.size() != cols)
      fail("key '" + key + "' in [" + section_ + "] has ragged rows");
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows),
                      static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      const ConfigValue& cell = v.array[i].array[j];
      if (cell.kind != ConfigValue::Kind::number)
        fail("key '" + key + "' in [" + section_ + "] must hold numbers");
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          cell.number;
    }
  return out;
}

std::vector<double> SectionReader::get_double_list(
    const std::string& key, std::vector<double> fallback) {
  const ConfigValue* v = find(key);
  if (!v) return fallback;
  if (v->kind != ConfigValue::Kind::array)
    fail("key '" + key + "' in [" + section_ + "] must be an array");
  std::vector<double> out;
  for (const auto& item : v->array) {
    if (item.kind != ConfigValue::Kind::number)
      fail("key '" + key + "' in [" + section_ + "] must hold numbers");
    out.push_back(item.number);
  }
  return out;
}

std::vector<std::int64_t> SectionReader::get_int_list(
    const std::string& key, std::vector<std::int64_t> fallback) {
  const ConfigValue* v = find(key);
  if (!v) return fallback;
  if (v->kind != ConfigValue::Kind::array)
    fail("key '" + key + "' in [" + section_ + "] must be an array");
  std::vector<std::int64_t> out;
  for (const auto& item : v->array) {
    if (item.kind != ConfigValue::Kind::number || !item.is_integer)
      fail("key '" + key + "' in [" + section_ + "] must hold integers");
    out.push_back(static_cast<std::int64_t>(item.number));
  }
  return out;
}

std::vector<std::string> SectionReader::get_string_list(
    const std::string& key, std::vector<std::string> fallback) {
  const ConfigValue* v = find(key);
  if (!v) return fallback;
  if (v->kind != ConfigValue::Kind::array)
    fail("key '" + key + "' in [" + section_ + "] must be an array");
  std::vector<std::string> out;
  for (const auto& item : v->array) {
    if (item.kind != ConfigValue::Kind::string)
      fail("key '" + key + "' in [" + section_ + "] must hold strings");
    out.push_back(item.str);
  }
  return out;
}

void SectionReader::finish() {
  if (!entries_) return;
  std::vector<std::string> unknown;
  for (const auto& [key, value] : *entries_)
    if (!consumed_.count(key)) unknown.push_back(key);
  if (!unknown.empty()) {
    std::ostringstream msg;
    msg << "unknown key(s) in [" << section_ << "]:";
    for (const auto& k : unknown) msg << " '" << k << "'";
    fail(msg.str());
  }
}

void check_sections(const ParsedConfig& config,
                    const std::set<std::string>& allowed) {
  for (const auto& [name, entries] : config.sections)
    if (!allowed.count(name))
      fail("unknown section [" + name + "]");
}

std::shared_ptr<const TimeGrid> load_grid(const ParsedConfig& config) {
  SectionReader grid(config, "grid");
  const auto level = grid.require_int("level");
  const double T = grid.require_double("T");
  grid.finish();
  if (level < 0 || level > 24)
    fail("grid level must lie in [0, 24]");
  return make_dyadic_grid(static_cast<int>(level), T);
}

ModelSpec load_model(const ParsedConfig& config, double T) {
  SectionReader model(config, "model");
  const std::string kind = model.get_string("kind", "linear");
  ModelSpec spec;
  if (kind == "linear") {
    spec.is_linear = true;
    spec.linear.A = model.require_matrix("A");
    spec.linear.C = model.require_matrix("C");
    spec.linear.sigma0 = model.require_matrix("sigma0");
    spec.linear.sigma1 = model.require_matrix("sigma1");
    spec.linear.x0 = model.require_vector("x0");
    spec.linear.T = T;
  } else if (kind == "tanh") {
    spec.is_linear = false;
    spec.nonlinear = make_tanh_model(
        model.require_double("a"), model.require_double("c"),
        model.require_double("sigma0"), model.require_double("sigma1"),
        model.require_double("x0"), T);
  } else {
    fail("model kind must be \"linear\" or \"tanh\"");
  }
  model.finish();
  return spec;
}

RunSpec load_run(const ParsedConfig& config) {
  SectionReader run(config, "run");
  RunSpec spec;
  const auto M = run.get_int("M", 1000);
  if (M < 2) fail("run M must be >= 2");
  spec.M = static_cast<std::size_t>(M);
  spec.master_seed = run.get_uint("master_seed", 0);
  spec.out_dir = run.get_string("out_dir", ".");
  const auto threads = run.get_int("threads", 1);
  if (threads < 1) fail("run threads must be >= 1");
  spec.threads = static_cast<int>(threads);
  run.finish();
  return spec;
}

}  // namespace corrfilt
