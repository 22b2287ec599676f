// Copyright 2026 The rutk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rutk/tabular.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "rutk/error.h"

namespace rutk {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kCategoryUnknown: return "CategoryUnknown";
    case ErrorCode::kEmptyData: return "EmptyData";
    case ErrorCode::kUnknownVariable: return "UnknownVariable";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kTableMismatch: return "TableMismatch";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kNotBinaryResponse: return "NotBinaryResponse";
    case ErrorCode::kNotConverged: return "NotConverged";
    case ErrorCode::kInvalidLevel: return "InvalidLevel";
    case ErrorCode::kNoComponents: return "NoComponents";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kRuleConflict: return "RuleConflict";
    case ErrorCode::kNoSubjects: return "NoSubjects";
    case ErrorCode::kConfig: return "Config";
  }
  return "Unknown";
}

// ---- VariableSpec ---------------------------------------------------------

int32_t VariableSpec::CategoryIndex(std::string_view label) const {
  for (size_t i = 0; i < categories.size(); ++i) {
    if (categories[i] == label) return static_cast<int32_t>(i);
  }
  return -1;
}

std::optional<int32_t> VariableSpec::MissingCode() const {
  if (!missing_allowed) return std::nullopt;
  if (is_integer()) return kMissingInteger;
  int32_t idx = CategoryIndex(missing_label);
  if (idx < 0) return std::nullopt;
  return idx;
}

bool VariableSpec::IsMissing(int32_t code) const {
  if (is_integer()) return code == kMissingInteger;
  auto m = MissingCode();
  return m.has_value() && *m == code;
}

std::string VariableSpec::Format(int32_t code) const {
  if (is_categorical()) return categories.at(static_cast<size_t>(code));
  if (code == kMissingInteger) return missing_label;
  return std::to_string(code);
}

VariableSpec VariableSpec::Categorical(std::string name,
                                       std::vector<std::string> categories,
                                       bool missing_allowed) {
  VariableSpec v;
  v.name = std::move(name);
  v.kind = VariableKind::kCategorical;
  v.categories = std::move(categories);
  v.missing_allowed = missing_allowed;
  return v;
}

VariableSpec VariableSpec::Integer(std::string name, int32_t min, int32_t max,
                                   bool missing_allowed) {
  VariableSpec v;
  v.name = std::move(name);
  v.kind = VariableKind::kInteger;
  v.min = min;
  v.max = max;
  v.missing_allowed = missing_allowed;
  return v;
}

// ---- Schema ---------------------------------------------------------------

Schema::Schema(std::string dataset_name, std::vector<VariableSpec> variables)
    : dataset_name_(std::move(dataset_name)), variables_(std::move(variables)) {
  if (variables_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "schema has no variables");
  }
  std::unordered_set<std::string> seen;
  for (VariableSpec& v : variables_) {
    if (v.name.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "variable with empty name");
    }
    if (!seen.insert(v.name).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate variable name \"" + v.name + "\"");
    }
    if (v.is_categorical()) {
      std::unordered_set<std::string> cats;
      for (const std::string& c : v.categories) {
        if (!cats.insert(c).second) {
          throw Error(ErrorCode::kInvalidArgument,
                      "duplicate category \"" + c + "\" in " + v.name);
        }
      }
      bool has_label = cats.count(v.missing_label) > 0;
      if (v.missing_allowed && !has_label) v.categories.push_back(v.missing_label);
      if (has_label) v.missing_allowed = true;
      if (v.categories.empty()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "categorical variable " + v.name + " has no categories");
      }
    } else if (v.min > v.max) {
      throw Error(ErrorCode::kInvalidArgument,
                  "integer variable " + v.name + " has min > max");
    }
  }
}

std::optional<size_t> Schema::Find(std::string_view name) const {
  for (size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return i;
  }
  return std::nullopt;
}

size_t Schema::IndexOf(std::string_view name) const {
  auto idx = Find(name);
  if (!idx) {
    throw Error(ErrorCode::kUnknownVariable,
                "no variable named \"" + std::string(name) + "\"");
  }
  return *idx;
}

std::vector<std::string> Schema::names() const {
  std::vector<std::string> out;
  out.reserve(variables_.size());
  for (const auto& v : variables_) out.push_back(v.name);
  return out;
}

bool Schema::SameLayout(const Schema& other) const {
  if (variables_.size() != other.variables_.size()) return false;
  for (size_t i = 0; i < variables_.size(); ++i) {
    const VariableSpec& a = variables_[i];
    const VariableSpec& b = other.variables_[i];
    if (a.name != b.name || a.kind != b.kind ||
        a.missing_allowed != b.missing_allowed ||
        a.missing_label != b.missing_label) {
      return false;
    }
    if (a.is_categorical() && a.categories != b.categories) return false;
    if (a.is_integer() && (a.min != b.min || a.max != b.max)) return false;
  }
  return true;
}

// ---- Dataset --------------------------------------------------------------

Dataset::Dataset(std::shared_ptr<const Schema> schema,
                 std::vector<std::vector<int32_t>> columns)
    : schema_(std::move(schema)), columns_(std::move(columns)) {
  if (!schema_) throw Error(ErrorCode::kInvalidArgument, "null schema");
  if (columns_.size() != schema_->size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "column count does not match schema");
  }
  n_rows_ = columns_.front().size();
  for (size_t c = 0; c < columns_.size(); ++c) {
    const VariableSpec& var = schema_->variable(c);
    if (columns_[c].size() != n_rows_) {
      throw Error(ErrorCode::kInvalidArgument,
                  "column " + var.name + " has a different length");
    }
    for (int32_t code : columns_[c]) {
      bool ok;
      if (var.is_categorical()) {
        ok = code >= 0 && static_cast<size_t>(code) < var.categories.size();
      } else if (code == kMissingInteger) {
        ok = var.missing_allowed;
      } else {
        ok = code >= var.min && code <= var.max;
      }
      if (!ok) {
        throw Error(ErrorCode::kInvalidArgument,
                    "invalid cell code " + std::to_string(code) +
                        " in column " + var.name);
      }
    }
  }
}

Dataset Dataset::SelectRows(std::span<const size_t> rows) const {
  std::vector<std::vector<int32_t>> cols(columns_.size());
  for (size_t c = 0; c < columns_.size(); ++c) {
    cols[c].reserve(rows.size());
    for (size_t r : rows) cols[c].push_back(columns_[c].at(r));
  }
  return Dataset(schema_, std::move(cols));
}

void RequireSameSchema(const Dataset& a, const Dataset& b) {
  if (a.schema_ptr() == b.schema_ptr()) return;
  if (!a.schema().SameLayout(b.schema())) {
    throw Error(ErrorCode::kSchemaMismatch,
                "datasets do not share a schema layout");
  }
}

Dataset ConcatRows(const Dataset& a, const Dataset& b) {
  RequireSameSchema(a, b);
  std::vector<std::vector<int32_t>> cols(a.n_cols());
  for (size_t c = 0; c < a.n_cols(); ++c) {
    auto ca = a.column(c);
    auto cb = b.column(c);
    cols[c].reserve(ca.size() + cb.size());
    cols[c].insert(cols[c].end(), ca.begin(), ca.end());
    cols[c].insert(cols[c].end(), cb.begin(), cb.end());
  }
  return Dataset(a.schema_ptr(), std::move(cols));
}

// ---- schema JSON ----------------------------------------------------------

namespace {

using nlohmann::json;

std::string JsonScalarText(const json& j, const std::string& path) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<int64_t>());
  throw Error(ErrorCode::kConfig, path + ": expected string or integer");
}

template <typename T>
T Field(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) {
    throw Error(ErrorCode::kConfig, path + "." + key + ": missing");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kConfig, path + "." + key + ": wrong type");
  }
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Schema ParseSchemaJson(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfig, std::string("schema: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::kConfig, "schema: not an object");
  std::string name = doc.value("dataset_name", std::string("dataset"));
  if (!doc.contains("variables") || !doc["variables"].is_array()) {
    throw Error(ErrorCode::kConfig, "schema.variables: missing or not a list");
  }
  std::vector<VariableSpec> vars;
  const json& list = doc["variables"];
  for (size_t i = 0; i < list.size(); ++i) {
    const std::string path = "schema.variables[" + std::to_string(i) + "]";
    const json& item = list[i];
    if (!item.is_object()) throw Error(ErrorCode::kConfig, path + ": not an object");
    VariableSpec v;
    v.name = Field<std::string>(item, "name", path);
    std::string kind = Field<std::string>(item, "kind", path);
    v.missing_allowed = item.value("missing", false);
    v.missing_label = item.value("missing_label", std::string("NA"));
    if (kind == "categorical") {
      v.kind = VariableKind::kCategorical;
      if (!item.contains("categories") || !item["categories"].is_array()) {
        throw Error(ErrorCode::kConfig, path + ".categories: missing or not a list");
      }
      for (size_t k = 0; k < item["categories"].size(); ++k) {
        v.categories.push_back(JsonScalarText(
            item["categories"][k], path + ".categories[" + std::to_string(k) + "]"));
      }
    } else if (kind == "integer") {
      v.kind = VariableKind::kInteger;
      v.min = Field<int32_t>(item, "min", path);
      v.max = Field<int32_t>(item, "max", path);
    } else {
      throw Error(ErrorCode::kConfig,
                  path + ".kind: expected \"categorical\" or \"integer\"");
    }
    vars.push_back(std::move(v));
  }
  try {
    return Schema(std::move(name), std::move(vars));
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, std::string("schema: ") + e.what());
  }
}

std::string SchemaToJson(const Schema& schema) {
  nlohmann::ordered_json doc;
  doc["dataset_name"] = schema.dataset_name();
  doc["variables"] = nlohmann::ordered_json::array();
  for (const VariableSpec& v : schema.variables()) {
    nlohmann::ordered_json item;
    item["name"] = v.name;
    if (v.is_categorical()) {
      item["kind"] = "categorical";
      item["categories"] = v.categories;
    } else {
      item["kind"] = "integer";
      item["min"] = v.min;
      item["max"] = v.max;
    }
    item["missing"] = v.missing_allowed;
    if (v.missing_label != "NA") item["missing_label"] = v.missing_label;
    doc["variables"].push_back(std::move(item));
  }
  return doc.dump(2) + "\n";
}

Schema LoadSchemaFile(const std::string& path) {
  return ParseSchemaJson(ReadFile(path));
}

void SaveSchemaFile(const Schema& schema, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << SchemaToJson(schema);
}

// ---- CSV ------------------------------------------------------------------

bool CsvReader::Next(std::vector<std::string>& record) {
  record.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  bool field_quoted = false;
  int ch;
  while ((ch = in_.get()) != std::char_traits<char>::eof()) {
    any = true;
    char c = static_cast<char>(ch);
    if (in_quotes) {
      if (c == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && field.empty() && !field_quoted) {
      in_quotes = true;
      field_quoted = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      field_quoted = false;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && in_.peek() == '\n') in_.get();
      record.push_back(std::move(field));
      ++record_number_;
      return true;
    } else {
      field.push_back(c);
    }
  }
  if (!any) return false;
  record.push_back(std::move(field));
  ++record_number_;
  return true;
}

std::string CsvEscape(std::string_view field) {
  bool needs = field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

namespace {

std::optional<int32_t> ParseInt(std::string_view s) {
  int32_t value = 0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value, 10);
  if (ec != std::errc() || ptr != end || begin == end) return std::nullopt;
  if (value == kMissingInteger) return std::nullopt;
  return value;
}

}  // namespace

Dataset ReadCsv(std::istream& in, std::shared_ptr<const Schema> schema) {
  CsvReader reader(in);
  std::vector<std::string> header;
  if (!reader.Next(header)) throw Error(ErrorCode::kEmptyData, "no header row");
  std::unordered_map<std::string, size_t> position;
  for (size_t i = 0; i < header.size(); ++i) position.emplace(header[i], i);

  const Schema& s = *schema;
  std::vector<size_t> source(s.size());
  for (size_t v = 0; v < s.size(); ++v) {
    auto it = position.find(s.variable(v).name);
    if (it == position.end()) {
      throw Error(ErrorCode::kMissingColumn,
                  "column \"" + s.variable(v).name + "\" not in header");
    }
    source[v] = it->second;
  }

  std::vector<std::vector<int32_t>> cols(s.size());
  std::vector<std::string> record;
  while (reader.Next(record)) {
    const int64_t row = reader.record_number();
    if (record.size() != header.size()) {
      throw CellError(ErrorCode::kParseError, row, "", "",
                      "expected " + std::to_string(header.size()) +
                          " fields, found " + std::to_string(record.size()));
    }
    for (size_t v = 0; v < s.size(); ++v) {
      const VariableSpec& var = s.variable(v);
      const std::string& raw = record[source[v]];
      const bool is_missing = raw.empty() || raw == var.missing_label;
      if (var.is_categorical()) {
        int32_t idx = is_missing && var.MissingCode() ? *var.MissingCode()
                                                      : var.CategoryIndex(raw);
        if (idx < 0) {
          throw CellError(ErrorCode::kCategoryUnknown, row, var.name, raw);
        }
        cols[v].push_back(idx);
      } else if (is_missing) {
        if (!var.missing_allowed) {
          throw CellError(ErrorCode::kParseError, row, var.name, raw,
                          "missing value not permitted");
        }
        cols[v].push_back(kMissingInteger);
      } else {
        auto value = ParseInt(raw);
        if (!value) {
          throw CellError(ErrorCode::kParseError, row, var.name, raw,
                          "not a base-10 integer");
        }
        if (*value < var.min || *value > var.max) {
          throw CellError(ErrorCode::kParseError, row, var.name, raw,
                          "outside [" + std::to_string(var.min) + "," +
                              std::to_string(var.max) + "]");
        }
        cols[v].push_back(*value);
      }
    }
  }
  return Dataset(std::move(schema), std::move(cols));
}

Dataset LoadCsv(const std::string& path, std::shared_ptr<const Schema> schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return ReadCsv(in, std::move(schema));
}

void WriteCsv(std::ostream& out, const Dataset& ds) {
  const Schema& s = ds.schema();
  for (size_t v = 0; v < s.size(); ++v) {
    if (v) out << ',';
    out << CsvEscape(s.variable(v).name);
  }
  out << '\n';
  for (size_t r = 0; r < ds.n_rows(); ++r) {
    for (size_t v = 0; v < s.size(); ++v) {
      if (v) out << ',';
      out << CsvEscape(s.variable(v).Format(ds.at(r, v)));
    }
    out << '\n';
  }
}

void SaveCsv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  WriteCsv(out, ds);
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

std::string ToCsvString(const Dataset& ds) {
  std::ostringstream out;
  WriteCsv(out, ds);
  return out.str();
}

Schema InferSchema(std::istream& in, const std::set<std::string>& integer_hints,
                   std::string dataset_name) {
  CsvReader reader(in);
  std::vector<std::string> header;
  if (!reader.Next(header)) throw Error(ErrorCode::kEmptyData, "no header row");
  const size_t m = header.size();
  std::vector<std::set<std::string>> distinct(m);
  std::vector<int32_t> lo(m, std::numeric_limits<int32_t>::max());
  std::vector<int32_t> hi(m, std::numeric_limits<int32_t>::min());
  std::vector<bool> has_missing(m, false);
  std::vector<bool> hinted(m);
  for (size_t c = 0; c < m; ++c) hinted[c] = integer_hints.count(header[c]) > 0;

  std::vector<std::string> record;
  int64_t rows = 0;
  while (reader.Next(record)) {
    const int64_t row = reader.record_number();
    if (record.size() != m) {
      throw CellError(ErrorCode::kParseError, row, "", "",
                      "expected " + std::to_string(m) + " fields");
    }
    ++rows;
    for (size_t c = 0; c < m; ++c) {
      const std::string& raw = record[c];
      if (hinted[c]) {
        if (raw.empty() || raw == "NA") {
          has_missing[c] = true;
          continue;
        }
        auto value = ParseInt(raw);
        if (!value) {
          throw CellError(ErrorCode::kParseError, row, header[c], raw,
                          "not a base-10 integer");
        }
        lo[c] = std::min(lo[c], *value);
        hi[c] = std::max(hi[c], *value);
      } else {
        distinct[c].insert(raw.empty() ? std::string("NA") : raw);
      }
    }
  }
  if (rows == 0) throw Error(ErrorCode::kEmptyData, "no data rows");

  std::vector<VariableSpec> vars;
  for (size_t c = 0; c < m; ++c) {
    if (hinted[c]) {
      if (lo[c] > hi[c]) lo[c] = hi[c] = 0;
      vars.push_back(VariableSpec::Integer(header[c], lo[c], hi[c], has_missing[c]));
    } else {
      std::vector<std::string> cats(distinct[c].begin(), distinct[c].end());
      vars.push_back(VariableSpec::Categorical(header[c], std::move(cats)));
    }
  }
  return Schema(std::move(dataset_name), std::move(vars));
}

Schema InferSchemaFile(const std::string& path,
                       const std::set<std::string>& integer_hints) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::string stem = path;
  if (auto slash = stem.find_last_of('/'); slash != std::string::npos) {
    stem = stem.substr(slash + 1);
  }
  if (auto dot = stem.find_last_of('.'); dot != std::string::npos && dot > 0) {
    stem = stem.substr(0, dot);
  }
  return InferSchema(in, integer_hints, stem);
}

// ---- contingency tables ---------------------------------------------------

namespace {

int32_t BinCount(const VariableSpec& var, const BinPolicy& bins) {
  return (var.max - var.min) / bins.width + 1;
}

}  // namespace

int32_t LevelCode(const VariableSpec& var, const BinPolicy& bins, int32_t raw) {
  if (var.is_categorical()) return raw;
  if (raw == kMissingInteger) return BinCount(var, bins);
  return (raw - var.min) / bins.width;
}

int64_t LevelCount(const VariableSpec& var, const BinPolicy& bins) {
  if (var.is_categorical()) return static_cast<int64_t>(var.categories.size());
  return BinCount(var, bins) + (var.missing_allowed ? 1 : 0);
}

std::string LevelLabel(const VariableSpec& var, const BinPolicy& bins,
                       int32_t level) {
  if (var.is_categorical()) return var.categories.at(static_cast<size_t>(level));
  if (level == BinCount(var, bins)) return var.missing_label;
  int64_t lo = static_cast<int64_t>(var.min) + int64_t{level} * bins.width;
  return "[" + std::to_string(lo) + "," + std::to_string(lo + bins.width) + ")";
}

int64_t ContingencyTable::cell_space() const {
  int64_t n = 1;
  for (int64_t k : level_counts) n *= k;
  return n;
}

ContingencyTable Crosstab(const Dataset& ds,
                          const std::vector<std::string>& vars,
                          const BinPolicy& bins) {
  if (vars.empty() || vars.size() > 2) {
    throw Error(ErrorCode::kInvalidArgument, "crosstab takes 1 or 2 variables");
  }
  if (bins.width < 1) {
    throw Error(ErrorCode::kInvalidArgument, "bin width must be positive");
  }
  ContingencyTable table;
  table.variables = vars;
  std::vector<size_t> idx;
  for (const std::string& name : vars) {
    idx.push_back(ds.schema().IndexOf(name));
    table.level_counts.push_back(LevelCount(ds.schema().variable(idx.back()), bins));
  }
  ContingencyTable::Cell cell(vars.size());
  for (size_t r = 0; r < ds.n_rows(); ++r) {
    for (size_t k = 0; k < idx.size(); ++k) {
      cell[k] = LevelCode(ds.schema().variable(idx[k]), bins, ds.at(r, idx[k]));
    }
    ++table.cells[cell];
  }
  table.total = static_cast<int64_t>(ds.n_rows());
  return table;
}

}  // namespace rutk
