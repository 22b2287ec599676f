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

#ifndef RUTK_TABULAR_H_
#define RUTK_TABULAR_H_

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rutk {

enum class VariableKind { kCategorical, kInteger };

// Sentinel stored in integer columns for a missing cell.
inline constexpr int32_t kMissingInteger = std::numeric_limits<int32_t>::min();

struct VariableSpec {
  std::string name;
  VariableKind kind = VariableKind::kCategorical;
  // Categorical only. When missing values are permitted the list contains
  // `missing_label`, which is then an ordinary level.
  std::vector<std::string> categories;
  // Integer only.
  int32_t min = 0;
  int32_t max = 0;
  bool missing_allowed = false;
  std::string missing_label = "NA";

  bool is_categorical() const { return kind == VariableKind::kCategorical; }
  bool is_integer() const { return kind == VariableKind::kInteger; }

  // -1 when the label is not a category.
  int32_t CategoryIndex(std::string_view label) const;
  // Stored code that represents "missing", if missing is permitted.
  std::optional<int32_t> MissingCode() const;
  bool IsMissing(int32_t code) const;
  // Text form of a stored code.
  std::string Format(int32_t code) const;

  static VariableSpec Categorical(std::string name,
                                  std::vector<std::string> categories,
                                  bool missing_allowed = false);
  static VariableSpec Integer(std::string name, int32_t min, int32_t max,
                              bool missing_allowed = false);
};

class Schema {
 public:
  Schema(std::string dataset_name, std::vector<VariableSpec> variables);

  const std::string& dataset_name() const { return dataset_name_; }
  const std::vector<VariableSpec>& variables() const { return variables_; }
  size_t size() const { return variables_.size(); }
  const VariableSpec& variable(size_t i) const { return variables_.at(i); }
  const VariableSpec& variable(std::string_view name) const {
    return variables_[IndexOf(name)];
  }

  std::optional<size_t> Find(std::string_view name) const;
  // Throws kUnknownVariable.
  size_t IndexOf(std::string_view name) const;
  std::vector<std::string> names() const;

  // Structural equality; the dataset name is not compared.
  bool SameLayout(const Schema& other) const;

 private:
  std::string dataset_name_;
  std::vector<VariableSpec> variables_;
};

// Immutable column store. Categorical cells hold a category index, integer
// cells hold the value or kMissingInteger.
class Dataset {
 public:
  Dataset(std::shared_ptr<const Schema> schema,
          std::vector<std::vector<int32_t>> columns);

  const Schema& schema() const { return *schema_; }
  const std::shared_ptr<const Schema>& schema_ptr() const { return schema_; }
  size_t n_rows() const { return n_rows_; }
  size_t n_cols() const { return columns_.size(); }

  std::span<const int32_t> column(size_t i) const { return columns_.at(i); }
  std::span<const int32_t> column(std::string_view name) const {
    return columns_[schema_->IndexOf(name)];
  }
  int32_t at(size_t row, size_t col) const { return columns_[col][row]; }

  // New dataset holding the given rows, in order (repeats allowed).
  Dataset SelectRows(std::span<const size_t> rows) const;

 private:
  std::shared_ptr<const Schema> schema_;
  std::vector<std::vector<int32_t>> columns_;
  size_t n_rows_ = 0;
};

// Throws kSchemaMismatch unless both datasets have the same layout.
void RequireSameSchema(const Dataset& a, const Dataset& b);

// Appends the rows of `b` below `a`.
Dataset ConcatRows(const Dataset& a, const Dataset& b);

// ---- schema files --------------------------------------------------------

Schema ParseSchemaJson(std::string_view text);
std::string SchemaToJson(const Schema& schema);
Schema LoadSchemaFile(const std::string& path);
void SaveSchemaFile(const Schema& schema, const std::string& path);

// ---- CSV -----------------------------------------------------------------

// Minimal RFC-4180 reader: comma separated, '"' quoting with "" escapes,
// quoted fields may contain separators and line breaks. CRLF tolerated.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}
  // False at end of input.
  bool Next(std::vector<std::string>& record);
  // 1-based number of the record returned by the last Next().
  int64_t record_number() const { return record_number_; }

 private:
  std::istream& in_;
  int64_t record_number_ = 0;
};

std::string CsvEscape(std::string_view field);

Dataset ReadCsv(std::istream& in, std::shared_ptr<const Schema> schema);
Dataset LoadCsv(const std::string& path, std::shared_ptr<const Schema> schema);
void WriteCsv(std::ostream& out, const Dataset& ds);
void SaveCsv(const Dataset& ds, const std::string& path);
std::string ToCsvString(const Dataset& ds);

// Columns named in `integer_hints` become integer variables with the
// observed range; every other column becomes categorical with its distinct
// values sorted lexicographically. Empty cells read as missing.
Schema InferSchema(std::istream& in, const std::set<std::string>& integer_hints,
                   std::string dataset_name = "dataset");
Schema InferSchemaFile(const std::string& path,
                       const std::set<std::string>& integer_hints);

// ---- contingency tables -------------------------------------------------

// Fixed-width bins anchored at the variable's schema minimum.
struct BinPolicy {
  int32_t width = 5;
};

// Level code of a cell for crosstab purposes: the category index for
// categorical variables, the bin index for integer variables, with missing
// integers mapped to one extra trailing level.
int32_t LevelCode(const VariableSpec& var, const BinPolicy& bins, int32_t raw);
int64_t LevelCount(const VariableSpec& var, const BinPolicy& bins);
std::string LevelLabel(const VariableSpec& var, const BinPolicy& bins,
                       int32_t level);

struct ContingencyTable {
  using Cell = std::vector<int32_t>;

  std::vector<std::string> variables;
  // Size of each variable's level space.
  std::vector<int64_t> level_counts;
  // Only positive counts are stored.
  std::map<Cell, int64_t> cells;
  int64_t total = 0;

  int64_t count(const Cell& cell) const {
    auto it = cells.find(cell);
    return it == cells.end() ? 0 : it->second;
  }
  int64_t cell_space() const;
};

ContingencyTable Crosstab(const Dataset& ds,
                          const std::vector<std::string>& vars,
                          const BinPolicy& bins = {});

}  // namespace rutk

#endif  // RUTK_TABULAR_H_
