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

#ifndef RUTK_ERROR_H_
#define RUTK_ERROR_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace rutk {

enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kMissingColumn,
  kParseError,
  kCategoryUnknown,
  kEmptyData,
  kUnknownVariable,
  kSchemaMismatch,
  kTableMismatch,
  kRankDeficient,
  kNotBinaryResponse,
  kNotConverged,
  kInvalidLevel,
  kNoComponents,
  kEmptyDataset,
  kRuleConflict,
  kNoSubjects,
  kConfig,
};

const char* ErrorCodeName(ErrorCode code);

// All library failures are reported as rutk::Error (or a subclass).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// A CSV cell that could not be interpreted. `row` is the 1-based record
// number in the file, counting the header as record 1.
class CellError : public Error {
 public:
  CellError(ErrorCode code, int64_t row, std::string column, std::string value,
            const std::string& detail = "")
      : Error(code, Describe(row, column, value, detail)),
        row_(row),
        column_(std::move(column)),
        value_(std::move(value)) {}

  int64_t row() const { return row_; }
  const std::string& column() const { return column_; }
  const std::string& value() const { return value_; }

 private:
  static std::string Describe(int64_t row, const std::string& column,
                              const std::string& value,
                              const std::string& detail) {
    std::string out = "row " + std::to_string(row) + ", column \"" + column +
                      "\", value \"" + value + "\"";
    if (!detail.empty()) out += " (" + detail + ")";
    return out;
  }

  int64_t row_;
  std::string column_;
  std::string value_;
};

}  // namespace rutk

#endif  // RUTK_ERROR_H_
