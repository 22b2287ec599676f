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

#ifndef RUTK_DESIGN_H_
#define RUTK_DESIGN_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rutk/regress.h"
#include "rutk/tabular.h"

namespace rutk {

struct ResponseSpec {
  enum class Kind { kNumeric, kIndicator };

  Kind kind = Kind::kNumeric;
  // kIndicator: response is 1 where the cell equals this category index.
  int32_t category = 0;

  static ResponseSpec Numeric() { return {Kind::kNumeric, 0}; }
  static ResponseSpec Indicator(int32_t category) {
    return {Kind::kIndicator, category};
  }
};

// How predictor variables expand into design columns. Categorical
// predictors keep one indicator per retained level; the first observed level
// is the reference. Integer predictors enter standardized (sample sd), with
// an extra indicator when missing values are present.
struct PredictorCoding {
  struct Term {
    size_t variable = 0;
    std::vector<int32_t> levels;
    bool missing_indicator = false;
  };

  std::vector<Term> terms;
  std::vector<std::string> warnings;

  size_t column_count() const;
};

struct RowSubset {
  const Dataset* data = nullptr;
  std::span<const size_t> rows;
};

// Coding over every variable except `exclude`. A level is retained only if
// it is observed in every subset, which gives several datasets identical
// design conventions. Predictors with a single observed level (or zero
// variance) are dropped with a DegenerateColumn warning.
PredictorCoding MakePredictorCoding(std::span<const RowSubset> subsets,
                                    std::optional<size_t> exclude);

// Intercept plus the coded predictor columns for the given rows; `y` is left
// empty for the caller.
DesignMatrix BuildPredictors(const Dataset& ds, std::span<const size_t> rows,
                             const PredictorCoding& coding);

// Rows whose response can be used: all rows for a categorical response,
// non-missing rows for an integer response.
std::vector<size_t> ResponseRows(const Dataset& ds, size_t response);

// Design with `response` as y and all other variables as predictors. When
// `coding` is null one is derived from `ds` alone.
DesignMatrix OneHotDesign(const Dataset& ds, std::string_view response,
                          const ResponseSpec& spec,
                          const PredictorCoding* coding = nullptr);

}  // namespace rutk

#endif  // RUTK_DESIGN_H_
