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

#ifndef RUTK_SYNTH_BASELINE_H_
#define RUTK_SYNTH_BASELINE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rutk/cart.h"
#include "rutk/tabular.h"

namespace rutk {

// ---- data rules -----------------------------------------------------------

struct RuleAtom {
  enum class Op { kEq, kLe, kGe };

  std::string variable;
  Op op = Op::kEq;
  // Category label, or decimal text for integer variables.
  std::string value;
};

// If every condition holds, `then_variable` must equal `then_value`.
// Ordered comparisons on categorical variables use category order.
struct DataRule {
  std::vector<RuleAtom> conditions;
  std::string then_variable;
  std::string then_value;
};

std::vector<DataRule> ParseRulesJson(std::string_view text);
std::vector<DataRule> LoadRulesFile(const std::string& path);

// Throws kUnknownVariable / kInvalidArgument for rules that do not fit the
// schema.
void ValidateRules(const Schema& schema, const std::vector<DataRule>& rules);

// Number of (row, rule) pairs where the condition holds but the
// consequence does not.
int64_t CountRuleViolations(const Dataset& ds, const std::vector<DataRule>& rules);

// Overwrites consequences until no rule is violated. Throws kRuleConflict when
// two rules demand different values for one cell.
Dataset ApplyRules(const Dataset& ds, const std::vector<DataRule>& rules);

// ---- synthesizers ---------------------------------------------------------

// Every variable drawn independently from its original marginal. Draws are
// taken variable by variable in schema order, row by row.
Dataset SynthMarginal(const Dataset& orig, size_t n, uint64_t seed);

enum class OrderPolicy { kCategoryCount, kAsGiven };

// kCategoryCount sorts ascending by number of categories (integer variables
// count their observed distinct values), stable in schema order. `first`, if
// given, is moved to the front.
std::vector<std::string> OrderVariables(const Dataset& ds, OrderPolicy policy,
                                        const std::optional<std::string>& first);

struct SequentialSynthesis {
  Dataset data;
  std::vector<std::string> order;
  // Rule violations before enforcement.
  int64_t violations_before = 0;
  // Variables whose tree was a single leaf because the response is constant.
  std::vector<std::string> constant_responses;
};

// Sequential CART synthesis. The first variable in `order` is sampled with
// replacement from the original; each later variable is drawn from the
// donor pool of the leaf its synthetic predecessors route to, using a tree
// fit on the original data. Random draws: n for the first variable, then n
// per later variable, row by row, from one seeded generator.
SequentialSynthesis SynthCartSequential(const Dataset& orig,
                                        const std::vector<std::string>& order,
                                        const std::vector<DataRule>& rules,
                                        const CartParams& params, size_t n,
                                        uint64_t seed);

}  // namespace rutk

#endif  // RUTK_SYNTH_BASELINE_H_
