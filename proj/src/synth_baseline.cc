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

#include "rutk/synth_baseline.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rutk/error.h"
#include "rutk/random.h"

namespace rutk {

// ---- rules ----------------------------------------------------------------

namespace {

std::string ScalarText(const nlohmann::json& j, const std::string& path) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<int64_t>());
  throw Error(ErrorCode::kConfig, path + ": expected a string or integer");
}

std::string RequireString(const nlohmann::json& obj, const char* key,
                          const std::string& path) {
  if (!obj.is_object() || !obj.contains(key) || !obj[key].is_string()) {
    throw Error(ErrorCode::kConfig, path + "." + key + ": expected a string");
  }
  return obj[key].get<std::string>();
}

struct CompiledAtom {
  size_t variable;
  RuleAtom::Op op;
  int32_t code;
};

struct CompiledRule {
  std::vector<CompiledAtom> conditions;
  size_t then_variable;
  int32_t then_code;
};

int32_t ResolveValue(const VariableSpec& var, const std::string& value) {
  if (var.is_categorical()) {
    const int32_t idx = var.CategoryIndex(value);
    if (idx < 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "rule value \"" + value + "\" is not a category of " + var.name);
    }
    return idx;
  }
  int32_t v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "rule value \"" + value + "\" is not an integer for " + var.name);
  }
  return v;
}

std::vector<CompiledRule> Compile(const Schema& schema,
                                  const std::vector<DataRule>& rules) {
  std::vector<CompiledRule> out;
  for (const DataRule& rule : rules) {
    CompiledRule c;
    c.then_variable = schema.IndexOf(rule.then_variable);
    const VariableSpec& then_var = schema.variable(c.then_variable);
    c.then_code = ResolveValue(then_var, rule.then_value);
    if (then_var.is_integer() && (c.then_code < then_var.min || c.then_code > then_var.max)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "rule consequence outside the range of " + then_var.name);
    }
    if (rule.conditions.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "rule without conditions");
    }
    for (const RuleAtom& atom : rule.conditions) {
      const size_t v = schema.IndexOf(atom.variable);
      if (v == c.then_variable) {
        throw Error(ErrorCode::kInvalidArgument,
                    "rule consequence " + rule.then_variable +
                        " also appears in its condition");
      }
      c.conditions.push_back({v, atom.op, ResolveValue(schema.variable(v), atom.value)});
    }
    out.push_back(std::move(c));
  }
  return out;
}

bool Holds(const CompiledRule& rule, const std::vector<std::vector<int32_t>>& cols,
           const Schema& schema, size_t row) {
  for (const CompiledAtom& a : rule.conditions) {
    const int32_t v = cols[a.variable][row];
    if (schema.variable(a.variable).is_integer() && v == kMissingInteger) return false;
    switch (a.op) {
      case RuleAtom::Op::kEq:
        if (v != a.code) return false;
        break;
      case RuleAtom::Op::kLe:
        if (v > a.code) return false;
        break;
      case RuleAtom::Op::kGe:
        if (v < a.code) return false;
        break;
    }
  }
  return true;
}

std::vector<std::vector<int32_t>> CopyColumns(const Dataset& ds) {
  std::vector<std::vector<int32_t>> cols(ds.n_cols());
  for (size_t c = 0; c < ds.n_cols(); ++c) {
    auto src = ds.column(c);
    cols[c].assign(src.begin(), src.end());
  }
  return cols;
}

int64_t CountViolations(const std::vector<CompiledRule>& rules,
                        const std::vector<std::vector<int32_t>>& cols,
                        const Schema& schema, size_t n_rows) {
  int64_t count = 0;
  for (size_t r = 0; r < n_rows; ++r) {
    for (const CompiledRule& rule : rules) {
      if (Holds(rule, cols, schema, r) && cols[rule.then_variable][r] != rule.then_code) {
        ++count;
      }
    }
  }
  return count;
}

}  // namespace

std::vector<DataRule> ParseRulesJson(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kConfig, std::string("rules: ") + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::kConfig, "rules: expected a list");
  std::vector<DataRule> rules;
  for (size_t i = 0; i < doc.size(); ++i) {
    const std::string path = "rules[" + std::to_string(i) + "]";
    const nlohmann::json& item = doc[i];
    if (!item.is_object() || !item.contains("if") || !item["if"].is_array()) {
      throw Error(ErrorCode::kConfig, path + ".if: expected a list");
    }
    DataRule rule;
    for (size_t k = 0; k < item["if"].size(); ++k) {
      const std::string apath = path + ".if[" + std::to_string(k) + "]";
      const nlohmann::json& a = item["if"][k];
      RuleAtom atom;
      atom.variable = RequireString(a, "var", apath);
      const std::string op = RequireString(a, "op", apath);
      if (op == "=" || op == "==") {
        atom.op = RuleAtom::Op::kEq;
      } else if (op == "<=") {
        atom.op = RuleAtom::Op::kLe;
      } else if (op == ">=") {
        atom.op = RuleAtom::Op::kGe;
      } else {
        throw Error(ErrorCode::kConfig, apath + ".op: expected \"=\", \"<=\" or \">=\"");
      }
      if (!a.contains("value")) throw Error(ErrorCode::kConfig, apath + ".value: missing");
      atom.value = ScalarText(a["value"], apath + ".value");
      rule.conditions.push_back(std::move(atom));
    }
    if (!item.contains("then")) throw Error(ErrorCode::kConfig, path + ".then: missing");
    const nlohmann::json& then = item["then"];
    rule.then_variable = RequireString(then, "var", path + ".then");
    if (!then.contains("value")) {
      throw Error(ErrorCode::kConfig, path + ".then.value: missing");
    }
    rule.then_value = ScalarText(then["value"], path + ".then.value");
    rules.push_back(std::move(rule));
  }
  return rules;
}

std::vector<DataRule> LoadRulesFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseRulesJson(ss.str());
}

void ValidateRules(const Schema& schema, const std::vector<DataRule>& rules) {
  Compile(schema, rules);
}

int64_t CountRuleViolations(const Dataset& ds, const std::vector<DataRule>& rules) {
  const auto compiled = Compile(ds.schema(), rules);
  return CountViolations(compiled, CopyColumns(ds), ds.schema(), ds.n_rows());
}

Dataset ApplyRules(const Dataset& ds, const std::vector<DataRule>& rules) {
  const auto compiled = Compile(ds.schema(), rules);
  auto cols = CopyColumns(ds);
  const Schema& schema = ds.schema();
  std::vector<std::pair<size_t, int32_t>> wanted;
  for (size_t pass = 0; pass <= compiled.size(); ++pass) {
    bool changed = false;
    for (size_t r = 0; r < ds.n_rows(); ++r) {
      wanted.clear();
      for (const CompiledRule& rule : compiled) {
        if (!Holds(rule, cols, schema, r)) continue;
        for (const auto& [var, code] : wanted) {
          if (var == rule.then_variable && code != rule.then_code) {
            throw Error(ErrorCode::kRuleConflict,
                        "rules assign different values to " +
                            schema.variable(var).name + " on row " +
                            std::to_string(r + 1));
          }
        }
        wanted.emplace_back(rule.then_variable, rule.then_code);
      }
      for (const auto& [var, code] : wanted) {
        if (cols[var][r] != code) {
          cols[var][r] = code;
          changed = true;
        }
      }
    }
    if (!changed) return Dataset(ds.schema_ptr(), std::move(cols));
  }
  throw Error(ErrorCode::kRuleConflict, "rules do not reach a consistent state");
}

// ---- synthesizers ---------------------------------------------------------

Dataset SynthMarginal(const Dataset& orig, size_t n, uint64_t seed) {
  if (orig.n_rows() == 0) {
    throw Error(ErrorCode::kEmptyDataset, "original dataset has no rows");
  }
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "n must be at least 1");
  Rng rng(seed);
  std::vector<std::vector<int32_t>> cols(orig.n_cols());
  for (size_t c = 0; c < orig.n_cols(); ++c) {
    auto src = orig.column(c);
    cols[c].resize(n);
    for (size_t r = 0; r < n; ++r) cols[c][r] = src[rng.UniformIndex(src.size())];
  }
  return Dataset(orig.schema_ptr(), std::move(cols));
}

std::vector<std::string> OrderVariables(const Dataset& ds, OrderPolicy policy,
                                        const std::optional<std::string>& first) {
  const Schema& schema = ds.schema();
  if (first) schema.IndexOf(*first);
  std::vector<size_t> idx(schema.size());
  std::iota(idx.begin(), idx.end(), size_t{0});
  if (policy == OrderPolicy::kCategoryCount) {
    std::vector<size_t> counts(schema.size());
    for (size_t v = 0; v < schema.size(); ++v) {
      const VariableSpec& var = schema.variable(v);
      if (var.is_categorical()) {
        counts[v] = var.categories.size();
      } else {
        auto col = ds.column(v);
        counts[v] = std::set<int32_t>(col.begin(), col.end()).size();
      }
    }
    std::stable_sort(idx.begin(), idx.end(),
                     [&](size_t a, size_t b) { return counts[a] < counts[b]; });
  }
  std::vector<std::string> out;
  if (first) out.push_back(*first);
  for (size_t v : idx) {
    if (first && schema.variable(v).name == *first) continue;
    out.push_back(schema.variable(v).name);
  }
  return out;
}

SequentialSynthesis SynthCartSequential(const Dataset& orig,
                                        const std::vector<std::string>& order,
                                        const std::vector<DataRule>& rules,
                                        const CartParams& params, size_t n,
                                        uint64_t seed) {
  const Schema& schema = orig.schema();
  if (orig.n_rows() == 0) {
    throw Error(ErrorCode::kEmptyDataset, "original dataset has no rows");
  }
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "n must be at least 1");
  {
    std::vector<std::string> sorted_order = order;
    std::vector<std::string> names = schema.names();
    std::sort(sorted_order.begin(), sorted_order.end());
    std::sort(names.begin(), names.end());
    if (sorted_order != names) {
      throw Error(ErrorCode::kInvalidArgument,
                  "synthesis order must be a permutation of the schema variables");
    }
  }
  ValidateRules(schema, rules);

  Rng rng(seed);
  std::vector<std::vector<int32_t>> cols(schema.size());
  SequentialSynthesis out{orig, order, 0, {}};

  const size_t first = schema.IndexOf(order.front());
  {
    auto src = orig.column(first);
    cols[first].resize(n);
    for (size_t r = 0; r < n; ++r) cols[first][r] = src[rng.UniformIndex(src.size())];
  }
  for (size_t step = 1; step < order.size(); ++step) {
    const std::vector<std::string> predictors(order.begin(),
                                              order.begin() + static_cast<long>(step));
    const CartModel tree = FitCart(orig, order[step], predictors, params);
    if (tree.response_constant) out.constant_responses.push_back(order[step]);
    const size_t v = tree.response_index;
    auto donor_values = orig.column(v);
    cols[v].resize(n);
    for (size_t r = 0; r < n; ++r) {
      const int32_t leaf = tree.FindLeaf([&](size_t var) { return cols[var][r]; });
      const std::vector<size_t>& pool = tree.leaf_pools[static_cast<size_t>(leaf)];
      cols[v][r] = donor_values[pool[rng.UniformIndex(pool.size())]];
    }
  }
  Dataset raw(orig.schema_ptr(), std::move(cols));
  out.violations_before = CountRuleViolations(raw, rules);
  out.data = rules.empty() ? std::move(raw) : ApplyRules(raw, rules);
  return out;
}

}  // namespace rutk
