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

#include "rutk/design.h"

#include <cmath>
#include <numeric>

namespace rutk {

size_t PredictorCoding::column_count() const {
  size_t n = 1;
  for (const Term& t : terms) {
    n += t.levels.empty() ? 1 + (t.missing_indicator ? 1 : 0) : t.levels.size();
  }
  return n;
}

namespace {

std::vector<bool> ObservedLevels(const RowSubset& s, size_t var) {
  const VariableSpec& spec = s.data->schema().variable(var);
  std::vector<bool> seen(spec.categories.size(), false);
  auto col = s.data->column(var);
  for (size_t r : s.rows) seen[static_cast<size_t>(col[r])] = true;
  return seen;
}

struct Moments {
  double mean = 0;
  double sd = 0;
  size_t count = 0;
  bool any_missing = false;
};

Moments IntegerMoments(const Dataset& ds, std::span<const size_t> rows,
                       size_t var) {
  Moments m;
  auto col = ds.column(var);
  double sum = 0;
  for (size_t r : rows) {
    if (col[r] == kMissingInteger) {
      m.any_missing = true;
      continue;
    }
    sum += col[r];
    ++m.count;
  }
  if (m.count == 0) return m;
  m.mean = sum / static_cast<double>(m.count);
  double ss = 0;
  for (size_t r : rows) {
    if (col[r] == kMissingInteger) continue;
    const double d = col[r] - m.mean;
    ss += d * d;
  }
  m.sd = m.count > 1 ? std::sqrt(ss / static_cast<double>(m.count - 1)) : 0.0;
  return m;
}

}  // namespace

PredictorCoding MakePredictorCoding(std::span<const RowSubset> subsets,
                                    std::optional<size_t> exclude) {
  if (subsets.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no data for predictor coding");
  }
  const Schema& schema = subsets.front().data->schema();
  PredictorCoding coding;
  for (size_t v = 0; v < schema.size(); ++v) {
    if (exclude && *exclude == v) continue;
    const VariableSpec& spec = schema.variable(v);
    PredictorCoding::Term term;
    term.variable = v;
    if (spec.is_categorical()) {
      std::vector<bool> common(spec.categories.size(), true);
      for (const RowSubset& s : subsets) {
        std::vector<bool> seen = ObservedLevels(s, v);
        for (size_t k = 0; k < common.size(); ++k) common[k] = common[k] && seen[k];
      }
      bool reference_taken = false;
      for (size_t k = 0; k < common.size(); ++k) {
        if (!common[k]) continue;
        if (!reference_taken) {
          reference_taken = true;
          continue;
        }
        term.levels.push_back(static_cast<int32_t>(k));
      }
      if (term.levels.empty()) {
        coding.warnings.push_back("DegenerateColumn(" + spec.name + ")");
        continue;
      }
    } else {
      bool all_missing_flag = true;
      bool degenerate = false;
      for (const RowSubset& s : subsets) {
        Moments m = IntegerMoments(*s.data, s.rows, v);
        if (!(m.sd > 0)) degenerate = true;
        all_missing_flag = all_missing_flag && m.any_missing;
      }
      if (degenerate) {
        coding.warnings.push_back("DegenerateColumn(" + spec.name + ")");
        continue;
      }
      term.missing_indicator = all_missing_flag;
    }
    coding.terms.push_back(std::move(term));
  }
  return coding;
}

DesignMatrix BuildPredictors(const Dataset& ds, std::span<const size_t> rows,
                             const PredictorCoding& coding) {
  const Schema& schema = ds.schema();
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index p = static_cast<Eigen::Index>(coding.column_count());
  DesignMatrix dm;
  dm.x.setZero(n, p);
  dm.x.col(0).setOnes();
  dm.names.push_back("(Intercept)");
  dm.indicator.push_back(false);
  dm.warnings = coding.warnings;

  Eigen::Index col = 1;
  for (const PredictorCoding::Term& term : coding.terms) {
    const VariableSpec& spec = schema.variable(term.variable);
    auto values = ds.column(term.variable);
    if (spec.is_categorical()) {
      for (int32_t level : term.levels) {
        for (Eigen::Index i = 0; i < n; ++i) {
          if (values[rows[static_cast<size_t>(i)]] == level) dm.x(i, col) = 1.0;
        }
        dm.names.push_back(spec.name + "=" + spec.categories[static_cast<size_t>(level)]);
        dm.indicator.push_back(true);
        ++col;
      }
      continue;
    }
    Moments m = IntegerMoments(ds, rows, term.variable);
    if (!(m.sd > 0)) {
      dm.warnings.push_back("DegenerateColumn(" + spec.name + ")");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const int32_t v = values[rows[static_cast<size_t>(i)]];
      if (v != kMissingInteger && m.sd > 0) dm.x(i, col) = (v - m.mean) / m.sd;
    }
    dm.names.push_back(spec.name);
    dm.indicator.push_back(false);
    ++col;
    if (term.missing_indicator) {
      for (Eigen::Index i = 0; i < n; ++i) {
        if (values[rows[static_cast<size_t>(i)]] == kMissingInteger) dm.x(i, col) = 1.0;
      }
      dm.names.push_back(spec.name + "=" + spec.missing_label);
      dm.indicator.push_back(true);
      ++col;
    }
  }
  return dm;
}

std::vector<size_t> ResponseRows(const Dataset& ds, size_t response) {
  std::vector<size_t> rows;
  rows.reserve(ds.n_rows());
  const VariableSpec& spec = ds.schema().variable(response);
  auto values = ds.column(response);
  for (size_t r = 0; r < ds.n_rows(); ++r) {
    if (spec.is_integer() && values[r] == kMissingInteger) continue;
    rows.push_back(r);
  }
  return rows;
}

DesignMatrix OneHotDesign(const Dataset& ds, std::string_view response,
                          const ResponseSpec& spec,
                          const PredictorCoding* coding) {
  const size_t resp = ds.schema().IndexOf(response);
  const VariableSpec& var = ds.schema().variable(resp);
  if (spec.kind == ResponseSpec::Kind::kIndicator &&
      (!var.is_categorical() || spec.category < 0 ||
       static_cast<size_t>(spec.category) >= var.categories.size())) {
    throw Error(ErrorCode::kInvalidArgument,
                "indicator response needs a valid category of " + var.name);
  }
  const std::vector<size_t> rows = ResponseRows(ds, resp);
  PredictorCoding own;
  if (coding == nullptr) {
    const RowSubset subset{&ds, rows};
    own = MakePredictorCoding(std::span(&subset, 1), resp);
    coding = &own;
  }
  DesignMatrix dm = BuildPredictors(ds, rows, *coding);
  auto values = ds.column(resp);
  dm.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    const int32_t v = values[rows[i]];
    dm.y[static_cast<Eigen::Index>(i)] =
        spec.kind == ResponseSpec::Kind::kNumeric
            ? static_cast<double>(v)
            : (v == spec.category ? 1.0 : 0.0);
  }
  return dm;
}

}  // namespace rutk
