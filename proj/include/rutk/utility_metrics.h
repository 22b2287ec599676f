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

#ifndef RUTK_UTILITY_METRICS_H_
#define RUTK_UTILITY_METRICS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rutk/regress.h"
#include "rutk/tabular.h"

namespace rutk {

// ---- ratio of estimates -----------------------------------------------

struct RoeResult {
  std::vector<std::string> variables;
  // min/max count ratio for every cell observed in either table.
  std::map<ContingencyTable::Cell, double> per_category;
  double mean = 0;
  // Cells of the category space that are empty in both tables.
  int64_t skipped_cells = 0;
};

// Counts are the estimates. A cell empty in exactly one table scores 0;
// cells empty in both are skipped.
RoeResult Roe(const ContingencyTable& orig, const ContingencyTable& synth);

struct RoeSuiteResult {
  double roe_uni = 0;
  double roe_bi = 0;
  std::vector<double> univariate;  // schema order
  size_t n_bivariate = 0;
};

RoeSuiteResult RoeSuite(const Dataset& orig, const Dataset& synth,
                        const BinPolicy& bins = {});

// ---- propensity score mean squared error -------------------------------

struct PmseResult {
  double pmse = 0;
  // Share of the stacked data that is synthetic.
  double c = 0;
  // Number of propensity-model parameters, intercept included.
  int64_t k = 0;
  int64_t n = 0;
  // Null expectation (k-1)(1-c)^2 c / N.
  double expected_null = 0;
  double ratio = 0;
  double log_ratio = 0;
  // 1 - 4 pMSE.
  double scaled = 0;
  bool model_converged = false;
  bool separation_detected = false;
};

// Main-effects logistic propensity model on the stacked data
// (indicator 1 = synthetic).
PmseResult Pmse(const Dataset& orig, const Dataset& synth,
                const LogisticOptions& opts = {});

// ---- confidence interval overlap ---------------------------------------

// Average of the intersection length relative to each interval's length.
// Disjoint intervals give a negative value.
double IntervalOverlap(const Interval& orig, const Interval& synth);

struct CioModel {
  std::string target;
  std::string family;  // "linear" or "logistic"
  std::string response;  // e.g. "AGE", "SEX=2", "AREAP=7"
  double mean_cio = 0;
  double std_diff = 0;
  size_t n_coefficients = 0;
  bool converged = false;
  std::string failure;
};

struct CioOptions {
  double level = 0.95;
  bool floor_at_zero = false;
  LogisticOptions logistic;
};

struct CioResult {
  std::vector<CioModel> per_model;
  // Means over usable models; empty when every model failed.
  std::optional<double> mean_cio;
  std::optional<double> mean_std_diff;
  size_t n_failed = 0;
};

// One regression per variable, fit separately on the original and the
// synthetic data with shared design conventions: integer variables by OLS,
// two-category variables by logistic regression on the second category, and
// other categorical variables by logistic regression on the original's
// modal category. Intercepts do not enter the means.
CioResult CioSuite(const Dataset& orig, const Dataset& synth,
                   const CioOptions& opts = {});

// ---- aggregate -----------------------------------------------------------

// Unweighted mean of the present components; throws kNoComponents when none
// is present.
double OverallUtility(std::optional<double> roe_uni, std::optional<double> roe_bi,
                      std::optional<double> cio_mean,
                      std::optional<double> pmse_scaled);

struct UtilityOptions {
  BinPolicy bins;
  CioOptions cio;
  LogisticOptions propensity;
};

struct UtilityReport {
  double roe_uni = 0;
  double roe_bi = 0;
  PmseResult pmse;
  CioResult cio;
  double overall = 0;
  std::vector<std::string> components_used;
};

UtilityReport EvaluateUtility(const Dataset& orig, const Dataset& synth,
                              const UtilityOptions& opts = {});

}  // namespace rutk

#endif  // RUTK_UTILITY_METRICS_H_
