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

#include "rutk/utility_metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rutk/design.h"
#include "rutk/error.h"

namespace rutk {

RoeResult Roe(const ContingencyTable& orig, const ContingencyTable& synth) {
  if (orig.variables != synth.variables || orig.level_counts != synth.level_counts) {
    throw Error(ErrorCode::kTableMismatch,
                "tables differ in variables or category spaces");
  }
  RoeResult result;
  result.variables = orig.variables;
  auto add = [&](const ContingencyTable::Cell& cell) {
    if (result.per_category.count(cell)) return;
    const double o = static_cast<double>(orig.count(cell));
    const double s = static_cast<double>(synth.count(cell));
    result.per_category.emplace(cell, std::min(o, s) / std::max(o, s));
  };
  for (const auto& [cell, count] : orig.cells) add(cell);
  for (const auto& [cell, count] : synth.cells) add(cell);
  if (result.per_category.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "both tables are empty");
  }
  double sum = 0;
  for (const auto& [cell, ratio] : result.per_category) sum += ratio;
  result.mean = sum / static_cast<double>(result.per_category.size());
  result.skipped_cells =
      orig.cell_space() - static_cast<int64_t>(result.per_category.size());
  return result;
}

RoeSuiteResult RoeSuite(const Dataset& orig, const Dataset& synth,
                        const BinPolicy& bins) {
  RequireSameSchema(orig, synth);
  const std::vector<std::string> names = orig.schema().names();
  RoeSuiteResult out;
  for (const std::string& v : names) {
    out.univariate.push_back(
        Roe(Crosstab(orig, {v}, bins), Crosstab(synth, {v}, bins)).mean);
  }
  out.roe_uni = std::accumulate(out.univariate.begin(), out.univariate.end(), 0.0) /
                static_cast<double>(names.size());
  double bi_sum = 0;
  for (size_t i = 0; i < names.size(); ++i) {
    for (size_t j = i + 1; j < names.size(); ++j) {
      const std::vector<std::string> pair = {names[i], names[j]};
      bi_sum += Roe(Crosstab(orig, pair, bins), Crosstab(synth, pair, bins)).mean;
      ++out.n_bivariate;
    }
  }
  out.roe_bi = out.n_bivariate ? bi_sum / static_cast<double>(out.n_bivariate) : 1.0;
  return out;
}

PmseResult Pmse(const Dataset& orig, const Dataset& synth,
                const LogisticOptions& opts) {
  RequireSameSchema(orig, synth);
  if (orig.n_rows() == 0 || synth.n_rows() == 0) {
    throw Error(ErrorCode::kEmptyDataset, "pMSE needs two nonempty datasets");
  }
  const Dataset stacked = ConcatRows(orig, synth);
  std::vector<size_t> rows(stacked.n_rows());
  std::iota(rows.begin(), rows.end(), size_t{0});
  const RowSubset all{&stacked, rows};
  const PredictorCoding coding =
      MakePredictorCoding(std::span(&all, 1), std::nullopt);
  DesignMatrix dm = BuildPredictors(stacked, rows, coding);
  dm.y = Eigen::VectorXd::Zero(dm.n());
  dm.y.tail(static_cast<Eigen::Index>(synth.n_rows())).setOnes();

  const RegressionFit fit = FitLogistic(dm, opts);
  const Eigen::VectorXd prob = FittedProbabilities(fit, dm);

  PmseResult r;
  r.n = static_cast<int64_t>(stacked.n_rows());
  r.c = static_cast<double>(synth.n_rows()) / static_cast<double>(r.n);
  r.k = static_cast<int64_t>(dm.p());
  r.pmse = (prob.array() - r.c).square().mean();
  r.expected_null = static_cast<double>(r.k - 1) * (1 - r.c) * (1 - r.c) * r.c /
                    static_cast<double>(r.n);
  r.ratio = r.expected_null > 0 ? r.pmse / r.expected_null
                                : std::numeric_limits<double>::quiet_NaN();
  r.log_ratio = std::log(r.ratio);
  r.scaled = 1.0 - 4.0 * r.pmse;
  r.model_converged = fit.converged;
  r.separation_detected = fit.separation_detected;
  return r;
}

double IntervalOverlap(const Interval& orig, const Interval& synth) {
  const double lower = std::max(orig.lower, synth.lower);
  const double upper = std::min(orig.upper, synth.upper);
  const double inter = upper - lower;
  return 0.5 * (inter / (orig.upper - orig.lower) +
                inter / (synth.upper - synth.lower));
}

namespace {

struct ModelSpec {
  std::string family;
  std::string response;
  ResponseSpec spec;
};

ModelSpec ChooseModel(const Dataset& orig, size_t v) {
  const VariableSpec& var = orig.schema().variable(v);
  if (var.is_integer()) return {"linear", var.name, ResponseSpec::Numeric()};
  int32_t category = 1;
  if (var.categories.size() != 2) {
    std::vector<int64_t> counts(var.categories.size(), 0);
    for (int32_t c : orig.column(v)) ++counts[static_cast<size_t>(c)];
    category = static_cast<int32_t>(
        std::max_element(counts.begin(), counts.end()) - counts.begin());
  }
  return {"logistic", var.name + "=" + var.categories[static_cast<size_t>(category)],
          ResponseSpec::Indicator(category)};
}

bool ConstantResponse(const DesignMatrix& dm) {
  return dm.n() == 0 || dm.y.minCoeff() == dm.y.maxCoeff();
}

// Empty string on success, otherwise the reason the fit is unusable.
std::string FitModel(const DesignMatrix& dm, const ModelSpec& model,
                     const CioOptions& opts, RegressionFit& fit) {
  if (ConstantResponse(dm)) return "ConstantResponse";
  if (dm.n() <= dm.p()) return "TooFewRows";
  try {
    if (model.family == "linear") {
      fit = FitLinear(dm);
    } else {
      if (DesignRank(dm) < dm.p()) return "RankDeficient";
      fit = FitLogistic(dm, opts.logistic);
      if (fit.separation_detected) return "Separation";
      if (!fit.converged) return "NoConvergence";
    }
  } catch (const Error& e) {
    return ErrorCodeName(e.code());
  }
  return "";
}

}  // namespace

CioResult CioSuite(const Dataset& orig, const Dataset& synth,
                   const CioOptions& opts) {
  RequireSameSchema(orig, synth);
  CioResult result;
  std::vector<double> cio_values;
  std::vector<double> diff_values;
  for (size_t v = 0; v < orig.schema().size(); ++v) {
    const ModelSpec model = ChooseModel(orig, v);
    CioModel out;
    out.target = orig.schema().variable(v).name;
    out.family = model.family;
    out.response = model.response;

    const std::vector<size_t> rows_o = ResponseRows(orig, v);
    const std::vector<size_t> rows_s = ResponseRows(synth, v);
    const RowSubset subsets[] = {{&orig, rows_o}, {&synth, rows_s}};
    const PredictorCoding coding = MakePredictorCoding(subsets, v);
    const DesignMatrix dm_o = OneHotDesign(orig, out.target, model.spec, &coding);
    const DesignMatrix dm_s = OneHotDesign(synth, out.target, model.spec, &coding);

    RegressionFit fit_o;
    RegressionFit fit_s;
    out.failure = FitModel(dm_o, model, opts, fit_o);
    if (out.failure.empty()) {
      out.failure = FitModel(dm_s, model, opts, fit_s);
      if (!out.failure.empty()) out.failure = "synthetic: " + out.failure;
    } else {
      out.failure = "original: " + out.failure;
    }
    if (out.failure.empty()) {
      const auto ci_o = ConfidenceIntervals(fit_o, opts.level);
      const auto ci_s = ConfidenceIntervals(fit_s, opts.level);
      double j_sum = 0;
      double d_sum = 0;
      size_t d_count = 0;
      for (size_t k = 1; k < ci_o.size(); ++k) {
        const bool zero_width = ci_o[k].upper == ci_o[k].lower ||
                                ci_s[k].upper == ci_s[k].lower;
        if (zero_width) continue;
        double j = IntervalOverlap(ci_o[k], ci_s[k]);
        if (opts.floor_at_zero) j = std::max(0.0, j);
        j_sum += j;
        ++out.n_coefficients;
        const auto idx = static_cast<Eigen::Index>(k);
        d_sum += std::abs(fit_o.coef[idx] - fit_s.coef[idx]) / fit_o.se[idx];
        ++d_count;
      }
      if (out.n_coefficients == 0) {
        out.failure = "NoCoefficients";
      } else {
        out.converged = true;
        out.mean_cio = j_sum / static_cast<double>(out.n_coefficients);
        out.std_diff = d_sum / static_cast<double>(d_count);
        cio_values.push_back(out.mean_cio);
        diff_values.push_back(out.std_diff);
      }
    }
    if (!out.converged) ++result.n_failed;
    result.per_model.push_back(std::move(out));
  }
  if (!cio_values.empty()) {
    result.mean_cio = std::accumulate(cio_values.begin(), cio_values.end(), 0.0) /
                      static_cast<double>(cio_values.size());
    result.mean_std_diff =
        std::accumulate(diff_values.begin(), diff_values.end(), 0.0) /
        static_cast<double>(diff_values.size());
  }
  return result;
}

double OverallUtility(std::optional<double> roe_uni, std::optional<double> roe_bi,
                      std::optional<double> cio_mean,
                      std::optional<double> pmse_scaled) {
  double sum = 0;
  int count = 0;
  for (const auto& c : {roe_uni, roe_bi, cio_mean, pmse_scaled}) {
    if (!c) continue;
    sum += *c;
    ++count;
  }
  if (count == 0) throw Error(ErrorCode::kNoComponents, "no utility components");
  return sum / count;
}

UtilityReport EvaluateUtility(const Dataset& orig, const Dataset& synth,
                              const UtilityOptions& opts) {
  UtilityReport report;
  const RoeSuiteResult roe = RoeSuite(orig, synth, opts.bins);
  report.roe_uni = roe.roe_uni;
  report.roe_bi = roe.roe_bi;
  report.pmse = Pmse(orig, synth, opts.propensity);
  report.cio = CioSuite(orig, synth, opts.cio);
  report.components_used = {"roe_uni", "roe_bi"};
  if (report.cio.mean_cio) report.components_used.push_back("cio");
  report.components_used.push_back("pmse_scaled");
  report.overall = OverallUtility(report.roe_uni, report.roe_bi,
                                  report.cio.mean_cio, report.pmse.scaled);
  return report;
}

}  // namespace rutk
