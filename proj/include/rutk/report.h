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

#ifndef RUTK_REPORT_H_
#define RUTK_REPORT_H_

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "rutk/risk_tcap.h"
#include "rutk/tabular.h"
#include "rutk/utility_metrics.h"

namespace rutk {

inline constexpr const char* kToolkitName = "rutk";
inline constexpr const char* kToolkitVersion = "0.1.0";

struct RuMapPoint {
  std::string label;
  double utility = 0;
  double risk = 0;
  double baseline_risk = 0;
};

// A synthetic dataset to evaluate. A non-empty `load_error` marks a subject
// that could not be read; it is carried into the report as an error entry.
struct SubjectInput {
  std::string label;
  std::shared_ptr<const Dataset> data;
  std::string load_error;
};

struct SubjectResult {
  std::string label;
  bool ok = false;
  std::string error;
  int64_t n_rows = 0;
  TcapColumn risk;
  UtilityReport utility;
};

struct EvaluationReport {
  std::string dataset_name;
  std::string original_fingerprint;
  int64_t original_rows = 0;
  std::vector<KeyTargetConfig> configs;
  std::vector<TargetBaseline> baselines;
  double baseline_average = 0;
  std::vector<SubjectResult> subjects;
  // Run configuration as JSON text, echoed verbatim into the report.
  std::string config_echo = "{}";
  // Caller-supplied run stamp; omitted from output when empty.
  std::string timestamp;

  bool has_errors() const;
  std::vector<RuMapPoint> RuMap(bool include_original) const;
};

// FNV-1a over the canonical CSV serialization.
std::string Fingerprint(const Dataset& ds);

// Six significant digits, "%.6g".
std::string FormatNumber(double x);

// Runs the risk matrix and the utility battery for every subject. Failures
// are isolated per subject. `jobs` > 1 evaluates subjects concurrently; the
// result does not depend on it.
EvaluationReport BuildReport(const Dataset& orig,
                             const std::vector<SubjectInput>& subjects,
                             const RiskConfig& risk,
                             const UtilityOptions& utility, int jobs = 1);

std::string ReportToJson(const EvaluationReport& report);
std::string TcapCsv(const EvaluationReport& report);
std::string UtilityCsv(const EvaluationReport& report);

enum class RuMapFormat { kCsv, kSvg };

std::string RenderRuMapCsv(const std::vector<RuMapPoint>& points);
std::vector<RuMapPoint> ParseRuMapCsv(std::string_view text);
// Scatter of utility (y) against risk (x) on the unit square, with a
// vertical reference line at `baseline_risk`.
std::string RenderRuMapSvg(const std::vector<RuMapPoint>& points,
                           double baseline_risk);

std::string EmitRuMap(const EvaluationReport& report, bool include_original,
                      RuMapFormat format);

}  // namespace rutk

#endif  // RUTK_REPORT_H_
