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

#ifndef RUTK_RISK_TCAP_H_
#define RUTK_RISK_TCAP_H_

// Attribution risk of synthetic data. For each synthetic record the
// within-equivalence-class attribution probability (WEAP) is the share of
// synthetic records with its key tuple that also carry its target value.
// Records with WEAP at or above the threshold (1 by default, i.e. classes
// with l-diversity 1) are looked up in the original data; the targeted
// correct attribution probability (TCAP) is the original-data share of the
// matching key class that carries the synthetic target value.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rutk/tabular.h"

namespace rutk {

struct KeyTargetConfig {
  std::vector<std::string> keys;
  std::string target;
  std::string label;
};

// Throws kUnknownVariable or kInvalidArgument.
void ValidateKeyTarget(const Schema& schema, const KeyTargetConfig& cfg);

// Exact rational count ratio.
struct Ratio {
  int64_t num = 0;
  int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Ratio& a, const Ratio& b) {
    return a.num * b.den == b.num * a.den;
  }
};

std::vector<Ratio> WeapRatios(const Dataset& synth, const KeyTargetConfig& cfg);
std::vector<double> WeapScores(const Dataset& synth, const KeyTargetConfig& cfg);

// One synthetic record that passed the WEAP filter. `tcap` is empty when the
// original data has no record with the same key tuple.
struct TcapRecord {
  size_t row = 0;
  Ratio weap;
  std::optional<Ratio> tcap;
};

std::vector<TcapRecord> TcapRecords(const Dataset& orig, const Dataset& synth,
                                    const KeyTargetConfig& cfg,
                                    double weap_threshold = 1.0);

struct TcapResult {
  KeyTargetConfig config;
  double tcap = 0;
  int64_t n_weap1 = 0;
  int64_t n_matched = 0;
  int64_t n_undefined = 0;
  double baseline = 0;
  // Set when no filtered record matched; `tcap` then equals `baseline`.
  bool no_matches = false;
  std::vector<std::string> warnings;

  double match_rate() const {
    return n_weap1 == 0 ? 0.0 : static_cast<double>(n_matched) / n_weap1;
  }
};

TcapResult Tcap(const Dataset& orig, const Dataset& synth,
                const KeyTargetConfig& cfg, double weap_threshold = 1.0);

// Sum of squared marginal shares of `target` in the original data: the
// chance that a draw from the marginal attributes a random record correctly.
double BaselineCap(const Dataset& orig, std::string_view target);

// Key/target experiment grid: every target crossed with every key set.
struct RiskConfig {
  std::vector<std::string> targets;
  std::vector<std::vector<std::string>> key_sets;
  double weap_threshold = 1.0;

  std::vector<KeyTargetConfig> Cells() const;
};

RiskConfig ParseRiskConfigJson(std::string_view text);
RiskConfig LoadRiskConfigFile(const std::string& path);
std::string RiskConfigToJson(const RiskConfig& cfg);

struct Subject {
  std::string label;
  std::shared_ptr<const Dataset> data;
};

struct TcapColumn {
  std::string label;
  std::vector<TcapResult> cells;
  double grand_average = 0;
};

struct TargetBaseline {
  std::string target;
  double baseline = 0;
};

struct TcapMatrix {
  std::vector<KeyTargetConfig> configs;
  std::vector<TcapColumn> columns;
  std::vector<TargetBaseline> baselines;
  double baseline_average = 0;
};

double UnweightedMean(std::span<const double> values);

// Per-target baselines (first-appearance order) and their mean.
std::vector<TargetBaseline> TargetBaselines(
    const Dataset& orig, const std::vector<KeyTargetConfig>& configs);

TcapColumn ComputeTcapColumn(const Dataset& orig, const Subject& subject,
                             const std::vector<KeyTargetConfig>& configs,
                             double weap_threshold = 1.0);

TcapMatrix ComputeTcapMatrix(const Dataset& orig,
                             const std::vector<Subject>& subjects,
                             const std::vector<KeyTargetConfig>& configs,
                             double weap_threshold = 1.0);

}  // namespace rutk

#endif  // RUTK_RISK_TCAP_H_
