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

#ifndef RUTK_TESTS_TCAP_ORACLE_H_
#define RUTK_TESTS_TCAP_ORACLE_H_

#include <optional>
#include <vector>

#include "rutk/risk_tcap.h"

namespace rutk::testing {

// Quadratic reference implementation: every ratio is recounted by scanning
// all records.
struct OracleRecord {
  size_t row;
  int64_t weap_num, weap_den;
  std::optional<std::pair<int64_t, int64_t>> tcap;
};

inline bool SameKeys(const Dataset& a, size_t i, const Dataset& b, size_t j,
                     const std::vector<size_t>& keys) {
  for (size_t k : keys) {
    if (a.at(i, k) != b.at(j, k)) return false;
  }
  return true;
}

inline std::vector<OracleRecord> OracleTcap(const Dataset& orig, const Dataset& synth,
                                            const KeyTargetConfig& cfg,
                                            double threshold) {
  std::vector<size_t> keys;
  for (const auto& k : cfg.keys) keys.push_back(synth.schema().IndexOf(k));
  const size_t t = synth.schema().IndexOf(cfg.target);
  std::vector<OracleRecord> out;
  for (size_t i = 0; i < synth.n_rows(); ++i) {
    int64_t num = 0, den = 0;
    for (size_t j = 0; j < synth.n_rows(); ++j) {
      if (!SameKeys(synth, i, synth, j, keys)) continue;
      ++den;
      if (synth.at(j, t) == synth.at(i, t)) ++num;
    }
    if (static_cast<double>(num) < threshold * static_cast<double>(den)) continue;
    OracleRecord rec{i, num, den, std::nullopt};
    int64_t onum = 0, oden = 0;
    for (size_t j = 0; j < orig.n_rows(); ++j) {
      if (!SameKeys(synth, i, orig, j, keys)) continue;
      ++oden;
      if (orig.at(j, t) == synth.at(i, t)) ++onum;
    }
    if (oden > 0) rec.tcap = std::make_pair(onum, oden);
    out.push_back(rec);
  }
  return out;
}

// Record-level agreement with exact integer cross-multiplication.
inline bool MatchesOracle(const std::vector<TcapRecord>& got,
                          const std::vector<OracleRecord>& want) {
  if (got.size() != want.size()) return false;
  for (size_t i = 0; i < got.size(); ++i) {
    if (got[i].row != want[i].row) return false;
    if (got[i].weap.num * want[i].weap_den != want[i].weap_num * got[i].weap.den) {
      return false;
    }
    if (got[i].tcap.has_value() != want[i].tcap.has_value()) return false;
    if (got[i].tcap &&
        got[i].tcap->num * want[i].tcap->second != want[i].tcap->first * got[i].tcap->den) {
      return false;
    }
  }
  return true;
}

}  // namespace rutk::testing

#endif  // RUTK_TESTS_TCAP_ORACLE_H_
