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

#include "rutk/risk_tcap.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "rutk/error.h"

namespace rutk {

namespace {

struct TupleHash {
  size_t operator()(const std::vector<int32_t>& v) const {
    uint64_t h = 1469598103934665603ULL;
    for (int32_t x : v) {
      h ^= static_cast<uint32_t>(x);
      h *= 1099511628211ULL;
      h ^= h >> 29;
    }
    return static_cast<size_t>(h);
  }
};

uint64_t PairKey(uint32_t cls, int32_t target) {
  return (static_cast<uint64_t>(cls) << 32) | static_cast<uint32_t>(target);
}

// Equivalence-class index over the key variables of one dataset.
class ClassIndex {
 public:
  ClassIndex(const Dataset& ds, std::span<const size_t> keys, size_t target)
      : keys_(keys.begin(), keys.end()) {
    const size_t n = ds.n_rows();
    class_of_.resize(n);
    std::vector<int32_t> tuple(keys_.size());
    auto tcol = ds.column(target);
    for (size_t r = 0; r < n; ++r) {
      Fill(ds, r, tuple);
      auto [it, inserted] =
          ids_.try_emplace(tuple, static_cast<uint32_t>(sizes_.size()));
      if (inserted) sizes_.push_back(0);
      const uint32_t cls = it->second;
      class_of_[r] = cls;
      ++sizes_[cls];
      ++joint_[PairKey(cls, tcol[r])];
    }
  }

  void Fill(const Dataset& ds, size_t row, std::vector<int32_t>& tuple) const {
    for (size_t k = 0; k < keys_.size(); ++k) tuple[k] = ds.at(row, keys_[k]);
  }

  std::optional<uint32_t> Find(const std::vector<int32_t>& tuple) const {
    auto it = ids_.find(tuple);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  uint32_t class_of(size_t row) const { return class_of_[row]; }
  int64_t size(uint32_t cls) const { return sizes_[cls]; }
  int64_t joint(uint32_t cls, int32_t target) const {
    auto it = joint_.find(PairKey(cls, target));
    return it == joint_.end() ? 0 : it->second;
  }

 private:
  std::vector<size_t> keys_;
  std::unordered_map<std::vector<int32_t>, uint32_t, TupleHash> ids_;
  std::vector<int64_t> sizes_;
  std::vector<uint32_t> class_of_;
  std::unordered_map<uint64_t, int64_t> joint_;
};

std::vector<size_t> KeyIndices(const Schema& schema, const KeyTargetConfig& cfg) {
  std::vector<size_t> out;
  for (const std::string& k : cfg.keys) out.push_back(schema.IndexOf(k));
  return out;
}

}  // namespace

void ValidateKeyTarget(const Schema& schema, const KeyTargetConfig& cfg) {
  if (cfg.keys.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "key set is empty");
  }
  schema.IndexOf(cfg.target);
  std::unordered_set<std::string> seen;
  for (const std::string& k : cfg.keys) {
    schema.IndexOf(k);
    if (k == cfg.target) {
      throw Error(ErrorCode::kInvalidArgument,
                  "target " + cfg.target + " is also a key");
    }
    if (!seen.insert(k).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate key " + k);
    }
  }
}

std::vector<Ratio> WeapRatios(const Dataset& synth, const KeyTargetConfig& cfg) {
  ValidateKeyTarget(synth.schema(), cfg);
  const std::vector<size_t> keys = KeyIndices(synth.schema(), cfg);
  const size_t target = synth.schema().IndexOf(cfg.target);
  ClassIndex index(synth, keys, target);
  auto tcol = synth.column(target);
  std::vector<Ratio> out(synth.n_rows());
  for (size_t r = 0; r < synth.n_rows(); ++r) {
    const uint32_t cls = index.class_of(r);
    out[r] = {index.joint(cls, tcol[r]), index.size(cls)};
  }
  return out;
}

std::vector<double> WeapScores(const Dataset& synth, const KeyTargetConfig& cfg) {
  std::vector<Ratio> ratios = WeapRatios(synth, cfg);
  std::vector<double> out;
  out.reserve(ratios.size());
  for (const Ratio& r : ratios) out.push_back(r.value());
  return out;
}

std::vector<TcapRecord> TcapRecords(const Dataset& orig, const Dataset& synth,
                                    const KeyTargetConfig& cfg,
                                    double weap_threshold) {
  RequireSameSchema(orig, synth);
  if (!(weap_threshold > 0.0 && weap_threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "WEAP threshold must lie in (0, 1]");
  }
  const std::vector<Ratio> weap = WeapRatios(synth, cfg);
  const std::vector<size_t> keys = KeyIndices(orig.schema(), cfg);
  const size_t target = orig.schema().IndexOf(cfg.target);
  ClassIndex index(orig, keys, target);
  auto synth_target = synth.column(target);

  std::vector<TcapRecord> out;
  std::vector<int32_t> tuple(keys.size());
  for (size_t r = 0; r < synth.n_rows(); ++r) {
    const Ratio& w = weap[r];
    if (static_cast<double>(w.num) < weap_threshold * static_cast<double>(w.den)) {
      continue;
    }
    TcapRecord rec;
    rec.row = r;
    rec.weap = w;
    for (size_t k = 0; k < keys.size(); ++k) tuple[k] = synth.at(r, keys[k]);
    if (auto cls = index.Find(tuple)) {
      rec.tcap = Ratio{index.joint(*cls, synth_target[r]), index.size(*cls)};
    }
    out.push_back(rec);
  }
  return out;
}

TcapResult Tcap(const Dataset& orig, const Dataset& synth,
                const KeyTargetConfig& cfg, double weap_threshold) {
  const std::vector<TcapRecord> records =
      TcapRecords(orig, synth, cfg, weap_threshold);
  TcapResult result;
  result.config = cfg;
  result.baseline = BaselineCap(orig, cfg.target);
  result.n_weap1 = static_cast<int64_t>(records.size());
  double sum = 0;
  for (const TcapRecord& rec : records) {
    if (!rec.tcap) continue;
    ++result.n_matched;
    sum += rec.tcap->value();
  }
  result.n_undefined = result.n_weap1 - result.n_matched;
  if (result.n_matched > 0) {
    result.tcap = sum / static_cast<double>(result.n_matched);
  } else {
    result.tcap = result.baseline;
    result.no_matches = true;
    result.warnings.push_back("NoMatches: no filtered synthetic record has a key "
                              "tuple present in the original data; reporting "
                              "the baseline");
  }
  return result;
}

double BaselineCap(const Dataset& orig, std::string_view target) {
  const size_t t = orig.schema().IndexOf(target);
  if (orig.n_rows() == 0) {
    throw Error(ErrorCode::kEmptyDataset, "baseline needs a nonempty dataset");
  }
  std::unordered_map<int32_t, int64_t> counts;
  for (int32_t v : orig.column(t)) ++counts[v];
  std::vector<int32_t> order;
  for (const auto& [code, count] : counts) order.push_back(code);
  std::sort(order.begin(), order.end());
  const double n = static_cast<double>(orig.n_rows());
  double sum = 0;
  for (int32_t code : order) {
    const double share = static_cast<double>(counts[code]) / n;
    sum += share * share;
  }
  return sum;
}

std::vector<KeyTargetConfig> RiskConfig::Cells() const {
  std::vector<KeyTargetConfig> out;
  for (const std::string& t : targets) {
    for (const auto& keys : key_sets) {
      out.push_back({keys, t, t + "|" + std::to_string(keys.size())});
    }
  }
  return out;
}

RiskConfig ParseRiskConfigJson(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kConfig, std::string("risk config: ") + e.what());
  }
  RiskConfig cfg;
  try {
    cfg.targets = doc.at("targets").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::kConfig, "risk.targets: expected a list of names");
  }
  try {
    cfg.key_sets = doc.at("key_sets").get<std::vector<std::vector<std::string>>>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::kConfig, "risk.key_sets: expected a list of name lists");
  }
  if (doc.contains("weap_threshold")) {
    if (!doc["weap_threshold"].is_number()) {
      throw Error(ErrorCode::kConfig, "risk.weap_threshold: expected a number");
    }
    cfg.weap_threshold = doc["weap_threshold"].get<double>();
    if (!(cfg.weap_threshold > 0 && cfg.weap_threshold <= 1)) {
      throw Error(ErrorCode::kConfig, "risk.weap_threshold: must lie in (0, 1]");
    }
  }
  if (cfg.targets.empty()) throw Error(ErrorCode::kConfig, "risk.targets: empty");
  if (cfg.key_sets.empty()) throw Error(ErrorCode::kConfig, "risk.key_sets: empty");
  for (size_t i = 0; i < cfg.key_sets.size(); ++i) {
    if (cfg.key_sets[i].empty()) {
      throw Error(ErrorCode::kConfig,
                  "risk.key_sets[" + std::to_string(i) + "]: empty key set");
    }
  }
  return cfg;
}

RiskConfig LoadRiskConfigFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseRiskConfigJson(ss.str());
}

std::string RiskConfigToJson(const RiskConfig& cfg) {
  nlohmann::ordered_json doc;
  doc["targets"] = cfg.targets;
  doc["key_sets"] = cfg.key_sets;
  if (cfg.weap_threshold != 1.0) doc["weap_threshold"] = cfg.weap_threshold;
  return doc.dump(2) + "\n";
}

double UnweightedMean(std::span<const double> values) {
  if (values.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "mean of an empty list");
  }
  double sum = 0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

std::vector<TargetBaseline> TargetBaselines(
    const Dataset& orig, const std::vector<KeyTargetConfig>& configs) {
  std::vector<TargetBaseline> out;
  for (const KeyTargetConfig& cfg : configs) {
    bool seen = std::any_of(out.begin(), out.end(), [&](const TargetBaseline& b) {
      return b.target == cfg.target;
    });
    if (!seen) out.push_back({cfg.target, BaselineCap(orig, cfg.target)});
  }
  return out;
}

TcapColumn ComputeTcapColumn(const Dataset& orig, const Subject& subject,
                             const std::vector<KeyTargetConfig>& configs,
                             double weap_threshold) {
  if (configs.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no key/target configurations");
  }
  TcapColumn column;
  column.label = subject.label;
  std::vector<double> values;
  for (const KeyTargetConfig& cfg : configs) {
    column.cells.push_back(Tcap(orig, *subject.data, cfg, weap_threshold));
    values.push_back(column.cells.back().tcap);
  }
  column.grand_average = UnweightedMean(values);
  return column;
}

TcapMatrix ComputeTcapMatrix(const Dataset& orig,
                             const std::vector<Subject>& subjects,
                             const std::vector<KeyTargetConfig>& configs,
                             double weap_threshold) {
  if (configs.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no key/target configurations");
  }
  TcapMatrix matrix;
  matrix.configs = configs;
  matrix.baselines = TargetBaselines(orig, configs);
  std::vector<double> b;
  for (const TargetBaseline& tb : matrix.baselines) b.push_back(tb.baseline);
  matrix.baseline_average = UnweightedMean(b);
  for (const Subject& s : subjects) {
    matrix.columns.push_back(ComputeTcapColumn(orig, s, configs, weap_threshold));
  }
  return matrix;
}

}  // namespace rutk
