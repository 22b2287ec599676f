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

#include "rutk/cart.h"

#include <algorithm>
#include <numeric>

#include "rutk/error.h"

namespace rutk {

namespace {

constexpr size_t kExhaustiveLevels = 8;

// Sufficient statistics of the response over a set of rows. Impurity is
// n * Gini for categorical responses and the sum of squared deviations for
// integer responses (missing integers count toward n only).
class Stats {
 public:
  Stats(SplitCriterion criterion, size_t classes)
      : criterion_(criterion),
        counts_(criterion == SplitCriterion::kGini ? classes : 0, 0) {}

  void Add(int32_t y) {
    ++n_;
    if (criterion_ == SplitCriterion::kGini) {
      int64_t& c = counts_[static_cast<size_t>(y)];
      sumsq_ += static_cast<double>(2 * c + 1);
      ++c;
    } else if (y != kMissingInteger) {
      ++m_;
      sum_ += y;
      sumsq_ += static_cast<double>(y) * y;
    }
  }

  void Remove(int32_t y) {
    --n_;
    if (criterion_ == SplitCriterion::kGini) {
      int64_t& c = counts_[static_cast<size_t>(y)];
      sumsq_ -= static_cast<double>(2 * c - 1);
      --c;
    } else if (y != kMissingInteger) {
      --m_;
      sum_ -= y;
      sumsq_ -= static_cast<double>(y) * y;
    }
  }

  void Merge(const Stats& o) {
    n_ += o.n_;
    if (criterion_ == SplitCriterion::kGini) {
      double ss = 0;
      for (size_t k = 0; k < counts_.size(); ++k) {
        counts_[k] += o.counts_[k];
        ss += static_cast<double>(counts_[k]) * static_cast<double>(counts_[k]);
      }
      sumsq_ = ss;
    } else {
      m_ += o.m_;
      sum_ += o.sum_;
      sumsq_ += o.sumsq_;
    }
  }

  int64_t n() const { return n_; }

  double Impurity() const {
    if (criterion_ == SplitCriterion::kGini) {
      return n_ == 0 ? 0.0 : static_cast<double>(n_) - sumsq_ / static_cast<double>(n_);
    }
    if (m_ == 0) return 0.0;
    return std::max(0.0, sumsq_ - sum_ * sum_ / static_cast<double>(m_));
  }

  size_t Majority() const {
    return static_cast<size_t>(std::max_element(counts_.begin(), counts_.end()) -
                               counts_.begin());
  }

  // Ordering key for contiguous categorical partitions.
  double OrderKey(size_t majority) const {
    if (criterion_ == SplitCriterion::kGini) {
      return n_ == 0 ? 0.0
                     : static_cast<double>(counts_[majority]) / static_cast<double>(n_);
    }
    return m_ == 0 ? 0.0 : sum_ / static_cast<double>(m_);
  }

 private:
  SplitCriterion criterion_;
  std::vector<int64_t> counts_;
  int64_t n_ = 0;
  int64_t m_ = 0;
  double sum_ = 0;
  double sumsq_ = 0;
};

struct Split {
  bool found = false;
  double gain = 0;
  size_t variable = 0;
  bool categorical = false;
  std::vector<uint8_t> goes_left;
  int32_t threshold = 0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& train, CartModel& model, std::vector<size_t> predictors,
              const CartParams& params)
      : train_(train),
        model_(model),
        predictors_(std::move(predictors)),
        params_(params),
        y_(train.column(model.response_index)),
        classes_(train.schema().variable(model.response_index).categories.size()) {}

  int32_t Build(std::vector<size_t> rows, int depth) {
    const auto node = static_cast<int32_t>(model_.nodes.size());
    model_.nodes.emplace_back();
    model_.depth = std::max(model_.depth, depth);

    Stats parent = MakeStats();
    for (size_t r : rows) parent.Add(y_[r]);
    Split best;
    const double parent_impurity = parent.Impurity();
    if (depth < params_.max_depth &&
        rows.size() >= 2 * static_cast<size_t>(params_.min_leaf) &&
        parent_impurity > 1e-12) {
      best = BestSplit(rows, parent);
    }
    if (!best.found) {
      model_.nodes[static_cast<size_t>(node)].leaf =
          static_cast<int32_t>(model_.leaf_pools.size());
      model_.leaf_pools.push_back(std::move(rows));
      return node;
    }

    std::vector<size_t> left_rows;
    std::vector<size_t> right_rows;
    auto col = train_.column(best.variable);
    for (size_t r : rows) {
      const bool left = best.categorical ? best.goes_left[static_cast<size_t>(col[r])] != 0
                                         : col[r] <= best.threshold;
      (left ? left_rows : right_rows).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    {
      CartNode& n = model_.nodes[static_cast<size_t>(node)];
      n.variable = best.variable;
      n.categorical = best.categorical;
      n.goes_left = std::move(best.goes_left);
      n.threshold = best.threshold;
    }
    const int32_t left = Build(std::move(left_rows), depth + 1);
    const int32_t right = Build(std::move(right_rows), depth + 1);
    model_.nodes[static_cast<size_t>(node)].left = left;
    model_.nodes[static_cast<size_t>(node)].right = right;
    return node;
  }

 private:
  Stats MakeStats() const { return Stats(model_.criterion, classes_); }

  bool Better(double gain, double parent_impurity, const Split& best) const {
    return gain > 1e-12 * (1.0 + parent_impurity) && (!best.found || gain > best.gain);
  }

  Split BestSplit(const std::vector<size_t>& rows, const Stats& parent) const {
    Split best;
    for (size_t var : predictors_) {
      if (train_.schema().variable(var).is_categorical()) {
        SearchCategorical(rows, parent, var, best);
      } else {
        SearchInteger(rows, parent, var, best);
      }
    }
    return best;
  }

  void SearchInteger(const std::vector<size_t>& rows, const Stats& parent, size_t var,
                     Split& best) const {
    auto col = train_.column(var);
    std::vector<std::pair<int32_t, size_t>> values;
    values.reserve(rows.size());
    for (size_t r : rows) values.emplace_back(col[r], r);
    std::sort(values.begin(), values.end());
    Stats left = MakeStats();
    Stats right = parent;
    const double base = parent.Impurity();
    const auto min_leaf = static_cast<int64_t>(params_.min_leaf);
    for (size_t i = 0; i + 1 < values.size(); ++i) {
      const int32_t y = y_[values[i].second];
      left.Add(y);
      right.Remove(y);
      if (values[i].first == values[i + 1].first) continue;
      if (left.n() < min_leaf || right.n() < min_leaf) continue;
      const double gain = base - left.Impurity() - right.Impurity();
      if (Better(gain, base, best)) {
        best.found = true;
        best.gain = gain;
        best.variable = var;
        best.categorical = false;
        best.goes_left.clear();
        best.threshold = values[i].first;
      }
    }
  }

  void SearchCategorical(const std::vector<size_t>& rows, const Stats& parent,
                         size_t var, Split& best) const {
    const size_t levels = train_.schema().variable(var).categories.size();
    auto col = train_.column(var);
    std::vector<Stats> per_level(levels, MakeStats());
    for (size_t r : rows) per_level[static_cast<size_t>(col[r])].Add(y_[r]);
    std::vector<size_t> observed;
    for (size_t k = 0; k < levels; ++k) {
      if (per_level[k].n() > 0) observed.push_back(k);
    }
    const size_t count = observed.size();
    if (count < 2) return;
    const double base = parent.Impurity();
    const auto min_leaf = static_cast<int64_t>(params_.min_leaf);

    auto consider = [&](const std::vector<uint8_t>& in_left) {
      Stats left = MakeStats();
      Stats right = MakeStats();
      for (size_t i = 0; i < count; ++i) {
        (in_left[i] ? left : right).Merge(per_level[observed[i]]);
      }
      if (left.n() < min_leaf || right.n() < min_leaf) return;
      const double gain = base - left.Impurity() - right.Impurity();
      if (!Better(gain, base, best)) return;
      best.found = true;
      best.gain = gain;
      best.variable = var;
      best.categorical = true;
      const uint8_t unseen = left.n() >= right.n() ? 1 : 0;
      best.goes_left.assign(levels, unseen);
      for (size_t i = 0; i < count; ++i) best.goes_left[observed[i]] = in_left[i];
    };

    std::vector<uint8_t> in_left(count, 0);
    if (count <= kExhaustiveLevels) {
      // observed[0] stays left; bit i places observed[i + 1] left as well.
      const uint32_t masks = (1u << (count - 1)) - 1;
      for (uint32_t mask = 0; mask < masks; ++mask) {
        in_left[0] = 1;
        for (size_t i = 1; i < count; ++i) in_left[i] = (mask >> (i - 1)) & 1u;
        consider(in_left);
      }
      return;
    }
    const size_t majority = parent.Majority();
    std::vector<size_t> order(count);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return per_level[observed[a]].OrderKey(majority) <
             per_level[observed[b]].OrderKey(majority);
    });
    for (size_t cut = 1; cut < count; ++cut) {
      std::fill(in_left.begin(), in_left.end(), 0);
      for (size_t i = 0; i < cut; ++i) in_left[order[i]] = 1;
      consider(in_left);
    }
  }

  const Dataset& train_;
  CartModel& model_;
  std::vector<size_t> predictors_;
  CartParams params_;
  std::span<const int32_t> y_;
  size_t classes_;
};

}  // namespace

CartModel FitCart(const Dataset& train, std::string_view response,
                  const std::vector<std::string>& predictors,
                  const CartParams& params) {
  if (params.min_leaf < 1 || params.max_depth < 1) {
    throw Error(ErrorCode::kInvalidArgument, "min_leaf and max_depth must be >= 1");
  }
  if (train.n_rows() == 0) {
    throw Error(ErrorCode::kEmptyDataset, "cannot fit a tree on no rows");
  }
  CartModel model;
  model.response = std::string(response);
  model.response_index = train.schema().IndexOf(response);
  model.predictors = predictors;
  std::vector<size_t> predictor_idx;
  for (const std::string& p : predictors) {
    const size_t idx = train.schema().IndexOf(p);
    if (idx == model.response_index) {
      throw Error(ErrorCode::kInvalidArgument, "response used as predictor: " + p);
    }
    predictor_idx.push_back(idx);
  }
  model.criterion = train.schema().variable(model.response_index).is_categorical()
                        ? SplitCriterion::kGini
                        : SplitCriterion::kVariance;
  auto y = train.column(model.response_index);
  model.response_constant =
      std::all_of(y.begin(), y.end(), [&](int32_t v) { return v == y.front(); });

  std::vector<size_t> rows(train.n_rows());
  std::iota(rows.begin(), rows.end(), size_t{0});
  TreeBuilder builder(train, model, std::move(predictor_idx), params);
  builder.Build(std::move(rows), 0);
  return model;
}

}  // namespace rutk
