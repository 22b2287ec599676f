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

#ifndef RUTK_CART_H_
#define RUTK_CART_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rutk/tabular.h"

namespace rutk {

struct CartParams {
  int min_leaf = 5;
  int max_depth = 30;
};

enum class SplitCriterion { kGini, kVariance };

struct CartNode {
  // Children are node indices; both -1 on a leaf.
  int32_t left = -1;
  int32_t right = -1;
  // Schema index of the split variable.
  size_t variable = 0;
  bool categorical = false;
  // Categorical split: per category, 1 when it routes left. Categories not
  // seen at this node during fitting follow the larger child.
  std::vector<uint8_t> goes_left;
  // Integer split: value <= threshold routes left. Missing sorts below
  // every value.
  int32_t threshold = 0;
  // Leaf only: index into CartModel::leaf_pools.
  int32_t leaf = -1;

  bool is_leaf() const { return left < 0; }
};

struct CartModel {
  std::string response;
  std::vector<std::string> predictors;
  size_t response_index = 0;
  SplitCriterion criterion = SplitCriterion::kGini;
  std::vector<CartNode> nodes;
  // Training row indices per leaf; a partition of the training rows.
  std::vector<std::vector<size_t>> leaf_pools;
  // The response takes one value in the training data (single-leaf tree).
  bool response_constant = false;
  int depth = 0;

  // Leaf reached by a record; `value_of(schema_index)` yields its cells.
  template <typename ValueOf>
  int32_t FindLeaf(ValueOf&& value_of) const {
    int32_t node = 0;
    while (!nodes[static_cast<size_t>(node)].is_leaf()) {
      const CartNode& n = nodes[static_cast<size_t>(node)];
      const int32_t v = value_of(n.variable);
      const bool left = n.categorical ? n.goes_left[static_cast<size_t>(v)] != 0
                                      : v <= n.threshold;
      node = left ? n.left : n.right;
    }
    return nodes[static_cast<size_t>(node)].leaf;
  }
};

// Greedy binary tree. Splits stop at `min_leaf`, `max_depth`, or zero gain.
// Gini impurity is used for categorical responses and squared error for
// integer ones. Categorical predictors with at most 8 observed levels are
// split by exhaustive subset search; larger ones by scanning contiguous
// partitions of the levels ordered by their response summary.
CartModel FitCart(const Dataset& train, std::string_view response,
                  const std::vector<std::string>& predictors,
                  const CartParams& params = {});

}  // namespace rutk

#endif  // RUTK_CART_H_
