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
#include <random>

#include <gtest/gtest.h>

#include "rutk/error.h"
#include "rutk/simulate.h"
#include "test_support.h"

namespace rutk {
namespace {

using testing::MakeSchema;

ContingencyTable Table(const std::vector<int64_t>& counts) {
  ContingencyTable t;
  t.variables = {"V"};
  t.level_counts = {static_cast<int64_t>(counts.size())};
  for (size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] > 0) t.cells[{static_cast<int32_t>(i)}] = counts[i];
    t.total += counts[i];
  }
  return t;
}

// Direct recount over the full category space of every variable pair.
double BruteForceRoeBi(const Dataset& a, const Dataset& b) {
  const Schema& s = a.schema();
  double sum = 0;
  int tables = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    for (size_t j = i + 1; j < s.size(); ++j) {
      double ratios = 0;
      int cells = 0;
      for (size_t ci = 0; ci < s.variable(i).categories.size(); ++ci) {
        for (size_t cj = 0; cj < s.variable(j).categories.size(); ++cj) {
          auto count = [&](const Dataset& d) {
            int64_t n = 0;
            for (size_t r = 0; r < d.n_rows(); ++r) {
              if (d.at(r, i) == static_cast<int32_t>(ci) &&
                  d.at(r, j) == static_cast<int32_t>(cj)) {
                ++n;
              }
            }
            return static_cast<double>(n);
          };
          const double o = count(a), y = count(b);
          if (o == 0 && y == 0) continue;
          ratios += std::min(o, y) / std::max(o, y);
          ++cells;
        }
      }
      sum += ratios / cells;
      ++tables;
    }
  }
  return sum / tables;
}

TEST(RoeTest, HandComputedRatios) {
  RoeResult r = Roe(Table({50, 50}), Table({40, 60}));
  EXPECT_DOUBLE_EQ(r.per_category.at({0}), 0.8);
  EXPECT_NEAR(r.per_category.at({1}), 0.8333, 1e-4);
  EXPECT_NEAR(r.mean, 0.8167, 1e-4);
}

TEST(RoeTest, IdenticalAndDisjointTables) {
  EXPECT_EQ(Roe(Table({3, 0, 9}), Table({3, 0, 9})).mean, 1.0);
  RoeResult disjoint = Roe(Table({10, 0}), Table({0, 10}));
  EXPECT_EQ(disjoint.mean, 0.0);
  RoeResult skipped = Roe(Table({5, 0, 5}), Table({5, 0, 5}));
  EXPECT_EQ(skipped.skipped_cells, 1);
}

TEST(RoeTest, MismatchedTablesRejected) {
  try {
    Roe(Table({1, 2}), Table({1, 2, 3}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTableMismatch);
  }
}

TEST(RoeTest, SymmetricAndScaleInvariant) {
  std::mt19937_64 gen(13);
  std::uniform_int_distribution<int64_t> count(0, 20);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<int64_t> a(6), b(6), a3(6), b3(6);
    for (size_t i = 0; i < 6; ++i) {
      a[i] = count(gen);
      b[i] = count(gen);
      a3[i] = 3 * a[i];
      b3[i] = 3 * b[i];
    }
    a[0] = b[0] = a3[0] = b3[0] = 1;
    const RoeResult ab = Roe(Table(a), Table(b));
    EXPECT_DOUBLE_EQ(ab.mean, Roe(Table(b), Table(a)).mean);
    EXPECT_DOUBLE_EQ(ab.mean, Roe(Table(a3), Table(b3)).mean);
    EXPECT_GE(ab.mean, 0.0);
    EXPECT_LE(ab.mean, 1.0);
  }
}

TEST(RoeSuiteTest, TwelveVariablesGiveSixtySixPairs) {
  Dataset d = SimulateCensus(300, 4);
  RoeSuiteResult r = RoeSuite(d, d);
  EXPECT_EQ(r.n_bivariate, 66u);
  EXPECT_EQ(r.univariate.size(), 12u);
  EXPECT_EQ(r.roe_uni, 1.0);
  EXPECT_EQ(r.roe_bi, 1.0);
}

TEST(RoeSuiteTest, RandomDatasetsMatchRecount) {
  std::mt19937_64 gen(8);
  for (int rep = 0; rep < 30; ++rep) {
    std::uniform_int_distribution<int> lv(1, 4);
    std::vector<int> levels = {lv(gen), lv(gen), lv(gen), lv(gen)};
    Dataset a = testing::RandomCategorical(gen, 25, levels);
    Dataset b = testing::RandomCategorical(gen, 35, levels);
    EXPECT_NEAR(RoeSuite(a, b).roe_bi, BruteForceRoeBi(a, b), 1e-12);
  }
}

TEST(PmseTest, CopyIsIndistinguishable) {
  Dataset d = SimulateCensus(500, 9);
  PmseResult r = Pmse(d, d);
  EXPECT_LT(r.pmse, 1e-20);
  EXPECT_DOUBLE_EQ(r.c, 0.5);
  EXPECT_EQ(r.scaled, 1.0);
  EXPECT_EQ(r.n, 1000);
  EXPECT_TRUE(r.model_converged);
}

TEST(PmseTest, SeparatingVariableIsWorstCase) {
  auto schema = MakeSchema({VariableSpec::Categorical("G", {"o", "s"}),
                            VariableSpec::Categorical("X", {"a", "b"})});
  std::vector<int32_t> x_o, x_s;
  for (int i = 0; i < 100; ++i) {
    x_o.push_back(i % 2);
    x_s.push_back((i / 2) % 2);
  }
  Dataset orig(schema, {std::vector<int32_t>(100, 0), x_o});
  Dataset synth(schema, {std::vector<int32_t>(100, 1), x_s});
  PmseResult r = Pmse(orig, synth);
  EXPECT_TRUE(r.separation_detected);
  EXPECT_NEAR(r.pmse, 0.25, 1e-3);
  EXPECT_NEAR(r.scaled, 0.0, 4e-3);
  EXPECT_EQ(r.k, 3);
}

TEST(PmseTest, NullExpectationFormula) {
  Dataset a = SimulateCensus(400, 1);
  Dataset b = SimulateCensus(200, 2);
  PmseResult r = Pmse(a, b);
  EXPECT_NEAR(r.c, 1.0 / 3.0, 1e-15);
  const double expected = (r.k - 1) * (1 - r.c) * (1 - r.c) * r.c / 600.0;
  EXPECT_DOUBLE_EQ(r.expected_null, expected);
  EXPECT_DOUBLE_EQ(r.ratio, r.pmse / expected);
  EXPECT_DOUBLE_EQ(r.log_ratio, std::log(r.ratio));
  EXPECT_DOUBLE_EQ(r.scaled, 1 - 4 * r.pmse);
}

TEST(CioTest, HandComputedOverlaps) {
  EXPECT_DOUBLE_EQ(IntervalOverlap({0, 2}, {1, 3}), 0.5);
  EXPECT_DOUBLE_EQ(IntervalOverlap({0, 1}, {2, 3}), -1.0);
  EXPECT_DOUBLE_EQ(IntervalOverlap({0, 4}, {1, 2}), 0.5 * (0.25 + 1.0));
  EXPECT_DOUBLE_EQ(IntervalOverlap({0, 1}, {0, 1}), 1.0);
}

TEST(CioTest, IdenticalDataGivesFullOverlap) {
  Dataset d = SimulateCensus(2000, 12);
  CioResult r = CioSuite(d, d);
  ASSERT_TRUE(r.mean_cio.has_value());
  EXPECT_NEAR(*r.mean_cio, 1.0, 1e-12);
  EXPECT_NEAR(*r.mean_std_diff, 0.0, 1e-12);
  ASSERT_EQ(r.per_model.size(), 12u);
  for (const CioModel& m : r.per_model) {
    if (!m.converged) continue;
    EXPECT_NEAR(m.mean_cio, 1.0, 1e-12) << m.target;
  }
  EXPECT_EQ(r.per_model[1].family, "linear");
  EXPECT_EQ(r.per_model[1].response, "AGE");
  EXPECT_EQ(r.per_model[9].response, "SEX=2");
}

TEST(CioTest, ConstantResponseIsIsolatedFailure) {
  auto schema = MakeSchema({VariableSpec::Categorical("A", {"u", "v"}),
                            VariableSpec::Integer("N", 0, 100)});
  std::mt19937_64 gen(1);
  std::vector<int32_t> a(60), n(60);
  for (int i = 0; i < 60; ++i) {
    a[i] = 0;
    n[i] = static_cast<int32_t>(gen() % 100);
  }
  std::vector<int32_t> a2 = a;
  a2[0] = 1;
  Dataset orig(schema, {a, n});
  Dataset synth(schema, {a2, n});
  CioResult r = CioSuite(orig, synth);
  EXPECT_EQ(r.per_model[0].failure, "original: ConstantResponse");
  EXPECT_GE(r.n_failed, 1u);
}

TEST(CioTest, FloorClampsNegativeOverlap) {
  auto schema = MakeSchema({VariableSpec::Integer("Y", 0, 1000),
                            VariableSpec::Integer("X", 0, 100)});
  std::mt19937_64 gen(3);
  std::normal_distribution<double> noise(0, 1);
  std::vector<int32_t> x(200), y1(200), y2(200);
  for (int i = 0; i < 200; ++i) {
    x[i] = i % 100;
    y1[i] = static_cast<int32_t>(std::lround(500 + 3 * x[i] + noise(gen)));
    y2[i] = static_cast<int32_t>(std::lround(500 - 3 * x[i] + 300 + noise(gen)));
  }
  Dataset orig(schema, {y1, x});
  Dataset synth(schema, {y2, x});
  CioOptions opts;
  CioResult raw = CioSuite(orig, synth, opts);
  opts.floor_at_zero = true;
  CioResult floored = CioSuite(orig, synth, opts);
  EXPECT_LT(raw.per_model[0].mean_cio, 0.0);
  EXPECT_EQ(floored.per_model[0].mean_cio, 0.0);
  EXPECT_GT(raw.per_model[0].std_diff, 10.0);
}

TEST(MetricsTest, RowShuffleInvariance) {
  Dataset orig = SimulateCensus(600, 30);
  Dataset synth = SimulateCensus(500, 31);
  std::vector<size_t> perm(synth.n_rows());
  for (size_t i = 0; i < perm.size(); ++i) perm[i] = perm.size() - 1 - i;
  std::mt19937_64 gen(1);
  std::shuffle(perm.begin(), perm.end(), gen);
  Dataset shuffled = synth.SelectRows(perm);
  UtilityReport a = EvaluateUtility(orig, synth);
  UtilityReport b = EvaluateUtility(orig, shuffled);
  EXPECT_NEAR(a.roe_uni, b.roe_uni, 1e-12);
  EXPECT_NEAR(a.roe_bi, b.roe_bi, 1e-12);
  EXPECT_NEAR(a.pmse.pmse, b.pmse.pmse, 1e-10);
  ASSERT_TRUE(a.cio.mean_cio && b.cio.mean_cio);
  EXPECT_NEAR(*a.cio.mean_cio, *b.cio.mean_cio, 1e-8);
}

TEST(OverallUtilityTest, MonotoneInEachComponent) {
  const double base = OverallUtility(0.5, 0.5, 0.5, 0.5);
  EXPECT_GT(OverallUtility(0.6, 0.5, 0.5, 0.5), base);
  EXPECT_GT(OverallUtility(0.5, 0.6, 0.5, 0.5), base);
  EXPECT_GT(OverallUtility(0.5, 0.5, 0.6, 0.5), base);
  EXPECT_GT(OverallUtility(0.5, 0.5, 0.5, 0.6), base);
}

TEST(OverallUtilityTest, PrintedComponents) {
  EXPECT_NEAR(OverallUtility(0.981, 0.847, 0.506, 0.9994), 0.833, 0.0005);
  EXPECT_NEAR(OverallUtility(0.499, 0.255, std::nullopt, 0.2988), 0.351, 0.0005);
  EXPECT_EQ(OverallUtility(1, 1, 1, 1), 1.0);
  try {
    OverallUtility(std::nullopt, std::nullopt, std::nullopt, std::nullopt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoComponents);
  }
}

TEST(EvaluateUtilityTest, IdentityFixedPoint) {
  Dataset d = SimulateCensus(1500, 21);
  UtilityReport r = EvaluateUtility(d, d);
  EXPECT_EQ(r.roe_uni, 1.0);
  EXPECT_EQ(r.roe_bi, 1.0);
  EXPECT_LT(r.pmse.pmse, 1e-8);
  EXPECT_NEAR(r.overall, 1.0, 1e-12);
  EXPECT_EQ(r.components_used,
            (std::vector<std::string>{"roe_uni", "roe_bi", "cio", "pmse_scaled"}));
}

}  // namespace
}  // namespace rutk
