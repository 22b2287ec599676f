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

#include "rutk/regress.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

namespace rutk {
namespace {

DesignMatrix WithIntercept(const std::vector<double>& x, const std::vector<double>& y) {
  DesignMatrix dm;
  const auto n = static_cast<Eigen::Index>(x.size());
  dm.x.resize(n, 2);
  dm.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    dm.x(i, 0) = 1;
    dm.x(i, 1) = x[static_cast<size_t>(i)];
    dm.y[i] = y[static_cast<size_t>(i)];
  }
  dm.names = {"(Intercept)", "x"};
  dm.indicator = {false, false};
  return dm;
}

// Closed-form simple regression in extended precision.
std::pair<long double, long double> ClosedFormOls(const std::vector<double>& x,
                                                  const std::vector<double>& y) {
  long double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  long double sxy = 0, sxx = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const long double slope = sxy / sxx;
  return {my - slope * mx, slope};
}

// Two-parameter logistic log-likelihood maximized by cyclic golden-section
// search, one coordinate at a time.
std::pair<double, double> GoldenSectionLogit(const std::vector<double>& x,
                                             const std::vector<double>& y) {
  auto ll = [&](long double a, long double b) {
    long double s = 0;
    for (size_t i = 0; i < x.size(); ++i) {
      const long double eta = a + b * x[i];
      s += y[i] * eta - std::log1p(std::exp(eta));
    }
    return s;
  };
  auto golden = [](auto f, long double lo, long double hi) {
    const long double g = (std::sqrt(5.0L) - 1) / 2;
    long double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
    for (int it = 0; it < 200; ++it) {
      if (f(c) > f(d)) {
        hi = d;
      } else {
        lo = c;
      }
      c = hi - g * (hi - lo);
      d = lo + g * (hi - lo);
    }
    return (lo + hi) / 2;
  };
  long double a = 0, b = 0;
  for (int sweep = 0; sweep < 200; ++sweep) {
    a = golden([&](long double t) { return ll(t, b); }, -5, 5);
    b = golden([&](long double t) { return ll(a, t); }, -5, 5);
  }
  return {static_cast<double>(a), static_cast<double>(b)};
}

TEST(NormalQuantileTest, KnownValues) {
  EXPECT_NEAR(NormalQuantile(0.975), 1.959963984540054, 1e-12);
  EXPECT_NEAR(NormalQuantile(0.5), 0.0, 1e-15);
  EXPECT_NEAR(NormalQuantile(0.025), -1.959963984540054, 1e-12);
  EXPECT_NEAR(NormalQuantile(0.995), 2.5758293035489004, 1e-12);
  EXPECT_NEAR(NormalQuantile(1e-10), -6.361340902404056, 1e-9);
}

TEST(LinearTest, ExactLineRecovered) {
  std::vector<double> x, y;
  for (int i = 0; i < 10; ++i) {
    x.push_back(i);
    y.push_back(2.0 * i + 1.0);
  }
  RegressionFit fit = FitLinear(WithIntercept(x, y));
  EXPECT_NEAR(fit.coef[0], 1.0, 1e-10);
  EXPECT_NEAR(fit.coef[1], 2.0, 1e-10);
  EXPECT_LT(fit.se[0], 1e-10);
  EXPECT_LT(fit.se[1], 1e-10);
  EXPECT_TRUE(fit.converged);
}

TEST(LinearTest, NoisyLineMatchesClosedForm) {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> ux(-3, 3);
  std::vector<double> x, y;
  for (int i = 0; i < 1000; ++i) {
    x.push_back(ux(gen));
    y.push_back(x.back() + noise(gen));
  }
  RegressionFit fit = FitLinear(WithIntercept(x, y));
  auto [a, b] = ClosedFormOls(x, y);
  EXPECT_NEAR(fit.coef[0], static_cast<double>(a), 1e-10);
  EXPECT_NEAR(fit.coef[1], static_cast<double>(b), 1e-10);
  EXPECT_NEAR(fit.coef[1], 1.0, 0.1);
}

TEST(LinearTest, StandardErrorsMatchTextbookFormula) {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> noise(0.0, 2.0);
  std::vector<double> x, y;
  for (int i = 0; i < 50; ++i) {
    x.push_back(i * 0.1);
    y.push_back(3 - x.back() + noise(gen));
  }
  RegressionFit fit = FitLinear(WithIntercept(x, y));
  double rss = 0, mx = 0;
  for (double v : x) mx += v;
  mx /= x.size();
  double sxx = 0, sx2 = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.coef[0] - fit.coef[1] * x[i];
    rss += r * r;
    sxx += (x[i] - mx) * (x[i] - mx);
    sx2 += x[i] * x[i];
  }
  const double s2 = rss / (x.size() - 2);
  EXPECT_NEAR(fit.se[1], std::sqrt(s2 / sxx), 1e-10);
  EXPECT_NEAR(fit.se[0], std::sqrt(s2 * sx2 / (x.size() * sxx)), 1e-10);
}

TEST(LinearTest, DuplicatedColumnIsRankDeficient) {
  DesignMatrix dm;
  dm.x.resize(5, 3);
  dm.y.resize(5);
  for (int i = 0; i < 5; ++i) {
    dm.x(i, 0) = 1;
    dm.x(i, 1) = i;
    dm.x(i, 2) = i;
    dm.y[i] = i * i;
  }
  dm.names = {"(Intercept)", "a", "b"};
  try {
    FitLinear(dm);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRankDeficient);
  }
  EXPECT_EQ(DesignRank(dm), 2);
}

TEST(LinearTest, TemplatedOnScalar) {
  BasicDesignMatrix<long double> dm;
  dm.x.resize(6, 2);
  dm.y.resize(6);
  for (int i = 0; i < 6; ++i) {
    dm.x(i, 0) = 1;
    dm.x(i, 1) = i;
    dm.y[i] = 0.5L - 3.0L * i;
  }
  auto fit = FitLinear(dm);
  EXPECT_NEAR(static_cast<double>(fit.coef[1]), -3.0, 1e-15);
}

TEST(LogisticTest, InterceptOnlyIsSampleLogit) {
  DesignMatrix dm;
  dm.x = Eigen::MatrixXd::Ones(100, 1);
  dm.y = Eigen::VectorXd::Zero(100);
  for (int i = 0; i < 30; ++i) dm.y[i] = 1;
  dm.names = {"(Intercept)"};
  RegressionFit fit = FitLogistic(dm);
  ASSERT_TRUE(fit.converged);
  EXPECT_NEAR(fit.coef[0], std::log(0.3 / 0.7), 1e-6);
  EXPECT_NEAR(fit.coef[0], -0.8473, 1e-4);
  // Closed-form se of a logit: 1 / sqrt(n p (1 - p)).
  EXPECT_NEAR(fit.se[0], 1.0 / std::sqrt(100 * 0.3 * 0.7), 1e-6);
}

TEST(LogisticTest, IndependentResponseMatchesGoldenSection) {
  std::mt19937_64 gen(2024);
  std::normal_distribution<double> nx(0, 1);
  std::bernoulli_distribution coin(0.5);
  std::vector<double> x, y;
  for (int i = 0; i < 200; ++i) {
    x.push_back(nx(gen));
    y.push_back(coin(gen) ? 1 : 0);
  }
  RegressionFit fit = FitLogistic(WithIntercept(x, y));
  ASSERT_TRUE(fit.converged);
  auto [a, b] = GoldenSectionLogit(x, y);
  EXPECT_NEAR(fit.coef[0], a, 1e-5);
  EXPECT_NEAR(fit.coef[1], b, 1e-5);
  EXPECT_LT(std::abs(fit.coef[0]), 3 * fit.se[0]);
  EXPECT_LT(std::abs(fit.coef[1]), 3 * fit.se[1]);
  EXPECT_FALSE(fit.separation_detected);
}

TEST(LogisticTest, SeparatedIndicatorFlagged) {
  DesignMatrix dm;
  dm.x.resize(40, 2);
  dm.y.resize(40);
  for (int i = 0; i < 40; ++i) {
    dm.x(i, 0) = 1;
    dm.x(i, 1) = i < 20 ? 1 : 0;
    dm.y[i] = i < 20 ? 1 : 0;
  }
  dm.names = {"(Intercept)", "g"};
  dm.indicator = {false, true};
  RegressionFit fit = FitLogistic(dm);
  EXPECT_TRUE(fit.separation_detected);
  auto p = FittedProbabilities(fit, dm);
  EXPECT_GE(p.minCoeff(), kProbabilityClamp);
  EXPECT_LE(p.maxCoeff(), 1 - kProbabilityClamp);
}

TEST(LogisticTest, RejectsNonBinaryResponse) {
  DesignMatrix dm;
  dm.x = Eigen::MatrixXd::Ones(3, 1);
  dm.y = Eigen::VectorXd::Constant(3, 2.0);
  try {
    FitLogistic(dm);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotBinaryResponse);
  }
}

TEST(LogisticTest, IterationCapReportsNonConvergence) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> nx(0, 1);
  std::vector<double> x, y;
  for (int i = 0; i < 100; ++i) {
    x.push_back(nx(gen));
    y.push_back(x.back() + nx(gen) > 0 ? 1 : 0);
  }
  LogisticOptions opts;
  opts.max_iter = 1;
  RegressionFit fit = FitLogistic(WithIntercept(x, y), opts);
  EXPECT_FALSE(fit.converged);
  EXPECT_THROW(ConfidenceIntervals(fit, 0.95), Error);
}

TEST(LogisticTest, ScoreVanishesOnRandomInstances) {
  std::mt19937_64 gen(99);
  std::normal_distribution<double> nx(0, 1);
  for (int rep = 0; rep < 25; ++rep) {
    const int n = 80 + rep * 7;
    DesignMatrix dm;
    dm.x.resize(n, 4);
    dm.y.resize(n);
    for (int i = 0; i < n; ++i) {
      dm.x(i, 0) = 1;
      double eta = 0.2;
      for (int j = 1; j < 4; ++j) {
        dm.x(i, j) = nx(gen);
        eta += 0.5 * j * dm.x(i, j) / 3;
      }
      dm.y[i] = nx(gen) < eta ? 1 : 0;
    }
    RegressionFit fit = FitLogistic(dm);
    ASSERT_TRUE(fit.converged);
    EXPECT_LT(fit.score_norm, 1e-8);
  }
}

TEST(ConfidenceIntervalTest, NormalInterval) {
  RegressionFit fit;
  fit.coef = Eigen::VectorXd::Constant(1, 1.0);
  fit.se = Eigen::VectorXd::Constant(1, 0.5);
  fit.converged = true;
  auto ci = ConfidenceIntervals(fit, 0.95);
  EXPECT_NEAR(ci[0].lower, 0.020, 1e-3);
  EXPECT_NEAR(ci[0].upper, 1.980, 1e-3);
  EXPECT_NEAR((ci[0].lower + ci[0].upper) / 2, 1.0, 1e-15);
}

TEST(ConfidenceIntervalTest, LevelBounds) {
  RegressionFit fit;
  fit.coef = Eigen::VectorXd::Constant(1, 1.0);
  fit.se = Eigen::VectorXd::Constant(1, 0.5);
  fit.converged = true;
  for (double level : {0.0, 1.0, -0.1, 1.5}) {
    try {
      ConfidenceIntervals(fit, level);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidLevel);
    }
  }
}

TEST(ConfidenceIntervalTest, ZeroSeGivesDegenerateInterval) {
  RegressionFit fit;
  fit.coef = Eigen::VectorXd::Constant(1, 2.5);
  fit.se = Eigen::VectorXd::Zero(1);
  fit.converged = true;
  auto ci = ConfidenceIntervals(fit, 0.9);
  EXPECT_EQ(ci[0].lower, 2.5);
  EXPECT_EQ(ci[0].upper, 2.5);
}

TEST(ConfidenceIntervalTest, WidthGrowsWithLevel) {
  RegressionFit fit;
  fit.coef = Eigen::VectorXd::Constant(1, 0.0);
  fit.se = Eigen::VectorXd::Constant(1, 1.0);
  fit.converged = true;
  double prev = 0;
  for (double level : {0.5, 0.8, 0.9, 0.95, 0.99}) {
    const auto ci = ConfidenceIntervals(fit, level);
    EXPECT_GT(ci[0].upper - ci[0].lower, prev);
    prev = ci[0].upper - ci[0].lower;
  }
}

}  // namespace
}  // namespace rutk
