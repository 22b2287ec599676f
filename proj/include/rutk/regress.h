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

#ifndef RUTK_REGRESS_H_
#define RUTK_REGRESS_H_

// Ordinary least squares and binary logistic regression (Newton/IRLS)
// with coefficient standard errors and normal-theory confidence intervals.
// Everything is templated on the scalar type; the library instantiates
// double.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rutk/error.h"

namespace rutk {

template <typename Scalar>
struct BasicDesignMatrix {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix x;
  Vector y;
  std::vector<std::string> names;
  // True for 0/1 indicator columns (subject to the separation check).
  std::vector<bool> indicator;
  std::vector<std::string> warnings;

  Eigen::Index n() const { return x.rows(); }
  Eigen::Index p() const { return x.cols(); }
};

enum class FitKind { kLinear, kLogistic };

template <typename Scalar>
struct BasicRegressionFit {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  FitKind kind = FitKind::kLinear;
  std::vector<std::string> names;
  Vector coef;
  Vector se;
  bool converged = false;
  int iterations = 0;
  bool separation_detected = false;
  // Max-norm of the (penalized) score at the returned iterate; logistic only.
  Scalar score_norm = 0;
  Eigen::Index n = 0;
  Eigen::Index p = 0;
};

using DesignMatrix = BasicDesignMatrix<double>;
using RegressionFit = BasicRegressionFit<double>;

struct LogisticOptions {
  int max_iter = 50;
  double tol = 1e-8;
  double ridge = 1e-6;
};

// Coefficients beyond this magnitude on an indicator column flag separation.
inline constexpr double kSeparationThreshold = 15.0;
inline constexpr double kProbabilityClamp = 1e-12;

struct Interval {
  double lower = 0;
  double upper = 0;
};

// Standard-normal quantile function.
double NormalQuantile(double p);

template <typename Scalar>
Eigen::Index DesignRank(const BasicDesignMatrix<Scalar>& dm) {
  Eigen::ColPivHouseholderQR<typename BasicDesignMatrix<Scalar>::Matrix> qr(dm.x);
  return qr.rank();
}

template <typename Scalar>
BasicRegressionFit<Scalar> FitLinear(const BasicDesignMatrix<Scalar>& dm) {
  using Matrix = typename BasicDesignMatrix<Scalar>::Matrix;
  using Vector = typename BasicDesignMatrix<Scalar>::Vector;
  const Eigen::Index n = dm.n();
  const Eigen::Index p = dm.p();
  if (dm.y.size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "response length != rows");
  }
  if (n <= p) {
    throw Error(ErrorCode::kInvalidArgument,
                "linear fit needs more rows than columns");
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(dm.x);
  const auto& perm = qr.colsPermutation().indices();
  if (qr.rank() < p) {
    std::string cols;
    for (Eigen::Index k = qr.rank(); k < p; ++k) {
      if (!cols.empty()) cols += ", ";
      auto j = static_cast<size_t>(perm[k]);
      cols += j < dm.names.size() ? dm.names[j] : std::to_string(j);
    }
    throw Error(ErrorCode::kRankDeficient, "collinear columns: " + cols);
  }

  BasicRegressionFit<Scalar> fit;
  fit.kind = FitKind::kLinear;
  fit.names = dm.names;
  fit.n = n;
  fit.p = p;
  fit.coef = qr.solve(dm.y);
  const Vector resid = dm.y - dm.x * fit.coef;
  const Scalar sigma2 = resid.squaredNorm() / static_cast<Scalar>(n - p);

  // X P = Q R, so (X'X)^-1 = P R^-1 R^-T P'; its diagonal for column perm[k]
  // is the squared norm of row k of R^-1.
  const Matrix r = qr.matrixR().topLeftCorner(p, p).template triangularView<Eigen::Upper>();
  const Matrix r_inv = r.template triangularView<Eigen::Upper>().solve(
      Matrix::Identity(p, p));
  fit.se.resize(p);
  for (Eigen::Index k = 0; k < p; ++k) {
    fit.se[perm[k]] = std::sqrt(sigma2 * r_inv.row(k).squaredNorm());
  }
  fit.converged = true;
  fit.iterations = 1;
  return fit;
}

namespace detail {

template <typename Scalar>
Scalar Logistic(Scalar eta) {
  if (eta >= 0) return Scalar(1) / (Scalar(1) + std::exp(-eta));
  const Scalar e = std::exp(eta);
  return e / (Scalar(1) + e);
}

// log(1 + exp(eta)) without overflow.
template <typename Scalar>
Scalar Log1pExp(Scalar eta) {
  if (eta > 0) return eta + std::log1p(std::exp(-eta));
  return std::log1p(std::exp(eta));
}

template <typename Scalar>
bool IsConstantOne(const typename BasicDesignMatrix<Scalar>::Matrix& x,
                   Eigen::Index col) {
  return (x.col(col).array() == Scalar(1)).all();
}

}  // namespace detail

// Maximizes the log-likelihood minus ridge/2 * |beta|^2, where the penalty
// skips an all-ones (intercept) column. Non-convergence is reported through
// `converged == false` with the last iterate retained.
template <typename Scalar>
BasicRegressionFit<Scalar> FitLogistic(const BasicDesignMatrix<Scalar>& dm,
                                       const LogisticOptions& opts = {}) {
  using Matrix = typename BasicDesignMatrix<Scalar>::Matrix;
  using Vector = typename BasicDesignMatrix<Scalar>::Vector;
  const Eigen::Index n = dm.n();
  const Eigen::Index p = dm.p();
  if (dm.y.size() != n || n == 0 || p == 0) {
    throw Error(ErrorCode::kInvalidArgument, "empty or inconsistent design");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (dm.y[i] != Scalar(0) && dm.y[i] != Scalar(1)) {
      throw Error(ErrorCode::kNotBinaryResponse,
                  "response must be 0/1 for logistic regression");
    }
  }

  Vector penalty = Vector::Constant(p, Scalar(opts.ridge));
  Vector beta = Vector::Zero(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (detail::IsConstantOne<Scalar>(dm.x, j)) {
      penalty[j] = 0;
      Scalar ybar = dm.y.mean();
      ybar = std::clamp(ybar, Scalar(1e-6), Scalar(1 - 1e-6));
      beta[j] = std::log(ybar / (1 - ybar));
      break;
    }
  }

  auto objective = [&](const Vector& b) {
    const Vector eta = dm.x * b;
    Scalar ll = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      ll += dm.y[i] * eta[i] - detail::Log1pExp(eta[i]);
    }
    return ll - Scalar(0.5) * (penalty.array() * b.array().square()).sum();
  };

  BasicRegressionFit<Scalar> fit;
  fit.kind = FitKind::kLogistic;
  fit.names = dm.names;
  fit.n = n;
  fit.p = p;

  Vector prob(n);
  Vector score(p);
  Scalar current = objective(beta);
  int iter = 0;
  for (;; ++iter) {
    const Vector eta = dm.x * beta;
    for (Eigen::Index i = 0; i < n; ++i) prob[i] = detail::Logistic(eta[i]);
    score = dm.x.transpose() * (dm.y - prob) -
            (penalty.array() * beta.array()).matrix();
    fit.score_norm = score.cwiseAbs().maxCoeff();
    if (!std::isfinite(fit.score_norm)) break;
    if (fit.score_norm < Scalar(opts.tol)) {
      fit.converged = true;
      break;
    }
    if (iter >= opts.max_iter) break;

    const Vector w = (prob.array() * (Scalar(1) - prob.array())).matrix();
    Matrix info = dm.x.transpose() * w.asDiagonal() * dm.x;
    info.diagonal() += penalty;
    const Vector step = info.ldlt().solve(score);

    // Step halving, with a relative slack for rounding noise.
    const Scalar slack = Scalar(1e-12) * (Scalar(1) + std::abs(current));
    Scalar scale = 1;
    Vector next = beta + step;
    Scalar value = objective(next);
    for (int h = 0; h < 30 && !(value >= current - slack); ++h) {
      scale /= 2;
      next = beta + scale * step;
      value = objective(next);
    }
    beta = next;
    current = value;
  }
  fit.iterations = iter;
  fit.coef = beta;

  const Vector eta = dm.x * beta;
  Vector w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar pi = detail::Logistic(eta[i]);
    w[i] = pi * (Scalar(1) - pi);
  }
  Matrix info = dm.x.transpose() * w.asDiagonal() * dm.x;
  info.diagonal() += penalty;
  const Matrix cov = info.ldlt().solve(Matrix::Identity(p, p));
  fit.se = cov.diagonal().cwiseMax(Scalar(0)).cwiseSqrt();

  for (Eigen::Index j = 0; j < p; ++j) {
    const bool is_indicator =
        static_cast<size_t>(j) < dm.indicator.size() && dm.indicator[j];
    if (is_indicator && std::abs(beta[j]) > Scalar(kSeparationThreshold)) {
      fit.separation_detected = true;
    }
  }
  return fit;
}

// Fitted probabilities clamped to [1e-12, 1 - 1e-12].
template <typename Scalar>
typename BasicDesignMatrix<Scalar>::Vector FittedProbabilities(
    const BasicRegressionFit<Scalar>& fit, const BasicDesignMatrix<Scalar>& dm) {
  typename BasicDesignMatrix<Scalar>::Vector out = dm.x * fit.coef;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out[i] = std::clamp(detail::Logistic(out[i]), Scalar(kProbabilityClamp),
                        Scalar(1 - kProbabilityClamp));
  }
  return out;
}

template <typename Scalar>
std::vector<Interval> ConfidenceIntervals(const BasicRegressionFit<Scalar>& fit,
                                          double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw Error(ErrorCode::kInvalidLevel, "level must lie in (0, 1)");
  }
  if (!fit.converged) {
    throw Error(ErrorCode::kNotConverged, "confidence intervals need a converged fit");
  }
  const double z = NormalQuantile(0.5 + level / 2.0);
  std::vector<Interval> out(static_cast<size_t>(fit.coef.size()));
  for (Eigen::Index j = 0; j < fit.coef.size(); ++j) {
    const double b = static_cast<double>(fit.coef[j]);
    const double half = z * static_cast<double>(fit.se[j]);
    out[static_cast<size_t>(j)] = {b - half, b + half};
  }
  return out;
}

extern template BasicRegressionFit<double> FitLinear(const BasicDesignMatrix<double>&);
extern template BasicRegressionFit<double> FitLogistic(const BasicDesignMatrix<double>&,
                                                       const LogisticOptions&);
extern template std::vector<Interval> ConfidenceIntervals(
    const BasicRegressionFit<double>&, double);

}  // namespace rutk

#endif  // RUTK_REGRESS_H_
