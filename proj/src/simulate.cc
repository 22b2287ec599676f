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

#include "rutk/simulate.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "rutk/error.h"
#include "rutk/random.h"

namespace rutk {

namespace {

std::vector<std::string> Codes(int count) {
  std::vector<std::string> out;
  for (int i = 1; i <= count; ++i) out.push_back(std::to_string(i));
  return out;
}

std::vector<std::string> CodesWithNa(int count) {
  std::vector<std::string> out = Codes(count);
  out.push_back("NA");
  return out;
}

// Samples an index from unnormalized weights mixed with a uniform floor.
int32_t Draw(Rng& rng, std::vector<double> w, double floor = 0.005) {
  double total = 0;
  for (double x : w) total += x;
  const double add = floor * total;
  total = 0;
  for (double& x : w) {
    x += add;
    total += x;
  }
  double u = rng.Uniform() * total;
  for (size_t i = 0; i < w.size(); ++i) {
    if (u < w[i]) return static_cast<int32_t>(i);
    u -= w[i];
  }
  return static_cast<int32_t>(w.size() - 1);
}

double Logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

enum Var : size_t {
  kAreap, kAge, kCobirth, kEconprim, kEthgroup, kFamtype,
  kLtill, kMstatus, kQualnum, kSex, kSoclass, kTenure,
};

}  // namespace

std::shared_ptr<const Schema> SimulatedCensusSchema() {
  std::vector<VariableSpec> vars = {
      VariableSpec::Categorical("AREAP", Codes(21)),
      VariableSpec::Integer("AGE", 0, 95),
      VariableSpec::Categorical("COBIRTH", Codes(13)),
      VariableSpec::Categorical("ECONPRIM", CodesWithNa(9), true),
      VariableSpec::Categorical("ETHGROUP", Codes(10)),
      VariableSpec::Categorical("FAMTYPE", CodesWithNa(8), true),
      VariableSpec::Categorical("LTILL", Codes(2)),
      VariableSpec::Categorical("MSTATUS", Codes(5)),
      VariableSpec::Categorical("QUALNUM", {"0", "1", "2"}),
      VariableSpec::Categorical("SEX", Codes(2)),
      VariableSpec::Categorical("SOCLASS", CodesWithNa(8), true),
      VariableSpec::Categorical("TENURE", CodesWithNa(6), true),
  };
  return std::make_shared<const Schema>("simsars", std::move(vars));
}

Dataset SimulateCensus(size_t n, uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "n must be at least 1");
  Rng rng(seed);
  std::vector<std::vector<int32_t>> cols(12, std::vector<int32_t>(n));

  std::vector<double> area_w(21);
  for (size_t i = 0; i < area_w.size(); ++i) {
    area_w[i] = 3.0 + static_cast<double>((i * 7) % 5) + (i == 0 ? 6.0 : 0.0);
  }
  const std::array<int, 8> age_edges = {0, 5, 16, 25, 45, 65, 80, 96};
  const std::vector<double> age_w = {6.5, 13.5, 12, 29, 23, 12, 4};

  for (size_t r = 0; r < n; ++r) {
    const int32_t area = Draw(rng, area_w, 0.0);
    const int32_t sex = Draw(rng, {0.485, 0.515}, 0.0);
    const int32_t band = Draw(rng, age_w, 0.0);
    const int32_t age =
        age_edges[band] +
        static_cast<int32_t>(rng.UniformIndex(
            static_cast<size_t>(age_edges[band + 1] - age_edges[band])));
    const bool female = sex == 1;

    // 0 single, 1 married, 2 remarried, 3 divorced, 4 widowed
    int32_t mstatus = 0;
    if (age > 15) {
      if (age < 25) {
        mstatus = Draw(rng, {0.85, 0.13, 0.005, 0.01, 0.005}, 0.002);
      } else if (age < 45) {
        mstatus = Draw(rng, {0.25, 0.58, 0.07, 0.09, 0.01});
      } else if (age < 65) {
        mstatus = Draw(rng, {0.08, 0.65, 0.10, 0.10, 0.07});
      } else if (female) {
        mstatus = Draw(rng, {0.08, 0.33, 0.04, 0.04, 0.51});
      } else {
        mstatus = Draw(rng, {0.07, 0.50, 0.06, 0.04, 0.33});
      }
    }

    std::vector<double> eth_w = {0.72, 0.04, 0.03, 0.03, 0.05, 0.04, 0.03, 0.02, 0.02, 0.02};
    const double eth_mult = area < 3 ? 3.0 : (area >= 15 ? 0.4 : 1.0);
    for (size_t k = 1; k < eth_w.size(); ++k) eth_w[k] *= eth_mult;
    const int32_t eth = Draw(rng, eth_w, 0.0);

    int32_t cob;
    if (eth == 0) {
      cob = Draw(rng, {0.86, 0.04, 0.03, 0.01, 0.02, 0.01, 0.005, 0.005, 0.005,
                       0.005, 0.005, 0.005, 0.005});
    } else {
      const double uk = age < 30 ? 0.6 : 0.25;
      std::vector<double> w(13, 0.01);
      w[0] = uk;
      w[static_cast<size_t>(6 + (eth - 1) % 7)] += 1.0 - uk;
      cob = Draw(rng, w);
    }

    // 0 employee .. 8 other, 9 NA
    int32_t econ;
    if (age <= 15) {
      econ = Draw(rng, {0, 0, 0, 0, 0.04, 0, 0, 0, 0.01, 0.95}, 0.002);
    } else if (age < 25) {
      econ = Draw(rng, {0.45, 0.03, 0.05, 0.10, 0.25, 0.01, 0.002, 0.08, 0.02, 0.01});
    } else if (age < 65) {
      if (female) {
        econ = Draw(rng, {0.52, 0.04, 0.01, 0.05, 0.01, 0.05, 0.02, 0.27, 0.02, 0.01});
      } else {
        econ = Draw(rng, {0.63, 0.12, 0.01, 0.09, 0.01, 0.06, 0.03, 0.02, 0.02, 0.01});
      }
    } else {
      econ = Draw(rng, {0.05, 0.03, 0.0, 0.01, 0.0, 0.04, 0.80, 0.05, 0.01, 0.01});
    }

    int32_t qual;
    if (age <= 15) {
      qual = Draw(rng, {0.98, 0.015, 0.005}, 0.0);
    } else {
      double young = age < 45 ? 1.0 : 0.0;
      double student = econ == 4 ? 1.2 : 0.0;
      double p_any = Logistic(-1.7 + 0.5 * young + student + (econ == 0 ? 0.4 : 0.0));
      qual = Draw(rng, {1 - p_any, 0.65 * p_any, 0.35 * p_any}, 0.0);
    }

    // classes 0..7, 8 NA
    int32_t soclass;
    const bool working = econ <= 3;
    if (!working && rng.Uniform() < 0.9) {
      soclass = 8;
    } else if (qual == 2) {
      soclass = Draw(rng, {0.25, 0.40, 0.15, 0.08, 0.05, 0.03, 0.02, 0.01, 0.01});
    } else if (qual == 1) {
      soclass = Draw(rng, {0.08, 0.35, 0.22, 0.15, 0.10, 0.05, 0.03, 0.01, 0.01});
    } else {
      soclass = Draw(rng, {0.02, 0.10, 0.17, 0.28, 0.20, 0.15, 0.06, 0.01, 0.01});
    }

    double ill = -4.2 + 0.045 * age + (econ == 5 ? 3.0 : 0.0) + (econ == 6 ? 0.3 : 0.0);
    const int32_t ltill = rng.Uniform() < std::clamp(Logistic(ill), 0.01, 0.95) ? 0 : 1;

    // 0 couple+children, 1 couple no children, 2 lone parent, 3 child in
    // family, 4 cohabiting, 5 lone pensioner, 6 other household, 7 other
    // family, 8 NA (not in a family)
    int32_t fam;
    if (age <= 15) {
      fam = Draw(rng, {0.05, 0.0, 0.02, 0.85, 0.02, 0, 0.03, 0.02, 0.01}, 0.002);
    } else if (mstatus == 1 || mstatus == 2) {
      fam = age < 55 ? Draw(rng, {0.55, 0.30, 0.01, 0.01, 0.02, 0.0, 0.03, 0.05, 0.03})
                     : Draw(rng, {0.15, 0.70, 0.01, 0.0, 0.01, 0.02, 0.03, 0.05, 0.03});
    } else if (age < 25) {
      fam = Draw(rng, {0.02, 0.02, 0.06, 0.55, 0.15, 0.0, 0.08, 0.02, 0.10});
    } else if (age < 65) {
      fam = Draw(rng, {0.02, 0.02, 0.18, 0.08, 0.20, 0.02, 0.15, 0.03, 0.30});
    } else {
      fam = Draw(rng, {0.01, 0.02, 0.02, 0.01, 0.02, 0.60, 0.10, 0.04, 0.18});
    }

    // 0 owned outright, 1 mortgage, 2 private rent, 3 council, 4 housing
    // association, 5 other, 6 NA
    std::vector<double> ten_w;
    if (age >= 65) {
      ten_w = {0.45, 0.08, 0.07, 0.30, 0.04, 0.03, 0.03};
    } else if (soclass <= 2) {
      ten_w = {0.12, 0.70, 0.08, 0.04, 0.02, 0.02, 0.02};
    } else if (soclass <= 5) {
      ten_w = {0.10, 0.48, 0.10, 0.24, 0.04, 0.02, 0.02};
    } else {
      ten_w = {0.08, 0.25, 0.14, 0.40, 0.06, 0.03, 0.04};
    }
    if (area < 3) {
      ten_w[3] *= 1.6;
      ten_w[2] *= 1.3;
    }
    const int32_t tenure = Draw(rng, ten_w);

    cols[kAreap][r] = area;
    cols[kAge][r] = age;
    cols[kCobirth][r] = cob;
    cols[kEconprim][r] = econ;
    cols[kEthgroup][r] = eth;
    cols[kFamtype][r] = fam;
    cols[kLtill][r] = ltill;
    cols[kMstatus][r] = mstatus;
    cols[kQualnum][r] = qual;
    cols[kSex][r] = sex;
    cols[kSoclass][r] = soclass;
    cols[kTenure][r] = tenure;
  }
  return Dataset(SimulatedCensusSchema(), std::move(cols));
}

}  // namespace rutk
