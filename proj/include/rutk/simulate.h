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

#ifndef RUTK_SIMULATE_H_
#define RUTK_SIMULATE_H_

#include <cstddef>
#include <cstdint>
#include <memory>

#include "rutk/tabular.h"

namespace rutk {

// Twelve census-style variables: AREAP (21 areas), AGE (0-95), COBIRTH (13),
// ECONPRIM (10), ETHGROUP (10), FAMTYPE (9), LTILL (2), MSTATUS (5),
// QUALNUM (3), SEX (2), SOCLASS (9), TENURE (7).
std::shared_ptr<const Schema> SimulatedCensusSchema();

// Draws a corpus from a fixed generative model with planted dependencies
// (marital status, economic position and illness on age; ethnicity on
// area; country of birth on ethnicity; social class on qualifications;
// tenure on class, age and area). Children (AGE <= 15) are always single.
Dataset SimulateCensus(size_t n, uint64_t seed);

}  // namespace rutk

#endif  // RUTK_SIMULATE_H_
