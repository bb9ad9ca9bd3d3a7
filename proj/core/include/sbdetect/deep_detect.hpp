// Copyright 2026 The sbdetect Authors
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

#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "sbdetect/classes.hpp"
#include "sbdetect/network.hpp"

namespace sbd {

class PositionMatrix;

struct DeepBiasReport {
  std::vector<Prediction> per_dimension;
  // Elementwise mean of the per-dimension probability vectors.
  std::array<double, kNumClasses> aggregated{};
  // Argmax of `aggregated`.
  BiasClass aggregated_label = BiasClass::kUniform;
  std::size_t non_uniform_count = 0;
  double fraction_non_uniform = 0.0;
  bool biased = false;
};

// One prediction per dimension from that dimension's sorted coordinates.
// Throws Error(kShape) when the matrix run count differs from the model's
// sample_size.
DeepBiasReport predict_matrix(const Network& network, const PositionMatrix& matrix);

}  // namespace sbd
