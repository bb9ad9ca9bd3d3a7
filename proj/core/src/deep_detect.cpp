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

#include "sbdetect/deep_detect.hpp"

#include <algorithm>
#include <string>

#include "sbdetect/error.hpp"
#include "sbdetect/position_matrix.hpp"
#include "sbdetect/stat_tests.hpp"

namespace sbd {

DeepBiasReport predict_matrix(const Network& network, const PositionMatrix& matrix) {
  const std::size_t n = network.config().sample_size;
  if (matrix.runs() != n)
    fail(ErrorCategory::kShape, "position matrix has " + std::to_string(matrix.runs()) +
                                    " runs but the model expects sample_size " + std::to_string(n));
  require(matrix.dims() >= 1, "position matrix has no dimensions");

  const std::size_t d = matrix.dims();
  Eigen::MatrixXd inputs(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t j = 0; j < d; ++j) {
    const auto sorted = preprocess(matrix.column(j), n);
    std::copy(sorted.begin(), sorted.end(), inputs.col(static_cast<Eigen::Index>(j)).data());
  }
  const Eigen::MatrixXd probs = network.forward_batch(inputs);

  DeepBiasReport report;
  report.per_dimension.reserve(d);
  for (std::size_t j = 0; j < d; ++j) {
    std::array<double, kNumClasses> p{};
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      p[c] = probs(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(j));
      report.aggregated[c] += p[c];
    }
    report.per_dimension.push_back(make_prediction(p));
    if (report.per_dimension.back().label != BiasClass::kUniform) ++report.non_uniform_count;
  }
  for (auto& v : report.aggregated) v /= static_cast<double>(d);
  report.aggregated_label = make_prediction(report.aggregated).label;
  report.fraction_non_uniform = static_cast<double>(report.non_uniform_count) / static_cast<double>(d);
  report.biased = meets_ten_percent_rule(report.non_uniform_count, d);
  return report;
}

}  // namespace sbd
