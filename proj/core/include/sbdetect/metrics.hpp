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

#include <cstddef>
#include <vector>

#include "sbdetect/classes.hpp"
#include "sbdetect/dataset.hpp"

namespace sbd {

class Network;

// Square confusion matrix; rows are true classes, columns predictions.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes = kNumClasses);

  void add(std::size_t truth, std::size_t predicted, std::size_t count = 1);
  std::size_t at(std::size_t truth, std::size_t predicted) const;
  std::size_t classes() const { return n_; }
  std::size_t total() const;

  double precision(std::size_t c) const;
  double recall(std::size_t c) const;
  // 2PR/(P+R), defined as 0 when P+R = 0.
  double f1(std::size_t c) const;
  // Unweighted mean of f1 over all classes.
  double macro_f1() const;
  double accuracy() const;

 private:
  std::size_t n_;
  std::vector<std::size_t> cells_;
};

struct Evaluation {
  ConfusionMatrix confusion{kNumClasses};
  double macro_f1 = 0.0;
  double accuracy = 0.0;
};

Evaluation evaluate(const Network& network, const std::vector<LabeledSample>& samples);

// Binary (biased vs unbiased) counts, positive = biased.
struct BinaryCounts {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

  void add(bool truth_biased, bool predicted_biased);
  double false_positive_rate() const;
  double false_negative_rate() const;
  // 2TP / (2TP + FP + FN); 0 when the denominator vanishes.
  double f1() const;
};

}  // namespace sbd
