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

#include "sbdetect/metrics.hpp"

#include <algorithm>
#include <array>

#include "sbdetect/error.hpp"
#include "sbdetect/network.hpp"
#include "sbdetect/training.hpp"

namespace sbd {

ConfusionMatrix::ConfusionMatrix(std::size_t classes) : n_(classes), cells_(classes * classes, 0) {
  require(classes >= 1, "confusion matrix needs at least one class");
}

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted, std::size_t count) {
  require(truth < n_ && predicted < n_, "confusion matrix index out of range");
  cells_[truth * n_ + predicted] += count;
}

std::size_t ConfusionMatrix::at(std::size_t truth, std::size_t predicted) const {
  require(truth < n_ && predicted < n_, "confusion matrix index out of range");
  return cells_[truth * n_ + predicted];
}

std::size_t ConfusionMatrix::total() const {
  std::size_t t = 0;
  for (auto v : cells_) t += v;
  return t;
}

double ConfusionMatrix::precision(std::size_t c) const {
  std::size_t predicted = 0;
  for (std::size_t r = 0; r < n_; ++r) predicted += at(r, c);
  return predicted ? static_cast<double>(at(c, c)) / static_cast<double>(predicted) : 0.0;
}

double ConfusionMatrix::recall(std::size_t c) const {
  std::size_t actual = 0;
  for (std::size_t k = 0; k < n_; ++k) actual += at(c, k);
  return actual ? static_cast<double>(at(c, c)) / static_cast<double>(actual) : 0.0;
}

double ConfusionMatrix::f1(std::size_t c) const {
  const double p = precision(c);
  const double r = recall(c);
  return (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

double ConfusionMatrix::macro_f1() const {
  double sum = 0.0;
  for (std::size_t c = 0; c < n_; ++c) sum += f1(c);
  return sum / static_cast<double>(n_);
}

double ConfusionMatrix::accuracy() const {
  const std::size_t t = total();
  if (t == 0) return 0.0;
  std::size_t diag = 0;
  for (std::size_t c = 0; c < n_; ++c) diag += at(c, c);
  return static_cast<double>(diag) / static_cast<double>(t);
}

Evaluation evaluate(const Network& network, const std::vector<LabeledSample>& samples) {
  require(!samples.empty(), "evaluate: empty sample set");
  Evaluation ev;
  const std::size_t n = network.config().sample_size;
  constexpr std::size_t kChunk = 256;
  Workspace ws;
  for (std::size_t start = 0; start < samples.size(); start += kChunk) {
    const std::size_t count = std::min(kChunk, samples.size() - start);
    std::vector<LabeledSample> chunk(samples.begin() + static_cast<std::ptrdiff_t>(start),
                                     samples.begin() + static_cast<std::ptrdiff_t>(start + count));
    const Eigen::MatrixXd x = to_input_matrix(chunk, n);
    const Eigen::MatrixXd& probs = network.forward_batch(x, ws);
    for (std::size_t i = 0; i < count; ++i) {
      std::array<double, kNumClasses> p{};
      for (std::size_t c = 0; c < kNumClasses; ++c)
        p[c] = probs(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(i));
      ev.confusion.add(class_index(chunk[i].label), class_index(make_prediction(p).label));
    }
  }
  ev.macro_f1 = ev.confusion.macro_f1();
  ev.accuracy = ev.confusion.accuracy();
  return ev;
}

void BinaryCounts::add(bool truth_biased, bool predicted_biased) {
  if (truth_biased) {
    (predicted_biased ? tp : fn) += 1;
  } else {
    (predicted_biased ? fp : tn) += 1;
  }
}

double BinaryCounts::false_positive_rate() const {
  return (fp + tn) ? static_cast<double>(fp) / static_cast<double>(fp + tn) : 0.0;
}

double BinaryCounts::false_negative_rate() const {
  return (fn + tp) ? static_cast<double>(fn) / static_cast<double>(fn + tp) : 0.0;
}

double BinaryCounts::f1() const {
  const std::size_t denom = 2 * tp + fp + fn;
  return denom ? 2.0 * static_cast<double>(tp) / static_cast<double>(denom) : 0.0;
}

}  // namespace sbd
