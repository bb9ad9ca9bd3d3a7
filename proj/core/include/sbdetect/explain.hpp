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
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sbdetect/classes.hpp"
#include "sbdetect/dataset.hpp"
#include "sbdetect/network.hpp"

namespace sbd {

// B sorted reference samples stored as the columns of a (sample_size x B)
// matrix. Masked points take their value from these.
class BackgroundSet {
 public:
  static constexpr std::size_t kMinSize = 10;
  static constexpr std::size_t kDefaultSize = 100;

  // Each sample is sorted on the way in; throws when fewer than kMinSize
  // samples are given or lengths differ.
  explicit BackgroundSet(const std::vector<std::vector<double>>& samples);

  // The first `size` uniform-class samples of a training set, in a seeded
  // random order.
  static BackgroundSet from_training(const std::vector<LabeledSample>& samples, std::size_t size,
                                     std::uint64_t seed);
  // Fresh U(0,1) samples.
  static BackgroundSet uniform(std::size_t sample_size, std::size_t size, std::uint64_t seed);

  std::size_t size() const { return static_cast<std::size_t>(samples_.cols()); }
  std::size_t sample_size() const { return static_cast<std::size_t>(samples_.rows()); }
  const Eigen::MatrixXd& samples() const { return samples_; }

 private:
  Eigen::MatrixXd samples_;
};

// Maps a batch of inputs (columns) to one scalar output per column.
using BatchModel = std::function<Eigen::VectorXd(const Eigen::MatrixXd&)>;

// Probability of `target` from a network's softmax output.
BatchModel class_probability_model(const Network& network, BiasClass target);

struct Attribution {
  BiasClass target_class = BiasClass::kUniform;
  // The sorted sample the attribution refers to.
  std::vector<double> values;
  std::vector<double> phi;
  double base_value = 0.0;
  double prediction_value = 0.0;

  double phi_sum() const;
  // sum(phi) - (prediction_value - base_value)
  double efficiency_residual() const;
};

struct ShapleyOptions {
  // Evaluated coalitions in sampled mode; 0 means 128 * sample_size.
  std::size_t n_coalitions = 0;
  // Enumerate every coalition instead of sampling.
  bool exhaustive = false;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kMaxExhaustiveFeatures = 12;

// Value of a coalition: the model output averaged over the background,
// where points outside the coalition take the background value at the same
// sorted index and the mixed vector is re-sorted. phi solves the kernel
// weighted regression over coalitions with sum(phi) pinned to
// prediction_value - base_value.
//
// Sampled mode draws coalition sizes with probability proportional to the
// total kernel weight of that size and pairs every coalition with its
// complement. Exhaustive mode (sample_size <= 12) uses every coalition with
// its exact kernel weight, which yields the exact Shapley values.
Attribution shapley_attribute(const BatchModel& model, std::span<const double> sample,
                              const BackgroundSet& background, BiasClass target,
                              const ShapleyOptions& options);

Attribution shapley_attribute(const Network& network, std::span<const double> sample,
                              const BackgroundSet& background, BiasClass target,
                              std::size_t n_coalitions, std::uint64_t seed);

// Header: index,value,phi. A comment-free table; base and prediction values
// live in the report, not here.
std::string format_attribution_csv(const Attribution& attribution);
// Returns (values, phi).
std::pair<std::vector<double>, std::vector<double>> parse_attribution_csv(const std::string& text);

}  // namespace sbd
