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

#include "sbdetect/dataset.hpp"
#include "sbdetect/network.hpp"

namespace sbd {

struct TrainConfig {
  int epochs = 50;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  // Share of the training file held back for monitoring when the caller
  // does not supply a separate validation set (see split_for_monitoring).
  double validation_fraction = 0.1;
  // Restore the weights from the epoch with the lowest validation loss.
  bool keep_best = true;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  Network network;
  std::vector<EpochStats> history;
};

using EpochCallback = std::function<void(const EpochStats&)>;

// Mini-batch Adam on mean cross-entropy. Deterministic for a given seed:
// initialization, shuffle order and summation order are all fixed.
TrainResult train(const std::vector<LabeledSample>& train_set,
                  const std::vector<LabeledSample>& validation_set,
                  const NetworkConfig& network_config, const TrainConfig& train_config,
                  const EpochCallback& on_epoch = {});

// Stratified split of a training set into (fit, monitor) parts.
std::pair<std::vector<LabeledSample>, std::vector<LabeledSample>> split_for_monitoring(
    const std::vector<LabeledSample>& samples, double fraction, std::uint64_t seed);

// Sorted samples as columns, ready for Network::forward_batch.
Eigen::MatrixXd to_input_matrix(const std::vector<LabeledSample>& samples, std::size_t sample_size);

struct LossAccuracy {
  double loss = 0.0;
  double accuracy = 0.0;
};
LossAccuracy evaluate_loss(const Network& network, const std::vector<LabeledSample>& samples);

// Header: epoch,train_loss,train_acc,val_loss,val_acc.
std::string format_history_csv(const std::vector<EpochStats>& history);
std::vector<EpochStats> parse_history_csv(const std::string& text);

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::size_t worst_parameter = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

// Central differences with step h against the analytic gradient of the
// single-sample loss, for every parameter. Relative error is
// |a - n| / max(|a|, |n|, floor).
GradientCheckResult gradient_check(const Network& network, std::span<const double> sample,
                                   BiasClass label, double h = 1e-5, double floor = 1e-8);

// A copy of `network` with parameters moved by -rate * gradient.
Network gradient_step(const Network& network, std::span<const double> gradient, double rate);

}  // namespace sbd
