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

#include "sbdetect/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "sbdetect/error.hpp"
#include "sbdetect/io_util.hpp"
#include "sbdetect/rng.hpp"

namespace sbd {

class TrainerAccess {
 public:
  static std::vector<double>& parameters(Network& net) { return net.parameters_; }
  static void set_metadata(Network& net, const TrainingMetadata& m) { net.metadata_ = m; }
};

namespace {

using Eigen::Index;
using Eigen::MatrixXd;

constexpr std::size_t kEvalChunk = 256;

void shuffle_indices(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.index(i)]);
}

void check_samples(const std::vector<LabeledSample>& samples, std::size_t sample_size,
                   const char* what) {
  for (const auto& s : samples) {
    if (s.values.size() != sample_size) {
      fail(ErrorCategory::kShape, std::string(what) + ": sample of length " +
                                      std::to_string(s.values.size()) +
                                      " does not match model sample size " +
                                      std::to_string(sample_size));
    }
  }
}

}  // namespace

void TrainConfig::validate() const {
  require(epochs >= 1, "train: epochs must be >= 1");
  require(batch_size >= 1, "train: batch_size must be >= 1");
  require(learning_rate > 0.0 && std::isfinite(learning_rate), "train: learning_rate must be > 0");
  require(validation_fraction > 0.0 && validation_fraction < 1.0,
          "train: validation_fraction must lie in (0,1)");
}

MatrixXd to_input_matrix(const std::vector<LabeledSample>& samples, std::size_t sample_size) {
  MatrixXd x(static_cast<Index>(sample_size), static_cast<Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto sorted = preprocess(samples[i].values, sample_size);
    std::copy(sorted.begin(), sorted.end(), x.col(static_cast<Index>(i)).data());
  }
  return x;
}

LossAccuracy evaluate_loss(const Network& network, const std::vector<LabeledSample>& samples) {
  require(!samples.empty(), "evaluate_loss: empty sample set");
  const std::size_t n = network.config().sample_size;
  check_samples(samples, n, "evaluate_loss");
  Workspace ws;
  double total = 0.0;
  std::size_t hits = 0;
  for (std::size_t start = 0; start < samples.size(); start += kEvalChunk) {
    const std::size_t count = std::min(kEvalChunk, samples.size() - start);
    MatrixXd x(static_cast<Index>(n), static_cast<Index>(count));
    for (std::size_t i = 0; i < count; ++i) {
      const auto sorted = preprocess(samples[start + i].values, n);
      std::copy(sorted.begin(), sorted.end(), x.col(static_cast<Index>(i)).data());
    }
    const MatrixXd& probs = network.forward_batch(x, ws);
    for (std::size_t i = 0; i < count; ++i) {
      const Index col = static_cast<Index>(i);
      const int y = static_cast<int>(samples[start + i].label);
      total += -std::log(std::max(probs(y, col), 1e-300));
      Index arg = 0;
      probs.col(col).maxCoeff(&arg);
      if (arg == y) ++hits;
    }
  }
  const double m = static_cast<double>(samples.size());
  return {total / m, static_cast<double>(hits) / m};
}

std::pair<std::vector<LabeledSample>, std::vector<LabeledSample>> split_for_monitoring(
    const std::vector<LabeledSample>& samples, double fraction, std::uint64_t seed) {
  require(fraction > 0.0 && fraction < 1.0, "split_for_monitoring: fraction must lie in (0,1)");
  std::vector<LabeledSample> fit, monitor;
  for (BiasClass c : kAllClasses) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < samples.size(); ++i)
      if (samples[i].label == c) idx.push_back(i);
    Rng rng(derive_seed(seed, {0x6d6f6e, class_index(c)}));
    shuffle_indices(idx, rng);
    const auto held = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(idx.size())));
    std::vector<std::size_t> held_idx(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(held));
    std::vector<std::size_t> fit_idx(idx.begin() + static_cast<std::ptrdiff_t>(held), idx.end());
    std::sort(held_idx.begin(), held_idx.end());
    std::sort(fit_idx.begin(), fit_idx.end());
    for (auto i : held_idx) monitor.push_back(samples[i]);
    for (auto i : fit_idx) fit.push_back(samples[i]);
  }
  return {std::move(fit), std::move(monitor)};
}

TrainResult train(const std::vector<LabeledSample>& train_set,
                  const std::vector<LabeledSample>& validation_set,
                  const NetworkConfig& network_config, const TrainConfig& train_config,
                  const EpochCallback& on_epoch) {
  network_config.validate();
  train_config.validate();
  require(!train_set.empty(), "train: empty training set");
  require(!validation_set.empty(), "train: empty validation set");
  const std::size_t n = network_config.sample_size;
  check_samples(train_set, n, "train");
  check_samples(validation_set, n, "train");

  Network net = Network::initialize(network_config, derive_seed(train_config.seed, {1}));
  auto& params = TrainerAccess::parameters(net);
  std::vector<double> grad, m(params.size(), 0.0), v(params.size(), 0.0);
  std::vector<double> best_params = params;
  double best_val = std::numeric_limits<double>::infinity();
  int best_epoch = 0;

  const MatrixXd inputs = to_input_matrix(train_set, n);
  std::vector<int> labels(train_set.size());
  for (std::size_t i = 0; i < train_set.size(); ++i) labels[i] = static_cast<int>(train_set[i].label);

  Rng shuffle_rng(derive_seed(train_config.seed, {2}));
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  Workspace ws;
  MatrixXd batch_x;
  std::vector<int> batch_y;
  std::vector<EpochStats> history;
  long long step = 0;
  const double b1 = train_config.beta1, b2 = train_config.beta2;

  for (int epoch = 1; epoch <= train_config.epochs; ++epoch) {
    shuffle_indices(order, shuffle_rng);
    double loss_sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t start = 0; start < order.size(); start += train_config.batch_size) {
      const std::size_t count = std::min(train_config.batch_size, order.size() - start);
      batch_x.resize(static_cast<Index>(n), static_cast<Index>(count));
      batch_y.resize(count);
      for (std::size_t i = 0; i < count; ++i) {
        batch_x.col(static_cast<Index>(i)) = inputs.col(static_cast<Index>(order[start + i]));
        batch_y[i] = labels[order[start + i]];
      }
      std::size_t batch_hits = 0;
      const double loss = net.loss_and_gradient(batch_x, batch_y, grad, ws, &batch_hits);
      if (!std::isfinite(loss)) {
        fail(ErrorCategory::kDivergence, "train: loss became non-finite at epoch " +
                                             std::to_string(epoch) + ", step " +
                                             std::to_string(step + 1));
      }
      loss_sum += loss * static_cast<double>(count);
      hits += batch_hits;

      ++step;
      const double c1 = 1.0 - std::pow(b1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(b2, static_cast<double>(step));
      const double lr = train_config.learning_rate;
      for (std::size_t p = 0; p < params.size(); ++p) {
        m[p] = b1 * m[p] + (1.0 - b1) * grad[p];
        v[p] = b2 * v[p] + (1.0 - b2) * grad[p] * grad[p];
        params[p] -= lr * (m[p] / c1) / (std::sqrt(v[p] / c2) + train_config.epsilon);
      }
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(train_set.size());
    stats.train_accuracy = static_cast<double>(hits) / static_cast<double>(train_set.size());
    const auto val = evaluate_loss(net, validation_set);
    stats.val_loss = val.loss;
    stats.val_accuracy = val.accuracy;
    if (!std::isfinite(stats.val_loss)) {
      fail(ErrorCategory::kDivergence, "train: validation loss non-finite at epoch " +
                                           std::to_string(epoch));
    }
    history.push_back(stats);
    if (stats.val_loss < best_val) {
      best_val = stats.val_loss;
      best_epoch = epoch;
      best_params = params;
    }
    if (on_epoch) on_epoch(stats);
  }

  TrainingMetadata meta;
  meta.epochs_trained = train_config.epochs;
  meta.seed = train_config.seed;
  meta.final_train_loss = history.back().train_loss;
  if (train_config.keep_best) {
    params = best_params;
    meta.best_epoch = best_epoch;
    meta.final_val_loss = best_val;
  } else {
    meta.best_epoch = train_config.epochs;
    meta.final_val_loss = history.back().val_loss;
  }
  TrainerAccess::set_metadata(net, meta);
  return {std::move(net), std::move(history)};
}

std::string format_history_csv(const std::vector<EpochStats>& history) {
  std::string out = "epoch,train_loss,train_acc,val_loss,val_acc\n";
  for (const auto& h : history) {
    out += std::to_string(h.epoch) + "," + format_real(h.train_loss) + "," +
           format_real(h.train_accuracy) + "," + format_real(h.val_loss) + "," +
           format_real(h.val_accuracy) + "\n";
  }
  return out;
}

std::vector<EpochStats> parse_history_csv(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines.front() != "epoch,train_loss,train_acc,val_loss,val_acc") {
    fail(ErrorCategory::kParse, "history: bad header");
  }
  std::vector<EpochStats> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split_fields(lines[i]);
    if (f.size() != 5) fail(ErrorCategory::kParse, "history: expected 5 fields");
    out.push_back({static_cast<int>(parse_integer(f[0])), parse_real(f[1]), parse_real(f[2]),
                   parse_real(f[3]), parse_real(f[4])});
  }
  return out;
}

GradientCheckResult gradient_check(const Network& network, std::span<const double> sample,
                                   BiasClass label, double h, double floor) {
  const std::size_t n = network.config().sample_size;
  const auto sorted = preprocess(sample, n);
  MatrixXd x = Eigen::Map<const MatrixXd>(sorted.data(), static_cast<Index>(n), 1);
  const std::vector<int> y = {static_cast<int>(label)};

  Workspace ws;
  std::vector<double> analytic;
  network.loss_and_gradient(x, y, analytic, ws);

  std::vector<double> params(network.parameters().begin(), network.parameters().end());
  GradientCheckResult result;
  for (std::size_t p = 0; p < params.size(); ++p) {
    const double saved = params[p];
    params[p] = saved + h;
    const double up = Network(network.config(), params).loss(x, y);
    params[p] = saved - h;
    const double down = Network(network.config(), params).loss(x, y);
    params[p] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(analytic[p]), std::abs(numeric), floor});
    const double rel = std::abs(analytic[p] - numeric) / denom;
    if (rel > result.max_relative_error) {
      result.max_relative_error = rel;
      result.worst_parameter = p;
      result.worst_analytic = analytic[p];
      result.worst_numeric = numeric;
    }
  }
  return result;
}

Network gradient_step(const Network& network, std::span<const double> gradient, double rate) {
  require(gradient.size() == network.parameters().size(), "gradient_step: size mismatch");
  std::vector<double> params(network.parameters().begin(), network.parameters().end());
  for (std::size_t p = 0; p < params.size(); ++p) params[p] -= rate * gradient[p];
  return Network(network.config(), std::move(params), network.metadata());
}

}  // namespace sbd
