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
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sbdetect/classes.hpp"

namespace sbd {

// Topology: [conv, conv, maxpool] x 2 -> flatten -> dense(ReLU) -> softmax
// head. Convolutions use zero "same" padding, so only pooling shrinks the
// length; a trailing partial pooling window is kept.
struct NetworkConfig {
  std::size_t sample_size = 100;
  int block1_filters = 32;
  int block2_filters = 16;
  int kernel_size = 5;
  int pool_window = 2;
  int dense_units = 64;
  static constexpr int n_classes = static_cast<int>(kNumClasses);

  // Defaults for a given input length; block 2 is half the width of block 1.
  static NetworkConfig for_sample_size(std::size_t n, int block1_filters = 32);

  std::size_t pooled1_length() const;
  std::size_t pooled2_length() const;
  std::size_t flat_size() const { return pooled2_length() * static_cast<std::size_t>(block2_filters); }
  void validate() const;

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

// One named weight or bias array inside the flat parameter vector. Arrays
// are column-major `rows x cols`. Convolution kernels have one row per
// output channel and columns indexed by tap * in_channels + in_channel.
struct ParamBlock {
  std::string name;
  std::size_t offset;
  std::size_t rows;
  std::size_t cols;
  std::size_t size() const { return rows * cols; }
};

std::vector<ParamBlock> parameter_layout(const NetworkConfig& config);
std::size_t parameter_count(const NetworkConfig& config);

struct TrainingMetadata {
  int epochs_trained = 0;
  int best_epoch = 0;
  double final_train_loss = std::numeric_limits<double>::quiet_NaN();
  double final_val_loss = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
};

struct Prediction {
  std::array<double, kNumClasses> probabilities{};
  BiasClass label = BiasClass::kUniform;
};

// Argmax with ties going to the lowest class index.
Prediction make_prediction(const std::array<double, kNumClasses>& probabilities);

// Sorted ascending copy. Throws Error(kShape) when the length differs from
// `sample_size` and Error(kValidation) for values outside [0,1].
std::vector<double> preprocess(std::span<const double> values, std::size_t sample_size);

// ---- layer primitives ----------------------------------------------------------

enum class Activation { kNone, kRelu };

// Cross-correlation with zero same-padding. `input` is channels x length,
// `kernels` is out_channels x (kernel_size * channels), `bias` has one entry
// per output channel. Output is out_channels x length.
Eigen::MatrixXd conv1d(const Eigen::MatrixXd& input, const Eigen::MatrixXd& kernels,
                       const Eigen::VectorXd& bias, int kernel_size, Activation activation);

// Non-overlapping max pooling along the length axis (stride = window).
Eigen::MatrixXd maxpool(const Eigen::MatrixXd& input, int window);

// Scratch buffers for batched passes; reusing one avoids reallocating the
// im2col matrices on every mini-batch.
struct Workspace {
  Eigen::MatrixXd col1, z1, a1, col2, z2, a2, p1;
  Eigen::MatrixXd col3, z3, a3, col4, z4, a4, p2;
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> idx1, idx2;
  Eigen::MatrixXd flat, zd, ad, logits, probs;
  // Backward buffers.
  Eigen::MatrixXd d_logits, d_ad, d_flat, d_p2, d_a4, d_col, d_a3, d_p1, d_a2, d_a1;
};

class Network {
 public:
  // All-zero parameters.
  explicit Network(NetworkConfig config);
  Network(NetworkConfig config, std::vector<double> parameters, TrainingMetadata metadata = {});

  // Fan-in scaled uniform weights (He for ReLU layers, LeCun for the head),
  // zero biases.
  static Network initialize(const NetworkConfig& config, std::uint64_t seed);

  const NetworkConfig& config() const { return config_; }
  std::span<const double> parameters() const { return parameters_; }
  const TrainingMetadata& metadata() const { return metadata_; }
  const std::vector<ParamBlock>& layout() const { return layout_; }
  Eigen::Map<const Eigen::MatrixXd> block(std::size_t index) const;

  // Single sorted input of length sample_size.
  Prediction forward(std::span<const double> preprocessed) const;

  // Columns of `inputs` (sample_size x B) are sorted samples. Returns the
  // 5 x B probability matrix. Safe to call concurrently.
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs) const;
  const Eigen::MatrixXd& forward_batch(const Eigen::MatrixXd& inputs, Workspace& ws) const;

  // Mean cross-entropy over the batch and its gradient with respect to every
  // parameter (same layout as parameters()). Returns the loss; `correct`
  // receives the number of argmax hits when non-null.
  double loss_and_gradient(const Eigen::MatrixXd& inputs, std::span<const int> labels,
                           std::vector<double>& gradient, Workspace& ws,
                           std::size_t* correct = nullptr) const;
  double loss(const Eigen::MatrixXd& inputs, std::span<const int> labels) const;

 private:
  friend class TrainerAccess;

  NetworkConfig config_;
  std::vector<ParamBlock> layout_;
  std::vector<double> parameters_;
  TrainingMetadata metadata_;
};

}  // namespace sbd
