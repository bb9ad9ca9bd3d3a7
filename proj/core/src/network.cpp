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

#include "sbdetect/network.hpp"

#include <algorithm>
#include <cmath>

#include "sbdetect/error.hpp"
#include "sbdetect/rng.hpp"

namespace sbd {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using IndexMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

enum Block : std::size_t {
  kConv1W, kConv1B, kConv2W, kConv2B, kConv3W, kConv3B, kConv4W, kConv4B,
  kDenseW, kDenseB, kHeadW, kHeadB, kNumBlocks
};

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

// in: C x (L*B), segments of length L per sample. out: (K*C) x (L*B).
void im2col(const MatrixXd& in, Index length, Index batch, int kernel, MatrixXd& out) {
  const Index channels = in.rows();
  const Index pad = (kernel - 1) / 2;
  out.resize(kernel * channels, length * batch);
  for (Index b = 0; b < batch; ++b) {
    const Index base = b * length;
    for (Index t = 0; t < length; ++t) {
      double* dst = out.col(base + t).data();
      for (int j = 0; j < kernel; ++j) {
        const Index src = t + j - pad;
        if (src < 0 || src >= length) {
          std::fill_n(dst + j * channels, channels, 0.0);
        } else {
          std::copy_n(in.col(base + src).data(), channels, dst + j * channels);
        }
      }
    }
  }
}

// Adjoint of im2col: accumulates column gradients back onto the input.
void col2im(const MatrixXd& cols, Index channels, Index length, Index batch, int kernel,
            MatrixXd& out) {
  const Index pad = (kernel - 1) / 2;
  out.setZero(channels, length * batch);
  for (Index b = 0; b < batch; ++b) {
    const Index base = b * length;
    for (Index t = 0; t < length; ++t) {
      const double* src = cols.col(base + t).data();
      for (int j = 0; j < kernel; ++j) {
        const Index pos = t + j - pad;
        if (pos < 0 || pos >= length) continue;
        double* dst = out.col(base + pos).data();
        const double* s = src + j * channels;
        for (Index c = 0; c < channels; ++c) dst[c] += s[c];
      }
    }
  }
}

void pool_forward(const MatrixXd& in, Index length, Index batch, int window, MatrixXd& out,
                  IndexMatrix& argmax) {
  const Index channels = in.rows();
  const Index pooled = static_cast<Index>(ceil_div(length, window));
  out.resize(channels, pooled * batch);
  argmax.resize(channels, pooled * batch);
  for (Index b = 0; b < batch; ++b) {
    for (Index t = 0; t < pooled; ++t) {
      const Index first = b * length + t * window;
      const Index last = b * length + std::min<Index>((t + 1) * window, length);
      const Index o = b * pooled + t;
      for (Index c = 0; c < channels; ++c) {
        Index best = first;
        double v = in(c, first);
        for (Index s = first + 1; s < last; ++s) {
          if (in(c, s) > v) {
            v = in(c, s);
            best = s;
          }
        }
        out(c, o) = v;
        argmax(c, o) = static_cast<int>(best);
      }
    }
  }
}

void pool_backward(const MatrixXd& d_out, const IndexMatrix& argmax, Index source_cols,
                   MatrixXd& d_in) {
  d_in.setZero(d_out.rows(), source_cols);
  for (Index o = 0; o < d_out.cols(); ++o) {
    for (Index c = 0; c < d_out.rows(); ++c) d_in(c, argmax(c, o)) += d_out(c, o);
  }
}

// Row sums go through an aligned temporary before landing in the gradient
// slice, which keeps the summation order independent of the slice address.
void bias_gradient(const MatrixXd& d, Eigen::Map<MatrixXd> out) {
  const Eigen::VectorXd sum = d.rowwise().sum();
  out.col(0) = sum;
}

void relu_inplace(const MatrixXd& z, MatrixXd& a) { a = z.cwiseMax(0.0); }

void relu_backward(const MatrixXd& z, MatrixXd& d) {
  d.array() *= (z.array() > 0.0).cast<double>();
}

void check_inputs(const NetworkConfig& config, const MatrixXd& inputs) {
  if (static_cast<std::size_t>(inputs.rows()) != config.sample_size) {
    fail(ErrorCategory::kShape, "network expects samples of length " +
                                    std::to_string(config.sample_size) + ", got " +
                                    std::to_string(inputs.rows()));
  }
  require(inputs.cols() >= 1, "network: empty batch");
}

}  // namespace

// ---- config ----------------------------------------------------------------------

NetworkConfig NetworkConfig::for_sample_size(std::size_t n, int block1_filters) {
  NetworkConfig c;
  c.sample_size = n;
  c.block1_filters = block1_filters;
  c.block2_filters = (block1_filters + 1) / 2;
  return c;
}

std::size_t NetworkConfig::pooled1_length() const {
  return pool_window > 0 ? ceil_div(sample_size, static_cast<std::size_t>(pool_window)) : 0;
}

std::size_t NetworkConfig::pooled2_length() const {
  return pool_window > 0 ? ceil_div(pooled1_length(), static_cast<std::size_t>(pool_window)) : 0;
}

void NetworkConfig::validate() const {
  require(sample_size >= 1, "network: sample_size must be >= 1");
  require(block1_filters >= 1 && block2_filters >= 1, "network: filter counts must be >= 1");
  require(kernel_size >= 1, "network: kernel_size must be >= 1");
  require(static_cast<std::size_t>(kernel_size) <= sample_size,
          "network: kernel_size exceeds sample_size");
  require(pool_window >= 1, "network: pool_window must be >= 1");
  require(dense_units >= 1, "network: dense_units must be >= 1");
  require(pooled2_length() >= 1, "network: feature length after pooling must be >= 1");
}

std::vector<ParamBlock> parameter_layout(const NetworkConfig& c) {
  c.validate();
  const std::size_t f1 = c.block1_filters, f2 = c.block2_filters, k = c.kernel_size;
  const std::size_t d = c.dense_units, n = NetworkConfig::n_classes;
  std::vector<ParamBlock> blocks = {
      {"conv1.weight", 0, f1, k * 1}, {"conv1.bias", 0, f1, 1},
      {"conv2.weight", 0, f1, k * f1}, {"conv2.bias", 0, f1, 1},
      {"conv3.weight", 0, f2, k * f1}, {"conv3.bias", 0, f2, 1},
      {"conv4.weight", 0, f2, k * f2}, {"conv4.bias", 0, f2, 1},
      {"dense.weight", 0, d, c.flat_size()}, {"dense.bias", 0, d, 1},
      {"head.weight", 0, n, d}, {"head.bias", 0, n, 1},
  };
  std::size_t offset = 0;
  for (auto& b : blocks) {
    b.offset = offset;
    offset += b.size();
  }
  return blocks;
}

std::size_t parameter_count(const NetworkConfig& config) {
  const auto layout = parameter_layout(config);
  return layout.back().offset + layout.back().size();
}

// ---- predictions -----------------------------------------------------------------

Prediction make_prediction(const std::array<double, kNumClasses>& probabilities) {
  Prediction p;
  p.probabilities = probabilities;
  std::size_t best = 0;
  for (std::size_t i = 1; i < kNumClasses; ++i) {
    if (probabilities[i] > probabilities[best]) best = i;
  }
  p.label = static_cast<BiasClass>(best);
  return p;
}

std::vector<double> preprocess(std::span<const double> values, std::size_t sample_size) {
  if (values.size() != sample_size) {
    fail(ErrorCategory::kShape, "sample of length " + std::to_string(values.size()) +
                                    " given to a model for length " + std::to_string(sample_size));
  }
  std::vector<double> out(values.begin(), values.end());
  for (double v : out) require(v >= 0.0 && v <= 1.0, "preprocess: value outside [0,1]");
  std::sort(out.begin(), out.end());
  return out;
}

// ---- primitives ------------------------------------------------------------------

MatrixXd conv1d(const MatrixXd& input, const MatrixXd& kernels, const Eigen::VectorXd& bias,
                int kernel_size, Activation activation) {
  require(kernel_size >= 1, "conv1d: kernel_size must be >= 1");
  if (kernels.cols() != kernel_size * input.rows() || bias.size() != kernels.rows()) {
    fail(ErrorCategory::kShape, "conv1d: kernel/bias shape does not match input channels");
  }
  if (kernel_size > input.cols()) fail(ErrorCategory::kShape, "conv1d: kernel longer than input");
  MatrixXd cols;
  im2col(input, input.cols(), 1, kernel_size, cols);
  MatrixXd out = kernels * cols;
  out.colwise() += bias;
  if (activation == Activation::kRelu) out = out.cwiseMax(0.0);
  return out;
}

MatrixXd maxpool(const MatrixXd& input, int window) {
  require(window >= 1, "maxpool: window must be >= 1");
  MatrixXd out;
  IndexMatrix argmax;
  pool_forward(input, input.cols(), 1, window, out, argmax);
  return out;
}

// ---- network ---------------------------------------------------------------------

Network::Network(NetworkConfig config)
    : config_(config), layout_(parameter_layout(config)),
      parameters_(parameter_count(config), 0.0) {}

Network::Network(NetworkConfig config, std::vector<double> parameters, TrainingMetadata metadata)
    : config_(config), layout_(parameter_layout(config)), parameters_(std::move(parameters)),
      metadata_(metadata) {
  if (parameters_.size() != parameter_count(config_)) {
    fail(ErrorCategory::kShape, "network: expected " + std::to_string(parameter_count(config_)) +
                                    " parameters, got " + std::to_string(parameters_.size()));
  }
}

Network Network::initialize(const NetworkConfig& config, std::uint64_t seed) {
  Network net(config);
  Rng rng(seed);
  for (std::size_t i = 0; i < net.layout_.size(); ++i) {
    const auto& b = net.layout_[i];
    if (b.cols == 1 && b.name.ends_with(".bias")) continue;
    const double fan_in = static_cast<double>(b.cols);
    const double limit = (i == kHeadW) ? std::sqrt(3.0 / fan_in) : std::sqrt(6.0 / fan_in);
    for (std::size_t j = 0; j < b.size(); ++j) {
      net.parameters_[b.offset + j] = rng.uniform(-limit, limit);
    }
  }
  return net;
}

Eigen::Map<const MatrixXd> Network::block(std::size_t index) const {
  const auto& b = layout_.at(index);
  return {parameters_.data() + b.offset, static_cast<Index>(b.rows), static_cast<Index>(b.cols)};
}

Prediction Network::forward(std::span<const double> preprocessed) const {
  if (preprocessed.size() != config_.sample_size) {
    fail(ErrorCategory::kShape, "network expects samples of length " +
                                    std::to_string(config_.sample_size) + ", got " +
                                    std::to_string(preprocessed.size()));
  }
  MatrixXd input = Eigen::Map<const MatrixXd>(preprocessed.data(),
                                              static_cast<Index>(preprocessed.size()), 1);
  const MatrixXd probs = forward_batch(input);
  std::array<double, kNumClasses> p{};
  for (std::size_t i = 0; i < kNumClasses; ++i) p[i] = probs(static_cast<Index>(i), 0);
  return make_prediction(p);
}

MatrixXd Network::forward_batch(const MatrixXd& inputs) const {
  Workspace ws;
  return forward_batch(inputs, ws);
}

const MatrixXd& Network::forward_batch(const MatrixXd& inputs, Workspace& ws) const {
  check_inputs(config_, inputs);
  const Index batch = inputs.cols();
  const Index length = static_cast<Index>(config_.sample_size);
  const Index len1 = static_cast<Index>(config_.pooled1_length());
  const Index len2 = static_cast<Index>(config_.pooled2_length());
  const int k = config_.kernel_size;
  const int pool = config_.pool_window;

  Eigen::Map<const MatrixXd> x(inputs.data(), 1, length * batch);
  im2col(x, length, batch, k, ws.col1);
  ws.z1.noalias() = block(kConv1W) * ws.col1;
  ws.z1.colwise() += block(kConv1B).col(0);
  relu_inplace(ws.z1, ws.a1);

  im2col(ws.a1, length, batch, k, ws.col2);
  ws.z2.noalias() = block(kConv2W) * ws.col2;
  ws.z2.colwise() += block(kConv2B).col(0);
  relu_inplace(ws.z2, ws.a2);
  pool_forward(ws.a2, length, batch, pool, ws.p1, ws.idx1);

  im2col(ws.p1, len1, batch, k, ws.col3);
  ws.z3.noalias() = block(kConv3W) * ws.col3;
  ws.z3.colwise() += block(kConv3B).col(0);
  relu_inplace(ws.z3, ws.a3);

  im2col(ws.a3, len1, batch, k, ws.col4);
  ws.z4.noalias() = block(kConv4W) * ws.col4;
  ws.z4.colwise() += block(kConv4B).col(0);
  relu_inplace(ws.z4, ws.a4);
  pool_forward(ws.a4, len1, batch, pool, ws.p2, ws.idx2);

  // Flatten channel-major: feature index = channel * len2 + position.
  const Index f2 = ws.p2.rows();
  ws.flat.resize(f2 * len2, batch);
  for (Index b = 0; b < batch; ++b)
    for (Index t = 0; t < len2; ++t)
      for (Index c = 0; c < f2; ++c) ws.flat(c * len2 + t, b) = ws.p2(c, b * len2 + t);

  ws.zd.noalias() = block(kDenseW) * ws.flat;
  ws.zd.colwise() += block(kDenseB).col(0);
  relu_inplace(ws.zd, ws.ad);

  ws.logits.noalias() = block(kHeadW) * ws.ad;
  ws.logits.colwise() += block(kHeadB).col(0);

  ws.probs.resize(ws.logits.rows(), batch);
  for (Index b = 0; b < batch; ++b) {
    const double m = ws.logits.col(b).maxCoeff();
    ws.probs.col(b) = (ws.logits.col(b).array() - m).exp();
    ws.probs.col(b) /= ws.probs.col(b).sum();
  }
  return ws.probs;
}

double Network::loss(const MatrixXd& inputs, std::span<const int> labels) const {
  Workspace ws;
  forward_batch(inputs, ws);
  require(labels.size() == static_cast<std::size_t>(inputs.cols()), "loss: label count mismatch");
  double total = 0.0;
  for (Index b = 0; b < inputs.cols(); ++b) {
    const double m = ws.logits.col(b).maxCoeff();
    const double lse = m + std::log((ws.logits.col(b).array() - m).exp().sum());
    total += lse - ws.logits(labels[static_cast<std::size_t>(b)], b);
  }
  return total / static_cast<double>(inputs.cols());
}

double Network::loss_and_gradient(const MatrixXd& inputs, std::span<const int> labels,
                                  std::vector<double>& gradient, Workspace& ws,
                                  std::size_t* correct) const {
  forward_batch(inputs, ws);
  const Index batch = inputs.cols();
  require(labels.size() == static_cast<std::size_t>(batch), "loss_and_gradient: label count mismatch");
  const Index length = static_cast<Index>(config_.sample_size);
  const Index len1 = static_cast<Index>(config_.pooled1_length());
  const Index len2 = static_cast<Index>(config_.pooled2_length());
  const int k = config_.kernel_size;
  const double inv_batch = 1.0 / static_cast<double>(batch);

  double total = 0.0;
  std::size_t hits = 0;
  ws.d_logits = ws.probs;
  for (Index b = 0; b < batch; ++b) {
    const int y = labels[static_cast<std::size_t>(b)];
    require(y >= 0 && y < NetworkConfig::n_classes, "loss_and_gradient: label out of range");
    const double m = ws.logits.col(b).maxCoeff();
    const double lse = m + std::log((ws.logits.col(b).array() - m).exp().sum());
    total += lse - ws.logits(y, b);
    Index arg = 0;
    ws.probs.col(b).maxCoeff(&arg);
    if (arg == y) ++hits;
    ws.d_logits(y, b) -= 1.0;
  }
  ws.d_logits *= inv_batch;
  if (correct) *correct = hits;

  gradient.assign(parameters_.size(), 0.0);
  auto grad = [&](std::size_t index) {
    const auto& blk = layout_[index];
    return Eigen::Map<MatrixXd>(gradient.data() + blk.offset, static_cast<Index>(blk.rows),
                                static_cast<Index>(blk.cols));
  };

  // Head and dense layer.
  grad(kHeadW).noalias() = ws.d_logits * ws.ad.transpose();
  bias_gradient(ws.d_logits, grad(kHeadB));
  ws.d_ad.noalias() = block(kHeadW).transpose() * ws.d_logits;
  relu_backward(ws.zd, ws.d_ad);
  grad(kDenseW).noalias() = ws.d_ad * ws.flat.transpose();
  bias_gradient(ws.d_ad, grad(kDenseB));
  ws.d_flat.noalias() = block(kDenseW).transpose() * ws.d_ad;

  const Index f2 = ws.p2.rows();
  ws.d_p2.resize(f2, len2 * batch);
  for (Index b = 0; b < batch; ++b)
    for (Index t = 0; t < len2; ++t)
      for (Index c = 0; c < f2; ++c) ws.d_p2(c, b * len2 + t) = ws.d_flat(c * len2 + t, b);

  // Block 2.
  pool_backward(ws.d_p2, ws.idx2, len1 * batch, ws.d_a4);
  relu_backward(ws.z4, ws.d_a4);
  grad(kConv4W).noalias() = ws.d_a4 * ws.col4.transpose();
  bias_gradient(ws.d_a4, grad(kConv4B));
  ws.d_col.noalias() = block(kConv4W).transpose() * ws.d_a4;
  col2im(ws.d_col, f2, len1, batch, k, ws.d_a3);

  relu_backward(ws.z3, ws.d_a3);
  grad(kConv3W).noalias() = ws.d_a3 * ws.col3.transpose();
  bias_gradient(ws.d_a3, grad(kConv3B));
  ws.d_col.noalias() = block(kConv3W).transpose() * ws.d_a3;
  const Index f1 = ws.p1.rows();
  col2im(ws.d_col, f1, len1, batch, k, ws.d_p1);

  // Block 1.
  pool_backward(ws.d_p1, ws.idx1, length * batch, ws.d_a2);
  relu_backward(ws.z2, ws.d_a2);
  grad(kConv2W).noalias() = ws.d_a2 * ws.col2.transpose();
  bias_gradient(ws.d_a2, grad(kConv2B));
  ws.d_col.noalias() = block(kConv2W).transpose() * ws.d_a2;
  col2im(ws.d_col, f1, length, batch, k, ws.d_a1);

  relu_backward(ws.z1, ws.d_a1);
  grad(kConv1W).noalias() = ws.d_a1 * ws.col1.transpose();
  bias_gradient(ws.d_a1, grad(kConv1B));

  return total * inv_batch;
}

}  // namespace sbd
