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


#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "sbdetect/error.hpp"
#include "sbdetect/network.hpp"
#include "sbdetect/rng.hpp"
#include "sbdetect/scenario.hpp"
#include "sbdetect/training.hpp"

namespace sbd {
namespace {

Eigen::MatrixXd row(std::initializer_list<double> v) {
  Eigen::MatrixXd m(1, static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) m(0, i++) = x;
  return m;
}

TEST(Preprocess, SortsAndChecksLength) {
  const std::vector<double> a{0.5, 0.1, 0.9};
  EXPECT_EQ(preprocess(a, 3), (std::vector<double>{0.1, 0.5, 0.9}));
  const std::vector<double> sorted{0.1, 0.2, 0.3};
  EXPECT_EQ(preprocess(sorted, 3), sorted);
  const auto s100 = sample_uniform(100, 4);
  try {
    preprocess(s100, 600);
    FAIL() << "expected a shape error";
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kShape);
  }
  const std::vector<double> bad{0.1, 1.2, 0.3};
  EXPECT_THROW(preprocess(bad, 3), Error);
}

TEST(Conv1d, HandConvolution) {
  const Eigen::MatrixXd input = row({1, 2, 3});
  const Eigen::MatrixXd kernel = row({1, 0, -1});
  const Eigen::VectorXd bias = Eigen::VectorXd::Zero(1);
  const auto linear = conv1d(input, kernel, bias, 3, Activation::kNone);
  ASSERT_EQ(linear.cols(), 3);
  EXPECT_DOUBLE_EQ(linear(0, 1), -2.0);
  // Zero padding at both ends.
  EXPECT_DOUBLE_EQ(linear(0, 0), -2.0);
  EXPECT_DOUBLE_EQ(linear(0, 2), 2.0);
  const auto rectified = conv1d(input, kernel, bias, 3, Activation::kRelu);
  EXPECT_DOUBLE_EQ(rectified(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(rectified(0, 2), 2.0);
}

TEST(Conv1d, ZeroAndIdentityKernels) {
  const Eigen::MatrixXd input = row({0.3, 0.1, 0.7, 0.2, 0.9});
  const Eigen::VectorXd bias = Eigen::VectorXd::Zero(1);
  const auto zero = conv1d(input, Eigen::MatrixXd::Zero(1, 5), bias, 5, Activation::kRelu);
  EXPECT_TRUE(zero.isZero(0.0));
  const auto ident = conv1d(input, row({0, 0, 1, 0, 0}), bias, 5, Activation::kRelu);
  EXPECT_EQ(ident, input);
}

TEST(Conv1d, MultiChannelLayout) {
  // Two input channels, kernel size 1: output = 2*ch0 - ch1 + 0.5.
  Eigen::MatrixXd input(2, 3);
  input << 1, 2, 3, 4, 5, 6;
  Eigen::MatrixXd kernel(1, 2);
  kernel << 2, -1;
  Eigen::VectorXd bias(1);
  bias << 0.5;
  const auto out = conv1d(input, kernel, bias, 1, Activation::kNone);
  EXPECT_DOUBLE_EQ(out(0, 0), -1.5);
  EXPECT_DOUBLE_EQ(out(0, 2), 0.5);
}

TEST(Maxpool, WindowsAndPartialTail) {
  EXPECT_EQ(maxpool(row({1, 3, 2, 5}), 2), row({3, 5}));
  EXPECT_EQ(maxpool(row({1, 3, 2, 5}), 1), row({1, 3, 2, 5}));
  EXPECT_EQ(maxpool(row({1, 2, 3}), 2), row({2, 3}));
}

TEST(Network, ZeroWeightsGiveUniformProbabilities) {
  const Network net(NetworkConfig::for_sample_size(30));
  const auto p = net.forward(preprocess(sample_uniform(30, 1), 30));
  for (double v : p.probabilities) EXPECT_DOUBLE_EQ(v, 0.2);
  EXPECT_EQ(p.label, BiasClass::kUniform);
}

TEST(Network, ProbabilitiesSumToOne) {
  const auto cfg = NetworkConfig::for_sample_size(100);
  const Network net = Network::initialize(cfg, 11);
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> x(100);
    for (double& v : x) v = std::pow(rng.uniform(), 1.0 + 3.0 * rng.uniform());
    const auto p = net.forward(preprocess(x, 100));
    const double sum = std::accumulate(p.probabilities.begin(), p.probabilities.end(), 0.0);
    EXPECT_NEAR(sum, 1.0, 1e-9);
    for (double v : p.probabilities) EXPECT_GE(v, 0.0);
  }
}

TEST(Network, BatchMatchesSingleForward) {
  const auto cfg = NetworkConfig::for_sample_size(30);
  const Network net = Network::initialize(cfg, 5);
  Eigen::MatrixXd batch(30, 7);
  std::vector<std::vector<double>> xs;
  for (int b = 0; b < 7; ++b) {
    xs.push_back(preprocess(sample_uniform(30, 100 + b), 30));
    for (int i = 0; i < 30; ++i) batch(i, b) = xs.back()[i];
  }
  const Eigen::MatrixXd probs = net.forward_batch(batch);
  for (int b = 0; b < 7; ++b) {
    const auto p = net.forward(xs[b]);
    for (int c = 0; c < 5; ++c) EXPECT_NEAR(probs(c, b), p.probabilities[c], 1e-14);
  }
}

TEST(Network, ArgmaxTieGoesToLowestIndex) {
  const auto p = make_prediction({0.1, 0.3, 0.3, 0.2, 0.1});
  EXPECT_EQ(p.label, BiasClass::kCenter);
}

TEST(Network, ParameterCountMismatchIsShapeError) {
  const auto cfg = NetworkConfig::for_sample_size(30);
  try {
    Network bad(cfg, std::vector<double>(3, 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kShape);
  }
}

NetworkConfig tiny_config() {
  NetworkConfig cfg = NetworkConfig::for_sample_size(16, 4);
  cfg.dense_units = 8;
  return cfg;
}

// Initialized weights plus small random biases, so that no pre-activation
// sits exactly on a rectifier kink.
Network random_tiny_network(std::uint64_t seed) {
  const Network init = Network::initialize(tiny_config(), seed);
  std::vector<double> p(init.parameters().begin(), init.parameters().end());
  Rng rng(derive_seed(seed, {0xb1a5}));
  for (const auto& b : init.layout()) {
    if (!b.name.ends_with(".bias")) continue;
    for (std::size_t i = 0; i < b.size(); ++i) p[b.offset + i] = rng.uniform(-0.1, 0.1);
  }
  return Network(tiny_config(), p);
}

TEST(GradientCheck, TwentyRandomTinyNetworks) {
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Network net = random_tiny_network(derive_seed(77, {s}));
    const auto x = preprocess(sample_uniform(16, derive_seed(78, {s})), 16);
    const auto label = kAllClasses[s % kNumClasses];
    const auto r = gradient_check(net, x, label);
    worst = std::max(worst, r.max_relative_error);
    EXPECT_LT(r.max_relative_error, 1e-4)
        << "net " << s << " parameter " << r.worst_parameter << " analytic " << r.worst_analytic
        << " numeric " << r.worst_numeric;
  }
  RecordProperty("worst_relative_error", std::to_string(worst));
}

TEST(GradientCheck, DeadUnitsUseAbsoluteFloor) {
  // Strongly negative first-layer biases kill every unit: all gradients
  // upstream of the head vanish and must not count as relative errors.
  const Network base = random_tiny_network(1);
  std::vector<double> params(base.parameters().begin(), base.parameters().end());
  const auto& layout = base.layout();
  for (const auto& b : layout) {
    if (b.name == "conv1.bias") {
      for (std::size_t i = 0; i < b.size(); ++i) params[b.offset + i] = -100.0;
    }
  }
  const Network net(tiny_config(), params);
  const auto x = preprocess(sample_uniform(16, 2), 16);
  const auto r = gradient_check(net, x, BiasClass::kBounds);
  EXPECT_LT(r.max_relative_error, 1e-4);
}

TEST(GradientCheck, SmallStepAlongNegativeGradientDoesNotIncreaseLoss) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Network net = random_tiny_network(derive_seed(5, {s}));
    Eigen::MatrixXd inputs(16, 4);
    std::vector<int> labels;
    for (int b = 0; b < 4; ++b) {
      const auto x = preprocess(sample_uniform(16, derive_seed(6, {s, static_cast<std::uint64_t>(b)})), 16);
      for (int i = 0; i < 16; ++i) inputs(i, b) = x[i];
      labels.push_back(b % 5);
    }
    Workspace ws;
    std::vector<double> grad;
    const double before = net.loss_and_gradient(inputs, labels, grad, ws);
    const Network stepped = gradient_step(net, grad, 1e-4);
    EXPECT_LE(stepped.loss(inputs, labels), before);
  }
}

}  // namespace
}  // namespace sbd
