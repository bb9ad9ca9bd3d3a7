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

#include "sbdetect/explain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Cholesky>

#include "sbdetect/error.hpp"
#include "sbdetect/io_util.hpp"
#include "sbdetect/rng.hpp"

namespace sbd {
namespace {

using Coalition = std::vector<char>;

double binomial(std::size_t n, std::size_t k) {
  return std::exp(std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(k) + 1) -
                  std::lgamma(static_cast<double>(n - k) + 1));
}

// Mean model output over the background for each coalition in `batch`.
std::vector<double> coalition_values(const BatchModel& model, std::span<const double> sample,
                                     const BackgroundSet& bg, const std::vector<Coalition>& batch) {
  const Eigen::Index n = static_cast<Eigen::Index>(sample.size());
  const Eigen::Index b = static_cast<Eigen::Index>(bg.size());
  Eigen::MatrixXd inputs(n, b * static_cast<Eigen::Index>(batch.size()));
  for (std::size_t k = 0; k < batch.size(); ++k) {
    for (Eigen::Index j = 0; j < b; ++j) {
      auto col = inputs.col(static_cast<Eigen::Index>(k) * b + j);
      for (Eigen::Index i = 0; i < n; ++i)
        col(i) = batch[k][static_cast<std::size_t>(i)] ? sample[static_cast<std::size_t>(i)]
                                                       : bg.samples()(i, j);
      std::sort(col.data(), col.data() + n);
    }
  }
  const Eigen::VectorXd out = model(inputs);
  require(out.size() == inputs.cols(), "model returned the wrong number of outputs");
  std::vector<double> values(batch.size());
  for (std::size_t k = 0; k < batch.size(); ++k)
    values[k] = out.segment(static_cast<Eigen::Index>(k) * b, b).mean();
  return values;
}

struct Design {
  std::vector<Coalition> coalitions;
  std::vector<double> weights;
};

Design exhaustive_design(std::size_t m) {
  Design d;
  const std::size_t total = std::size_t{1} << m;
  for (std::size_t mask = 1; mask + 1 < total; ++mask) {
    Coalition z(m);
    std::size_t s = 0;
    for (std::size_t i = 0; i < m; ++i) {
      z[i] = static_cast<char>((mask >> i) & 1u);
      s += static_cast<std::size_t>(z[i]);
    }
    d.coalitions.push_back(std::move(z));
    d.weights.push_back(static_cast<double>(m - 1) /
                        (binomial(m, s) * static_cast<double>(s) * static_cast<double>(m - s)));
  }
  return d;
}

Design sampled_design(std::size_t m, std::size_t count, std::uint64_t seed) {
  // P(size = s) proportional to (m-1) / (s (m-s)).
  std::vector<double> cdf(m - 1);
  double acc = 0.0;
  for (std::size_t s = 1; s < m; ++s) {
    acc += 1.0 / (static_cast<double>(s) * static_cast<double>(m - s));
    cdf[s - 1] = acc;
  }
  for (double& c : cdf) c /= acc;

  Design d;
  const std::size_t pairs = (count + 1) / 2;
  std::vector<std::size_t> perm(m);
  for (std::size_t p = 0; p < pairs; ++p) {
    Rng rng(derive_seed(seed, {p}));
    const double u = rng.uniform();
    const std::size_t s =
        static_cast<std::size_t>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin()) + 1;
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = 0; i < s; ++i) std::swap(perm[i], perm[i + rng.index(m - i)]);
    Coalition z(m, 0);
    for (std::size_t i = 0; i < s; ++i) z[perm[i]] = 1;
    Coalition complement(m);
    for (std::size_t i = 0; i < m; ++i) complement[i] = static_cast<char>(1 - z[i]);
    d.coalitions.push_back(std::move(z));
    d.weights.push_back(1.0);
    if (d.coalitions.size() < count) {
      d.coalitions.push_back(std::move(complement));
      d.weights.push_back(1.0);
    }
  }
  return d;
}

}  // namespace

BackgroundSet::BackgroundSet(const std::vector<std::vector<double>>& samples) {
  if (samples.size() < kMinSize)
    fail(ErrorCategory::kValidation, "background set needs at least " + std::to_string(kMinSize) +
                                         " samples, got " + std::to_string(samples.size()));
  const std::size_t n = samples.front().size();
  require(n >= 1, "background samples must be non-empty");
  samples_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(samples.size()));
  for (std::size_t j = 0; j < samples.size(); ++j) {
    if (samples[j].size() != n) fail(ErrorCategory::kShape, "background samples differ in length");
    std::vector<double> sorted = samples[j];
    std::sort(sorted.begin(), sorted.end());
    std::copy(sorted.begin(), sorted.end(), samples_.col(static_cast<Eigen::Index>(j)).data());
  }
}

BackgroundSet BackgroundSet::from_training(const std::vector<LabeledSample>& samples,
                                           std::size_t size, std::uint64_t seed) {
  std::vector<const LabeledSample*> uniform;
  for (const auto& s : samples)
    if (s.label == BiasClass::kUniform) uniform.push_back(&s);
  if (uniform.size() < size)
    fail(ErrorCategory::kValidation, "training data has only " + std::to_string(uniform.size()) +
                                         " uniform samples; background needs " + std::to_string(size));
  Rng rng(seed);
  for (std::size_t i = 0; i < size; ++i) std::swap(uniform[i], uniform[i + rng.index(uniform.size() - i)]);
  std::vector<std::vector<double>> chosen;
  for (std::size_t i = 0; i < size; ++i) chosen.push_back(uniform[i]->values);
  return BackgroundSet(chosen);
}

BackgroundSet BackgroundSet::uniform(std::size_t sample_size, std::size_t size, std::uint64_t seed) {
  std::vector<std::vector<double>> samples(size, std::vector<double>(sample_size));
  for (std::size_t j = 0; j < size; ++j) {
    Rng rng(derive_seed(seed, {j}));
    for (double& v : samples[j]) v = rng.uniform();
  }
  return BackgroundSet(samples);
}

BatchModel class_probability_model(const Network& network, BiasClass target) {
  const Eigen::Index c = static_cast<Eigen::Index>(class_index(target));
  return [&network, c](const Eigen::MatrixXd& inputs) -> Eigen::VectorXd {
    return network.forward_batch(inputs).row(c).transpose();
  };
}

double Attribution::phi_sum() const { return std::accumulate(phi.begin(), phi.end(), 0.0); }

double Attribution::efficiency_residual() const {
  return phi_sum() - (prediction_value - base_value);
}

Attribution shapley_attribute(const BatchModel& model, std::span<const double> sample,
                              const BackgroundSet& background, BiasClass target,
                              const ShapleyOptions& options) {
  const std::size_t m = sample.size();
  if (m != background.sample_size())
    fail(ErrorCategory::kShape, "sample length " + std::to_string(m) + " != background length " +
                                    std::to_string(background.sample_size()));
  require(m >= 2, "attribution needs at least two points");

  Attribution out;
  out.target_class = target;
  out.values.assign(sample.begin(), sample.end());
  std::sort(out.values.begin(), out.values.end());
  const std::span<const double> x(out.values);

  {
    const std::vector<Coalition> ends = {Coalition(m, 0), Coalition(m, 1)};
    const auto v = coalition_values(model, x, background, ends);
    out.base_value = v[0];
    out.prediction_value = v[1];
  }
  const double delta = out.prediction_value - out.base_value;

  Design design;
  if (options.exhaustive) {
    if (m > kMaxExhaustiveFeatures)
      fail(ErrorCategory::kValidation, "exhaustive attribution supports at most " +
                                           std::to_string(kMaxExhaustiveFeatures) + " points");
    design = exhaustive_design(m);
  } else {
    const std::size_t count = options.n_coalitions ? options.n_coalitions : 128 * m;
    if (count < 2 * m)
      fail(ErrorCategory::kValidation, "n_coalitions must be >= 2 * sample_size (" +
                                           std::to_string(2 * m) + ")");
    design = sampled_design(m, count, options.seed);
  }

  // phi_last = delta - sum(others). With z' = z_i - z_last and
  // y' = v(z) - base - z_last * delta, solve sum w z' z'^T phi = sum w z' y'.
  const std::size_t k = m - 1;
  Eigen::MatrixXd ata = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  Eigen::VectorXd atb = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
  // Bounds the batched forward pass to roughly 2^18 input values.
  const std::size_t chunk = std::max<std::size_t>(1, (std::size_t{1} << 18) / (m * background.size()));
  for (std::size_t start = 0; start < design.coalitions.size(); start += chunk) {
    const std::size_t count = std::min(chunk, design.coalitions.size() - start);
    std::vector<Coalition> batch(design.coalitions.begin() + static_cast<std::ptrdiff_t>(start),
                                 design.coalitions.begin() + static_cast<std::ptrdiff_t>(start + count));
    const auto values = coalition_values(model, x, background, batch);
    Eigen::MatrixXd zw(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(count));
    Eigen::MatrixXd z(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(count));
    for (std::size_t c = 0; c < count; ++c) {
      const Coalition& zc = batch[c];
      const double w = design.weights[start + c];
      const double last = zc[m - 1];
      const double y = values[c] - out.base_value - last * delta;
      for (std::size_t i = 0; i < k; ++i) {
        const double zi = static_cast<double>(zc[i]) - last;
        z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = zi;
        zw(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = w * zi;
      }
      atb += zw.col(static_cast<Eigen::Index>(c)) * y;
    }
    ata.noalias() += zw * z.transpose();
  }
  const Eigen::VectorXd head = ata.ldlt().solve(atb);
  out.phi.resize(m);
  double partial = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    out.phi[i] = head(static_cast<Eigen::Index>(i));
    partial += out.phi[i];
  }
  out.phi[k] = delta - partial;
  for (double v : out.phi)
    if (!std::isfinite(v))
      fail(ErrorCategory::kValidation, "attribution regression is singular; increase n_coalitions");
  return out;
}

Attribution shapley_attribute(const Network& network, std::span<const double> sample,
                              const BackgroundSet& background, BiasClass target,
                              std::size_t n_coalitions, std::uint64_t seed) {
  const auto sorted = preprocess(sample, network.config().sample_size);
  ShapleyOptions opt;
  opt.n_coalitions = n_coalitions;
  opt.seed = seed;
  return shapley_attribute(class_probability_model(network, target), sorted, background, target, opt);
}

std::string format_attribution_csv(const Attribution& a) {
  std::string out = "index,value,phi\n";
  for (std::size_t i = 0; i < a.phi.size(); ++i)
    out += std::to_string(i) + "," + format_real(a.values[i]) + "," + format_real(a.phi[i]) + "\n";
  return out;
}

std::pair<std::vector<double>, std::vector<double>> parse_attribution_csv(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines.front() != "index,value,phi")
    fail(ErrorCategory::kParse, "attribution table must start with 'index,value,phi'");
  std::vector<double> values, phi;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto f = split_fields(lines[r]);
    if (f.size() != 3) fail(ErrorCategory::kParse, "attribution row " + std::to_string(r) + ": expected 3 fields");
    if (parse_integer(f[0]) != static_cast<long long>(r - 1))
      fail(ErrorCategory::kParse, "attribution row " + std::to_string(r) + ": index out of order");
    values.push_back(parse_real(f[1]));
    phi.push_back(parse_real(f[2]));
  }
  return {values, phi};
}

}  // namespace sbd
