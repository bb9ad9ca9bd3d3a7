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

#include "sbdetect/f0.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <string>

#include "sbdetect/error.hpp"

namespace sbd {
namespace {

constexpr std::array<std::string_view, 4> kCorrectionNames = {"saturate", "toroidal", "mirror",
                                                             "resample"};

void check_domain(std::span<const double> x) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= 0.0 && x[i] <= 1.0))
      fail(ErrorCategory::kValidation, "f0 evaluated outside [0,1]^n: x[" + std::to_string(i) +
                                           "] = " + std::to_string(x[i]));
  }
}

void check_finite(double v) {
  if (std::isnan(v)) fail(ErrorCategory::kValidation, "boundary correction given NaN");
}

}  // namespace

double f0_eval(std::span<const double> x, Rng& stream) {
  check_domain(x);
  return stream.uniform();
}

F0Function::F0Function(std::uint64_t seed, Mode mode)
    : stream_(seed), mode_(mode), salt_(derive_seed(seed, {0x5a17})) {}

double F0Function::operator()(std::span<const double> x) {
  ++evaluations_;
  if (mode_ == Mode::kFresh) return f0_eval(x, stream_);
  check_domain(x);
  std::uint64_t h = salt_;
  for (double v : x) h = derive_seed(h, {std::bit_cast<std::uint64_t>(v)});
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::string_view correction_name(BoundaryCorrection c) {
  return kCorrectionNames[static_cast<std::size_t>(c)];
}

BoundaryCorrection parse_correction(std::string_view name) {
  for (std::size_t i = 0; i < kCorrectionNames.size(); ++i)
    if (kCorrectionNames[i] == name) return static_cast<BoundaryCorrection>(i);
  fail(ErrorCategory::kValidation, "unknown boundary correction '" + std::string(name) +
                                       "' (valid: saturate, toroidal, mirror, resample)");
}

void saturate(std::span<double> x) {
  for (double& v : x) {
    check_finite(v);
    v = std::clamp(v, 0.0, 1.0);
  }
}

void toroidal(std::span<double> x) {
  for (double& v : x) {
    check_finite(v);
    if (v >= 0.0 && v <= 1.0) continue;
    if (!std::isfinite(v)) {
      v = v > 0 ? 1.0 : 0.0;
      continue;
    }
    v -= std::floor(v);
  }
}

void mirror(std::span<double> x) {
  for (double& v : x) {
    check_finite(v);
    if (v >= 0.0 && v <= 1.0) continue;
    if (!std::isfinite(v)) {
      v = v > 0 ? 1.0 : 0.0;
      continue;
    }
    // Repeated reflection about 0 and 1 is a fold with period 2.
    double y = std::fmod(std::fabs(v), 2.0);
    if (y > 1.0) y = 2.0 - y;
    v = y;
  }
}

void resample(std::span<double> x, Rng& stream) {
  for (double& v : x) {
    check_finite(v);
    if (!(v >= 0.0 && v <= 1.0)) v = stream.uniform();
  }
}

void apply_correction(BoundaryCorrection c, std::span<double> x, Rng& stream) {
  switch (c) {
    case BoundaryCorrection::kSaturate: saturate(x); return;
    case BoundaryCorrection::kToroidal: toroidal(x); return;
    case BoundaryCorrection::kMirror: mirror(x); return;
    case BoundaryCorrection::kResample: resample(x, stream); return;
  }
}

}  // namespace sbd
