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
#include <span>
#include <string_view>

#include "sbdetect/rng.hpp"

namespace sbd {

// One evaluation of f0: a fresh U(0,1) draw from `stream`, whatever x is.
// Throws Error(kValidation) when x leaves the unit box, which means the
// caller forgot to apply a boundary correction.
double f0_eval(std::span<const double> x, Rng& stream);

// Stateful objective used by the optimizers. In hashed mode the value is a
// fixed function of (salt, x) instead, so re-evaluating a point returns the
// same number.
class F0Function {
 public:
  enum class Mode { kFresh, kHashed };

  F0Function(std::uint64_t seed, Mode mode = Mode::kFresh);

  double operator()(std::span<const double> x);
  std::size_t evaluations() const { return evaluations_; }

 private:
  Rng stream_;
  Mode mode_;
  std::uint64_t salt_;
  std::size_t evaluations_ = 0;
};

enum class BoundaryCorrection { kSaturate, kToroidal, kMirror, kResample };
std::string_view correction_name(BoundaryCorrection c);
BoundaryCorrection parse_correction(std::string_view name);

// Clamp to [0, 1].
void saturate(std::span<double> x);
// Wrap offending coordinates modulo 1.
void toroidal(std::span<double> x);
// Reflect about the violated bound until feasible.
void mirror(std::span<double> x);
// Redraw offending coordinates uniformly; feasible ones are untouched.
void resample(std::span<double> x, Rng& stream);

// Dispatches on `c`. `stream` is only consumed by kResample.
void apply_correction(BoundaryCorrection c, std::span<double> x, Rng& stream);

}  // namespace sbd
