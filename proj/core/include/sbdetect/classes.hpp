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
#include <string>
#include <string_view>

namespace sbd {

// The five labels the classifier distinguishes. Order is significant: it is
// the layout of every probability vector and the argmax tie-break order.
enum class BiasClass : int {
  kUniform = 0,
  kCenter = 1,
  kBounds = 2,
  kGapsClusters = 3,
  kDiscretisation = 4,
};

inline constexpr std::size_t kNumClasses = 5;

inline constexpr std::array<BiasClass, kNumClasses> kAllClasses = {
    BiasClass::kUniform, BiasClass::kCenter, BiasClass::kBounds,
    BiasClass::kGapsClusters, BiasClass::kDiscretisation};

std::string_view class_name(BiasClass c);

// Accepts the canonical names ("uniform", "center", "bounds",
// "gaps_clusters", "discretisation"), case-insensitively. Throws a
// validation error listing the valid names otherwise.
BiasClass parse_class(std::string_view name);

std::string valid_class_names();

constexpr std::size_t class_index(BiasClass c) { return static_cast<std::size_t>(c); }

}  // namespace sbd
