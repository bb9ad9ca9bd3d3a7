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

#include "sbdetect/classes.hpp"

#include <algorithm>
#include <cctype>

#include "sbdetect/error.hpp"

namespace sbd {

std::string_view class_name(BiasClass c) {
  switch (c) {
    case BiasClass::kUniform: return "uniform";
    case BiasClass::kCenter: return "center";
    case BiasClass::kBounds: return "bounds";
    case BiasClass::kGapsClusters: return "gaps_clusters";
    case BiasClass::kDiscretisation: return "discretisation";
  }
  return "unknown";
}

std::string valid_class_names() {
  std::string out;
  for (BiasClass c : kAllClasses) {
    if (!out.empty()) out += ", ";
    out += class_name(c);
  }
  return out;
}

BiasClass parse_class(std::string_view name) {
  std::string lowered(name);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  for (BiasClass c : kAllClasses) {
    if (lowered == class_name(c)) return c;
  }
  fail(ErrorCategory::kValidation,
       "unknown class '" + std::string(name) + "'; valid classes: " + valid_class_names());
}

std::string_view category_name(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kValidation: return "validation";
    case ErrorCategory::kIo: return "io";
    case ErrorCategory::kParse: return "parse";
    case ErrorCategory::kShape: return "shape";
    case ErrorCategory::kCorrupt: return "corrupt";
    case ErrorCategory::kVersion: return "version";
    case ErrorCategory::kDivergence: return "divergence";
  }
  return "unknown";
}

int exit_code(ErrorCategory category) {
  return 2 + static_cast<int>(category);
}

}  // namespace sbd
