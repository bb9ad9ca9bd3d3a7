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
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sbdetect/deep_detect.hpp"
#include "sbdetect/metrics.hpp"
#include "sbdetect/network.hpp"
#include "sbdetect/stat_tests.hpp"
#include "sbdetect/training.hpp"

namespace sbd {

enum class Agreement { kBothBiased, kBothUnbiased, kStatOnly, kDeepOnly };
Agreement agreement(bool statistical_biased, bool deep_biased);
std::string_view agreement_name(Agreement a);

struct ComparisonRecord {
  std::string subject_id;
  RejectionSummary statistical;
  DeepBiasReport deep;
  Agreement agreement = Agreement::kBothUnbiased;
};

ComparisonRecord make_comparison(std::string subject_id, RejectionSummary statistical,
                                 DeepBiasReport deep);

// Confusion counts of one method at one (dimension, sample size) condition.
struct ExperimentCell {
  std::string method;
  std::size_t dimension = 0;
  std::size_t sample_size = 0;
  BinaryCounts counts;
};

struct ExperimentSummary {
  std::vector<ExperimentCell> cells;
};

inline constexpr std::string_view kReportSchema = "sbdetect-report";
inline constexpr int kReportSchemaVersion = 1;

// {"schema", "schema_version", "kind", "generator"} for a new report.
nlohmann::json report_header(std::string_view kind);

nlohmann::json to_json(const RejectionSummary& summary);
nlohmann::json to_json(const DeepBiasReport& report, const NetworkConfig& model);
nlohmann::json to_json(const ComparisonRecord& record, const NetworkConfig& model);
nlohmann::json to_json(const ExperimentCell& cell);
nlohmann::json to_json(const NetworkConfig& config);
nlohmann::json to_json(const TrainConfig& config);
nlohmann::json to_json(const EpochStats& epoch);
nlohmann::json to_json(const Evaluation& evaluation);

// Checks a report against the versioned field list of its kind. Returns
// one message per problem; empty means valid.
std::vector<std::string> validate_report(const nlohmann::json& report);
// Throws Error(kValidation) listing the problems.
void require_valid_report(const nlohmann::json& report);

}  // namespace sbd
