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
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sbdetect/classes.hpp"
#include "sbdetect/scenario.hpp"

namespace sbd {

inline constexpr std::size_t kNoSpecIndex = static_cast<std::size_t>(-1);

struct LabeledSample {
  std::vector<double> values;
  BiasClass label = BiasClass::kUniform;
  ScenarioId scenario = ScenarioId::kUniform;
  // Index into the portfolio the sample was generated from; kNoSpecIndex
  // when read back from a file.
  std::size_t spec_index = kNoSpecIndex;
  std::uint64_t seed = 0;
};

struct DatasetSpec {
  std::map<BiasClass, std::size_t> per_class_counts;
  std::size_t sample_size = 100;
  double train_fraction = 0.8;
  std::uint64_t master_seed = 0;

  // 4:1 uniform-to-bias balance: `per_bias_class` for each bias class and
  // four times that for the uniform class.
  static DatasetSpec balanced(std::size_t per_bias_class, std::size_t sample_size,
                              std::uint64_t master_seed);
  // 2,000 per bias class + 8,000 uniform.
  static DatasetSpec desk_scale(std::size_t sample_size, std::uint64_t master_seed);

  std::size_t total() const;
  void validate() const;
};

struct Dataset {
  std::vector<LabeledSample> train;
  std::vector<LabeledSample> validation;
};

// Per class, samples are spread as evenly as possible over that class's
// specs (earlier specs take the remainder). Each sample's seed is
// derive_seed(master_seed, {class, index}). The validation share of each
// class is round((1 - train_fraction) * count).
Dataset build_dataset(const DatasetSpec& spec, const std::vector<ScenarioSpec>& portfolio);

// Keeps only the specs whose scenario id is listed. Throws on unknown ids.
std::vector<ScenarioSpec> select_portfolio(const std::vector<ScenarioSpec>& portfolio,
                                           const std::vector<std::string>& scenario_ids);

std::map<BiasClass, std::size_t> count_by_class(const std::vector<LabeledSample>& samples);

// Header: x_0..x_{n-1},label,scenario_id,seed.
std::string format_dataset_csv(const std::vector<LabeledSample>& samples, std::size_t sample_size);
std::vector<LabeledSample> parse_dataset_csv(const std::string& text);

nlohmann::json to_json(const DatasetSpec& spec);
DatasetSpec dataset_spec_from_json(const nlohmann::json& j);

inline constexpr int kManifestSchemaVersion = 1;

// Writes train.csv, validation.csv and manifest.json into `dir`. Returns
// the manifest.
nlohmann::json write_dataset(const std::filesystem::path& dir, const Dataset& dataset,
                             const DatasetSpec& spec, const std::vector<std::string>& selection);
Dataset read_dataset(const std::filesystem::path& dir);
nlohmann::json read_manifest(const std::filesystem::path& dir);

// Rebuilds the dataset described by a manifest from the current portfolio.
Dataset regenerate_from_manifest(const nlohmann::json& manifest);

}  // namespace sbd
