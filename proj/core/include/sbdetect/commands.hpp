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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sbdetect/network.hpp"
#include "sbdetect/training.hpp"

namespace sbd {

namespace fs = std::filesystem;

// Validates against the report schema, then writes pretty-printed JSON.
void write_report(const fs::path& path, const nlohmann::json& report);

// File name used for the model of a given sample size inside a model
// directory, e.g. "model_n100.bin".
std::string model_file_name(std::size_t sample_size);

struct GenerateOptions {
  fs::path out;
  std::size_t sample_size = 100;
  std::size_t per_bias_class = 2000;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  // Scenario ids to keep; empty keeps the whole portfolio.
  std::vector<std::string> scenarios;
};

// Writes train.csv, validation.csv and manifest.json. Returns the manifest.
nlohmann::json cmd_generate(const GenerateOptions& options);

struct TrainOptions {
  fs::path dataset;
  fs::path model_out;
  // Must match the dataset when set.
  std::optional<std::size_t> sample_size;
  int block1_filters = 32;
  std::optional<int> block2_filters;
  int kernel_size = 5;
  int pool_window = 2;
  int dense_units = 64;
  TrainConfig train;
  EpochCallback on_epoch;
};

// Trains on train.csv (a stratified monitor share is held back for best
// epoch selection), saves the model, <model>.history.csv and
// <model>.report.json, and scores the model on validation.csv.
nlohmann::json cmd_train(const TrainOptions& options);

enum class DetectMethod { kStat, kDeep, kBoth };
DetectMethod parse_method(std::string_view name);
std::string_view method_name(DetectMethod m);

struct DetectOptions {
  fs::path positions;
  std::optional<fs::path> model;
  double alpha = 0.01;
  DetectMethod method = DetectMethod::kBoth;
  // Report path; nothing is written when empty.
  fs::path out;
};

nlohmann::json cmd_detect(const DetectOptions& options);

struct CompareOptions {
  std::vector<std::size_t> dimensions = {1, 10, 20, 30};
  std::size_t biased = 200;
  std::size_t unbiased = 200;
  std::vector<std::size_t> sample_sizes = {30, 50, 100, 600};
  double alpha = 0.01;
  // Holds model_n<N>.bin for each sample size.
  fs::path model_dir;
  std::uint64_t seed = 0;
  fs::path out;
};

// Writes compare.json and summary.svg into `out`.
nlohmann::json cmd_compare(const CompareOptions& options);

struct ExplainOptions {
  fs::path positions;
  fs::path model;
  // Target class name; empty explains each dimension's predicted class.
  std::string target_class;
  // Known true class, shown in figure titles when set.
  std::string true_class;
  // Dimensions to explain; empty means all.
  std::vector<std::size_t> dims;
  std::size_t background_size = 100;
  // 0 means 128 * sample_size.
  std::size_t n_coalitions = 0;
  std::uint64_t seed = 0;
  // Optional dataset directory whose uniform training samples form the
  // background; fresh uniform samples are used otherwise.
  std::optional<fs::path> background_data;
  fs::path out;
};

// Writes attribution_dim<j>.svg, attribution_dim<j>.csv and explain.json.
nlohmann::json cmd_explain(const ExplainOptions& options);

struct BenchmarkOptions {
  // Optimizer ids from the reference portfolio; empty means all.
  std::vector<std::string> selection;
  std::size_t dimension = 30;
  std::size_t runs = 100;
  // 0 means 1000 * dimension.
  std::size_t max_evaluations = 0;
  std::uint64_t seed = 0;
  fs::path model;
  double alpha = 0.01;
  fs::path out;
};

// Collects positions for every selected optimizer, runs both detectors and
// writes positions_<id>.csv files, heatmap.svg and benchmark.json.
nlohmann::json cmd_benchmark(const BenchmarkOptions& options);

}  // namespace sbd
