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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace sbd {

inline constexpr int kPositionsFormatVersion = 1;

// N runs x d dimensions of final best coordinates, all in [0, 1]. Storage is
// column-major so that each dimension is a contiguous span.
class PositionMatrix {
 public:
  PositionMatrix() = default;
  PositionMatrix(std::size_t runs, std::size_t dims);
  // Validates that every entry lies in [0, 1].
  explicit PositionMatrix(Eigen::MatrixXd data, nlohmann::json provenance = {});

  std::size_t runs() const { return static_cast<std::size_t>(data_.rows()); }
  std::size_t dims() const { return static_cast<std::size_t>(data_.cols()); }

  double operator()(std::size_t run, std::size_t dim) const { return data_(run, dim); }
  void set(std::size_t run, std::size_t dim, double value);

  std::span<const double> column(std::size_t dim) const;
  const Eigen::MatrixXd& data() const { return data_; }

  const nlohmann::json& provenance() const { return provenance_; }
  void set_provenance(nlohmann::json p) { provenance_ = std::move(p); }

 private:
  Eigen::MatrixXd data_;
  nlohmann::json provenance_;
};

// Builds a matrix whose columns are the given per-dimension samples.
PositionMatrix from_columns(const std::vector<std::vector<double>>& columns);

// Delimited text: header dim_0,...,dim_{d-1}; one row per run; reals written
// with 17 significant digits so that they round-trip exactly.
std::string format_positions_csv(const PositionMatrix& m);
PositionMatrix parse_positions_csv(const std::string& text);

// Writes <path> and the provenance sidecar <path>.meta.json.
void write_positions(const std::filesystem::path& path, const PositionMatrix& m);
// Reads <path>; the sidecar is attached as provenance when present.
PositionMatrix read_positions(const std::filesystem::path& path);
std::filesystem::path provenance_path(const std::filesystem::path& positions_path);

}  // namespace sbd
