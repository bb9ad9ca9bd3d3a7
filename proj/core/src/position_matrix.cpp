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

#include "sbdetect/position_matrix.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sbdetect/error.hpp"
#include "sbdetect/io_util.hpp"

namespace sbd {

PositionMatrix::PositionMatrix(std::size_t runs, std::size_t dims)
    : data_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(runs), static_cast<Eigen::Index>(dims))) {}

PositionMatrix::PositionMatrix(Eigen::MatrixXd data, nlohmann::json provenance)
    : data_(std::move(data)), provenance_(std::move(provenance)) {
  for (Eigen::Index c = 0; c < data_.cols(); ++c) {
    for (Eigen::Index r = 0; r < data_.rows(); ++r) {
      const double v = data_(r, c);
      if (!(v >= 0.0 && v <= 1.0)) {
        fail(ErrorCategory::kValidation, "position matrix entry (" + std::to_string(r) + ", " +
                                             std::to_string(c) + ") outside [0,1]");
      }
    }
  }
}

void PositionMatrix::set(std::size_t run, std::size_t dim, double value) {
  require(value >= 0.0 && value <= 1.0, "position matrix entry outside [0,1]");
  data_(static_cast<Eigen::Index>(run), static_cast<Eigen::Index>(dim)) = value;
}

std::span<const double> PositionMatrix::column(std::size_t dim) const {
  require(dim < dims(), "position matrix column out of range");
  return {data_.col(static_cast<Eigen::Index>(dim)).data(), runs()};
}

PositionMatrix from_columns(const std::vector<std::vector<double>>& columns) {
  require(!columns.empty(), "from_columns: no columns");
  const std::size_t n = columns.front().size();
  Eigen::MatrixXd data(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].size() != n) fail(ErrorCategory::kShape, "from_columns: ragged columns");
    for (std::size_t r = 0; r < n; ++r) {
      data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = columns[c][r];
    }
  }
  return PositionMatrix(std::move(data));
}

std::string format_positions_csv(const PositionMatrix& m) {
  std::string out;
  for (std::size_t c = 0; c < m.dims(); ++c) {
    if (c) out += ',';
    out += "dim_" + std::to_string(c);
  }
  out += '\n';
  for (std::size_t r = 0; r < m.runs(); ++r) {
    for (std::size_t c = 0; c < m.dims(); ++c) {
      if (c) out += ',';
      out += format_real(m(r, c));
    }
    out += '\n';
  }
  return out;
}

PositionMatrix parse_positions_csv(const std::string& text) {
  const auto rows = split_lines(text);
  if (rows.empty()) fail(ErrorCategory::kParse, "positions: empty file");
  const auto header = split_fields(rows.front());
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] != "dim_" + std::to_string(c)) {
      fail(ErrorCategory::kParse, "positions: header column " + std::to_string(c) +
                                      " should be dim_" + std::to_string(c));
    }
  }
  const std::size_t d = header.size();
  const std::size_t n = rows.size() - 1;
  if (d == 0 || n == 0) fail(ErrorCategory::kParse, "positions: no data");
  Eigen::MatrixXd data(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < n; ++r) {
    const auto fields = split_fields(rows[r + 1]);
    if (fields.size() != d) {
      fail(ErrorCategory::kParse, "positions: row " + std::to_string(r + 1) + " has " +
                                      std::to_string(fields.size()) + " fields, expected " +
                                      std::to_string(d));
    }
    for (std::size_t c = 0; c < d; ++c) {
      data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = parse_real(fields[c]);
    }
  }
  try {
    return PositionMatrix(std::move(data));
  } catch (const Error& e) {
    fail(ErrorCategory::kParse, std::string("positions: ") + e.what());
  }
}

std::filesystem::path provenance_path(const std::filesystem::path& positions_path) {
  return positions_path.string() + ".meta.json";
}

void write_positions(const std::filesystem::path& path, const PositionMatrix& m) {
  write_text_file(path, format_positions_csv(m));
  nlohmann::json meta = m.provenance().is_object() ? m.provenance() : nlohmann::json::object();
  meta["format_version"] = kPositionsFormatVersion;
  meta["runs"] = m.runs();
  meta["dims"] = m.dims();
  write_text_file(provenance_path(path), meta.dump(2) + "\n");
}

PositionMatrix read_positions(const std::filesystem::path& path) {
  PositionMatrix m = parse_positions_csv(read_text_file(path));
  const auto meta_path = provenance_path(path);
  if (std::filesystem::exists(meta_path)) {
    try {
      auto meta = nlohmann::json::parse(read_text_file(meta_path));
      if (meta.value("format_version", kPositionsFormatVersion) != kPositionsFormatVersion) {
        fail(ErrorCategory::kVersion, "positions sidecar: unsupported format version");
      }
      m.set_provenance(std::move(meta));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCategory::kParse, std::string("positions sidecar: ") + e.what());
    }
  }
  return m;
}

}  // namespace sbd
