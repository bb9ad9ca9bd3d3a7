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

#include "sbdetect/model_io.hpp"

#include <bit>
#include <cstring>

#include <zlib.h>

#include "sbdetect/error.hpp"
#include "sbdetect/io_util.hpp"

namespace sbd {
namespace {

class Writer {
 public:
  void bytes(std::string_view s) { out_.append(s); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void i32(std::int32_t v) { put(static_cast<std::uint32_t>(v), 4); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  std::string& str() { return out_; }

 private:
  void put(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
  }
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  std::string_view bytes(std::size_t n) {
    need(n);
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  std::int32_t i32() { return static_cast<std::int32_t>(static_cast<std::uint32_t>(get(4))); }
  double f64() { return std::bit_cast<double>(get(8)); }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) fail(ErrorCategory::kCorrupt, "model file truncated");
  }
  std::uint64_t get(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(std::string_view data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size()));
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::string serialize_model(const Network& network) {
  const NetworkConfig& cfg = network.config();
  const TrainingMetadata& meta = network.metadata();
  Writer w;
  w.bytes(kModelMagic);
  w.u32(kModelFormatVersion);
  w.u64(cfg.sample_size);
  w.i32(cfg.block1_filters);
  w.i32(cfg.block2_filters);
  w.i32(cfg.kernel_size);
  w.i32(cfg.pool_window);
  w.i32(cfg.dense_units);
  w.i32(NetworkConfig::n_classes);
  w.i32(meta.epochs_trained);
  w.i32(meta.best_epoch);
  w.f64(meta.final_train_loss);
  w.f64(meta.final_val_loss);
  w.u64(meta.seed);
  const auto& layout = network.layout();
  const auto params = network.parameters();
  w.u32(static_cast<std::uint32_t>(layout.size()));
  for (const auto& b : layout) {
    w.u32(static_cast<std::uint32_t>(b.name.size()));
    w.bytes(b.name);
    w.u32(2);
    w.u64(b.rows);
    w.u64(b.cols);
    for (std::size_t i = 0; i < b.size(); ++i) w.f64(params[b.offset + i]);
  }
  const std::uint32_t crc = crc_of(w.str());
  w.u32(crc);
  return std::move(w.str());
}

Network deserialize_model(std::string_view bytes) {
  if (bytes.size() < kModelMagic.size() + 8)
    fail(ErrorCategory::kCorrupt, "model file truncated");
  if (bytes.substr(0, kModelMagic.size()) != kModelMagic)
    fail(ErrorCategory::kCorrupt, "not a model file (bad magic)");
  const std::string_view body = bytes.substr(0, bytes.size() - 4);
  Reader tail(bytes.substr(bytes.size() - 4));
  if (crc_of(body) != tail.u32())
    fail(ErrorCategory::kCorrupt, "model checksum mismatch (file corrupt or truncated)");

  Reader r(body);
  r.bytes(kModelMagic.size());
  const std::uint32_t version = r.u32();
  if (version != kModelFormatVersion)
    fail(ErrorCategory::kVersion, "unsupported model format_version " + std::to_string(version) +
                                      " (expected " + std::to_string(kModelFormatVersion) + ")");
  NetworkConfig cfg;
  cfg.sample_size = r.u64();
  cfg.block1_filters = r.i32();
  cfg.block2_filters = r.i32();
  cfg.kernel_size = r.i32();
  cfg.pool_window = r.i32();
  cfg.dense_units = r.i32();
  if (r.i32() != NetworkConfig::n_classes)
    fail(ErrorCategory::kCorrupt, "model class count does not match");
  try {
    cfg.validate();
  } catch (const Error& e) {
    fail(ErrorCategory::kCorrupt, std::string("model config invalid: ") + e.what());
  }
  TrainingMetadata meta;
  meta.epochs_trained = r.i32();
  meta.best_epoch = r.i32();
  meta.final_train_loss = r.f64();
  meta.final_val_loss = r.f64();
  meta.seed = r.u64();

  const auto layout = parameter_layout(cfg);
  const std::uint32_t count = r.u32();
  if (count != layout.size())
    fail(ErrorCategory::kCorrupt, "model array count " + std::to_string(count) + " != expected " +
                                      std::to_string(layout.size()));
  std::vector<double> params(parameter_count(cfg));
  for (const auto& b : layout) {
    const std::uint32_t name_len = r.u32();
    const std::string name(r.bytes(name_len));
    if (name != b.name)
      fail(ErrorCategory::kCorrupt, "model array '" + name + "' where '" + b.name + "' expected");
    const std::uint32_t rank = r.u32();
    if (rank != 2) fail(ErrorCategory::kCorrupt, "model array '" + name + "' has rank " + std::to_string(rank));
    const std::uint64_t rows = r.u64();
    const std::uint64_t cols = r.u64();
    if (rows != b.rows || cols != b.cols)
      fail(ErrorCategory::kCorrupt, "model array '" + name + "' has shape " + std::to_string(rows) + "x" +
                                        std::to_string(cols) + ", config implies " + std::to_string(b.rows) +
                                        "x" + std::to_string(b.cols));
    for (std::size_t i = 0; i < b.size(); ++i) params[b.offset + i] = r.f64();
  }
  if (r.remaining() != 0) fail(ErrorCategory::kCorrupt, "trailing bytes in model file");
  return Network(cfg, std::move(params), meta);
}

void save_model(const Network& network, const std::filesystem::path& path) {
  write_text_file(path, serialize_model(network));
}

Network load_model(const std::filesystem::path& path) {
  const std::string bytes = read_text_file(path);
  try {
    return deserialize_model(bytes);
  } catch (const Error& e) {
    throw Error(e.category(), path.string() + ": " + e.what());
  }
}

}  // namespace sbd
