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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "sbdetect/network.hpp"

namespace sbd {

// Binary layout (all integers and reals little-endian):
//   magic "SBDMODEL", u32 format_version,
//   config: u64 sample_size, i32 block1, block2, kernel, pool, dense, classes
//   metadata: i32 epochs_trained, i32 best_epoch, f64 train_loss,
//             f64 val_loss, u64 seed
//   u32 array_count, then per array: u32 name length, name bytes,
//             u32 rank, u64 extent per axis, f64 values (column-major)
//   u32 crc32 of every preceding byte
inline constexpr std::string_view kModelMagic = "SBDMODEL";
inline constexpr std::uint32_t kModelFormatVersion = 1;

std::string serialize_model(const Network& network);
// Throws Error(kCorrupt) on truncation, bad magic, checksum mismatch or a
// shape manifest that disagrees with the config; Error(kVersion) on an
// unsupported format_version.
Network deserialize_model(std::string_view bytes);

void save_model(const Network& network, const std::filesystem::path& path);
Network load_model(const std::filesystem::path& path);

}  // namespace sbd
