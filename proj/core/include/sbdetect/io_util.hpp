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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sbd {

// Shortest decimal text that parses back to exactly the same double.
std::string format_real(double value);
// Strict: the whole field must be a finite real. Throws Error(kParse).
double parse_real(std::string_view field);
long long parse_integer(std::string_view field);

// Splits on '\n', dropping a trailing '\r' and empty trailing lines.
std::vector<std::string> split_lines(const std::string& text);
std::vector<std::string> split_fields(std::string_view line, char delimiter = ',');

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace sbd
