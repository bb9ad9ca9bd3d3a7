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

#include "sbdetect/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <zlib.h>

#include "sbdetect/error.hpp"
#include "sbdetect/io_util.hpp"
#include "sbdetect/rng.hpp"

namespace sbd {
namespace {

std::string crc32_hex(std::string_view data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size()));
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%08lx", static_cast<unsigned long>(crc));
  return buf;
}

}  // namespace

DatasetSpec DatasetSpec::balanced(std::size_t per_bias_class, std::size_t sample_size,
                                  std::uint64_t master_seed) {
  DatasetSpec spec;
  spec.sample_size = sample_size;
  spec.master_seed = master_seed;
  for (BiasClass c : kAllClasses) {
    spec.per_class_counts[c] = (c == BiasClass::kUniform) ? 4 * per_bias_class : per_bias_class;
  }
  return spec;
}

DatasetSpec DatasetSpec::desk_scale(std::size_t sample_size, std::uint64_t master_seed) {
  return balanced(2000, sample_size, master_seed);
}

std::size_t DatasetSpec::total() const {
  std::size_t t = 0;
  for (const auto& [c, n] : per_class_counts) t += n;
  return t;
}

void DatasetSpec::validate() const {
  require(sample_size >= 1, "dataset: sample_size must be >= 1");
  require(train_fraction > 0.0 && train_fraction < 1.0, "dataset: train_fraction must lie in (0,1)");
  require(!per_class_counts.empty(), "dataset: no classes requested");
}

std::vector<ScenarioSpec> select_portfolio(const std::vector<ScenarioSpec>& portfolio,
                                           const std::vector<std::string>& scenario_ids) {
  std::vector<ScenarioId> wanted;
  for (const auto& name : scenario_ids) wanted.push_back(parse_scenario(name));
  std::vector<ScenarioSpec> out;
  for (const auto& spec : portfolio) {
    if (std::find(wanted.begin(), wanted.end(), spec.id) != wanted.end()) out.push_back(spec);
  }
  return out;
}

Dataset build_dataset(const DatasetSpec& spec, const std::vector<ScenarioSpec>& portfolio) {
  spec.validate();
  Dataset dataset;
  for (const auto& [label, count] : spec.per_class_counts) {
    if (count == 0) continue;
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < portfolio.size(); ++i)
      if (portfolio[i].class_label() == label) members.push_back(i);
    if (members.empty()) {
      fail(ErrorCategory::kValidation, "dataset: portfolio has no scenarios for class '" +
                                           std::string(class_name(label)) + "'");
    }
    require(count >= members.size(), "dataset: count for class '" +
                                         std::string(class_name(label)) +
                                         "' is below its number of scenario settings");

    std::vector<LabeledSample> samples;
    samples.reserve(count);
    const std::size_t base = count / members.size();
    const std::size_t extra = count % members.size();
    std::size_t index = 0;
    for (std::size_t m = 0; m < members.size(); ++m) {
      const std::size_t quota = base + (m < extra ? 1 : 0);
      for (std::size_t q = 0; q < quota; ++q, ++index) {
        LabeledSample s;
        s.label = label;
        s.scenario = portfolio[members[m]].id;
        s.spec_index = members[m];
        s.seed = derive_seed(spec.master_seed, {class_index(label), index});
        s.values = generate(portfolio[members[m]], s.seed, spec.sample_size);
        samples.push_back(std::move(s));
      }
    }

    // Stratified split: a seeded permutation picks the validation members.
    std::vector<std::size_t> order(samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(derive_seed(spec.master_seed, {0x73706c6974, class_index(label)}));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
    const auto n_val = static_cast<std::size_t>(
        std::lround((1.0 - spec.train_fraction) * static_cast<double>(count)));
    std::vector<bool> is_val(samples.size(), false);
    for (std::size_t i = 0; i < n_val; ++i) is_val[order[i]] = true;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      (is_val[i] ? dataset.validation : dataset.train).push_back(std::move(samples[i]));
    }
  }
  return dataset;
}

std::map<BiasClass, std::size_t> count_by_class(const std::vector<LabeledSample>& samples) {
  std::map<BiasClass, std::size_t> counts;
  for (const auto& s : samples) ++counts[s.label];
  return counts;
}

std::string format_dataset_csv(const std::vector<LabeledSample>& samples, std::size_t sample_size) {
  std::string out;
  for (std::size_t i = 0; i < sample_size; ++i) out += "x_" + std::to_string(i) + ",";
  out += "label,scenario_id,seed\n";
  for (const auto& s : samples) {
    if (s.values.size() != sample_size) fail(ErrorCategory::kShape, "dataset: ragged samples");
    for (double v : s.values) {
      out += format_real(v);
      out += ',';
    }
    out += std::string(class_name(s.label)) + "," + std::string(scenario_name(s.scenario)) + "," +
           std::to_string(s.seed) + "\n";
  }
  return out;
}

std::vector<LabeledSample> parse_dataset_csv(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty()) fail(ErrorCategory::kParse, "dataset: empty file");
  const auto header = split_fields(lines.front());
  if (header.size() < 4 || header[header.size() - 3] != "label" ||
      header[header.size() - 2] != "scenario_id" || header.back() != "seed") {
    fail(ErrorCategory::kParse, "dataset: header must end with label,scenario_id,seed");
  }
  const std::size_t n = header.size() - 3;
  for (std::size_t i = 0; i < n; ++i) {
    if (header[i] != "x_" + std::to_string(i)) fail(ErrorCategory::kParse, "dataset: bad header");
  }
  std::vector<LabeledSample> out;
  out.reserve(lines.size() - 1);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto f = split_fields(lines[r]);
    if (f.size() != n + 3) {
      fail(ErrorCategory::kParse, "dataset: row " + std::to_string(r) + " has wrong field count");
    }
    LabeledSample s;
    s.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      s.values[i] = parse_real(f[i]);
      if (!(s.values[i] >= 0.0 && s.values[i] <= 1.0)) {
        fail(ErrorCategory::kParse, "dataset: value outside [0,1] in row " + std::to_string(r));
      }
    }
    try {
      s.label = parse_class(f[n]);
      s.scenario = parse_scenario(f[n + 1]);
    } catch (const Error& e) {
      fail(ErrorCategory::kParse, std::string("dataset: ") + e.what());
    }
    s.seed = static_cast<std::uint64_t>(std::stoull(f[n + 2]));
    out.push_back(std::move(s));
  }
  return out;
}

nlohmann::json to_json(const DatasetSpec& spec) {
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [c, n] : spec.per_class_counts) counts[std::string(class_name(c))] = n;
  return {{"per_class_counts", counts},
          {"sample_size", spec.sample_size},
          {"train_fraction", spec.train_fraction},
          {"master_seed", spec.master_seed}};
}

DatasetSpec dataset_spec_from_json(const nlohmann::json& j) {
  try {
    DatasetSpec spec;
    for (const auto& [name, n] : j.at("per_class_counts").items()) {
      spec.per_class_counts[parse_class(name)] = n.get<std::size_t>();
    }
    spec.sample_size = j.at("sample_size").get<std::size_t>();
    spec.train_fraction = j.at("train_fraction").get<double>();
    spec.master_seed = j.at("master_seed").get<std::uint64_t>();
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCategory::kParse, std::string("dataset spec: ") + e.what());
  }
}

nlohmann::json write_dataset(const std::filesystem::path& dir, const Dataset& dataset,
                             const DatasetSpec& spec, const std::vector<std::string>& selection) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCategory::kIo, "cannot create directory '" + dir.string() + "'");
  const std::string train_csv = format_dataset_csv(dataset.train, spec.sample_size);
  const std::string val_csv = format_dataset_csv(dataset.validation, spec.sample_size);
  write_text_file(dir / "train.csv", train_csv);
  write_text_file(dir / "validation.csv", val_csv);

  auto counts_json = [](const std::vector<LabeledSample>& s) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [c, n] : count_by_class(s)) j[std::string(class_name(c))] = n;
    return j;
  };
  nlohmann::json manifest = {
      {"schema_version", kManifestSchemaVersion},
      {"kind", "dataset_manifest"},
      {"portfolio_version", kPortfolioVersion},
      {"selection", selection},
      {"dataset_spec", to_json(spec)},
      {"files", {{"train", "train.csv"}, {"validation", "validation.csv"}}},
      {"counts", {{"train", counts_json(dataset.train)}, {"validation", counts_json(dataset.validation)}}},
      {"crc32", {{"train", crc32_hex(train_csv)}, {"validation", crc32_hex(val_csv)}}},
  };
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

nlohmann::json read_manifest(const std::filesystem::path& dir) {
  try {
    auto j = nlohmann::json::parse(read_text_file(dir / "manifest.json"));
    if (j.value("schema_version", -1) != kManifestSchemaVersion) {
      fail(ErrorCategory::kVersion, "dataset manifest: unsupported schema version");
    }
    return j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCategory::kParse, std::string("dataset manifest: ") + e.what());
  }
}

Dataset read_dataset(const std::filesystem::path& dir) {
  const auto manifest = read_manifest(dir);
  auto load = [&](const char* split) {
    const std::string text = read_text_file(dir / manifest["files"][split].get<std::string>());
    if (manifest.contains("crc32") && manifest["crc32"].value(split, std::string()) != crc32_hex(text))
      fail(ErrorCategory::kCorrupt, std::string("dataset ") + split + " file does not match its manifest checksum");
    return parse_dataset_csv(text);
  };
  Dataset d;
  d.train = load("train");
  d.validation = load("validation");
  return d;
}

Dataset regenerate_from_manifest(const nlohmann::json& manifest) {
  if (manifest.value("portfolio_version", std::string()) != kPortfolioVersion) {
    fail(ErrorCategory::kVersion, "dataset manifest: portfolio version mismatch");
  }
  const auto spec = dataset_spec_from_json(manifest.at("dataset_spec"));
  std::vector<std::string> selection = manifest.value("selection", std::vector<std::string>{});
  const auto& portfolio = enumerate_portfolio();
  return build_dataset(spec, selection.empty() ? portfolio : select_portfolio(portfolio, selection));
}

}  // namespace sbd
