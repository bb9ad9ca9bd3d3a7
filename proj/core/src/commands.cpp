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

#include "sbdetect/commands.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "sbdetect/dataset.hpp"
#include "sbdetect/deep_detect.hpp"
#include "sbdetect/error.hpp"
#include "sbdetect/explain.hpp"
#include "sbdetect/io_util.hpp"
#include "sbdetect/metrics.hpp"
#include "sbdetect/model_io.hpp"
#include "sbdetect/optimizers.hpp"
#include "sbdetect/parallel.hpp"
#include "sbdetect/position_matrix.hpp"
#include "sbdetect/report.hpp"
#include "sbdetect/rng.hpp"
#include "sbdetect/scenario.hpp"
#include "sbdetect/stat_tests.hpp"
#include "sbdetect/svg.hpp"

namespace sbd {
namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCategory::kIo, "cannot create directory '" + dir.string() + "': " + ec.message());
}

fs::path with_suffix(const fs::path& p, const std::string& suffix) {
  return fs::path(p.string() + suffix);
}

std::string sanitize(std::string_view id) {
  std::string out;
  for (char c : id) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return out;
}

}  // namespace

void write_report(const fs::path& path, const nlohmann::json& report) {
  require_valid_report(report);
  if (path.has_parent_path()) ensure_dir(path.parent_path());
  write_text_file(path, report.dump(2) + "\n");
}

std::string model_file_name(std::size_t sample_size) {
  return "model_n" + std::to_string(sample_size) + ".bin";
}

// ---- generate -----------------------------------------------------------------

nlohmann::json cmd_generate(const GenerateOptions& o) {
  require(!o.out.empty(), "generate: --out is required");
  std::vector<ScenarioSpec> portfolio = enumerate_portfolio();
  if (!o.scenarios.empty()) portfolio = select_portfolio(portfolio, o.scenarios);
  DatasetSpec spec = DatasetSpec::balanced(o.per_bias_class, o.sample_size, o.seed);
  spec.train_fraction = o.train_fraction;
  for (auto it = spec.per_class_counts.begin(); it != spec.per_class_counts.end();) {
    const bool present = std::any_of(portfolio.begin(), portfolio.end(),
                                     [&](const ScenarioSpec& s) { return s.class_label() == it->first; });
    it = present ? std::next(it) : spec.per_class_counts.erase(it);
  }
  require(!spec.per_class_counts.empty(), "generate: selection contains no scenarios");
  const Dataset dataset = build_dataset(spec, portfolio);
  return write_dataset(o.out, dataset, spec, o.scenarios);
}

// ---- train --------------------------------------------------------------------

nlohmann::json cmd_train(const TrainOptions& o) {
  require(!o.model_out.empty(), "train: --out (model path) is required");
  const Dataset data = read_dataset(o.dataset);
  if (data.train.empty()) fail(ErrorCategory::kValidation, "train: dataset has no training samples");
  const std::size_t n = data.train.front().values.size();
  if (o.sample_size && *o.sample_size != n)
    fail(ErrorCategory::kShape, "train: dataset sample size " + std::to_string(n) +
                                    " does not match requested --sample-size " + std::to_string(*o.sample_size));

  NetworkConfig net = NetworkConfig::for_sample_size(n, o.block1_filters);
  if (o.block2_filters) net.block2_filters = *o.block2_filters;
  net.kernel_size = o.kernel_size;
  net.pool_window = o.pool_window;
  net.dense_units = o.dense_units;
  net.validate();
  o.train.validate();

  auto [fit, monitor] = split_for_monitoring(data.train, o.train.validation_fraction, o.train.seed);
  TrainResult result = train(fit, monitor, net, o.train, o.on_epoch);

  if (o.model_out.has_parent_path()) ensure_dir(o.model_out.parent_path());
  save_model(result.network, o.model_out);
  const fs::path history_path = with_suffix(o.model_out, ".history.csv");
  write_text_file(history_path, format_history_csv(result.history));

  const Evaluation ev = evaluate(result.network, data.validation);
  nlohmann::json report = report_header("train");
  report["dataset"] = o.dataset.string();
  report["model_path"] = o.model_out.string();
  report["history_path"] = history_path.string();
  report["network"] = to_json(net);
  report["train_config"] = to_json(o.train);
  report["samples"] = {{"fit", fit.size()}, {"monitor", monitor.size()}, {"evaluation", data.validation.size()}};
  report["history"] = nlohmann::json::array();
  for (const auto& e : result.history) report["history"].push_back(to_json(e));
  report["best_epoch"] = result.network.metadata().best_epoch;
  report["evaluation"] = to_json(ev);
  write_report(with_suffix(o.model_out, ".report.json"), report);
  return report;
}

// ---- detect -------------------------------------------------------------------

DetectMethod parse_method(std::string_view name) {
  if (name == "stat") return DetectMethod::kStat;
  if (name == "deep") return DetectMethod::kDeep;
  if (name == "both") return DetectMethod::kBoth;
  fail(ErrorCategory::kValidation, "unknown method '" + std::string(name) + "' (valid: stat, deep, both)");
}

std::string_view method_name(DetectMethod m) {
  switch (m) {
    case DetectMethod::kStat: return "stat";
    case DetectMethod::kDeep: return "deep";
    case DetectMethod::kBoth: return "both";
  }
  return "?";
}

nlohmann::json cmd_detect(const DetectOptions& o) {
  require(o.alpha > 0.0 && o.alpha < 1.0, "detect: alpha must lie in (0,1)");
  const PositionMatrix m = read_positions(o.positions);
  const bool want_stat = o.method != DetectMethod::kDeep;
  const bool want_deep = o.method != DetectMethod::kStat;
  if (want_deep && !o.model) fail(ErrorCategory::kValidation, "detect: method '" + std::string(method_name(o.method)) + "' needs --model");

  nlohmann::json report = report_header("detect");
  report["subject"] = {{"source", o.positions.string()}, {"runs", m.runs()}, {"dims", m.dims()}};
  if (!m.provenance().is_null()) report["subject"]["provenance"] = m.provenance();
  report["alpha"] = o.alpha;
  report["method"] = method_name(o.method);

  std::optional<RejectionSummary> stat;
  std::optional<DeepBiasReport> deep;
  if (want_stat) {
    stat = detect_bias_statistical(m, o.alpha);
    report["statistical"] = to_json(*stat);
  }
  if (want_deep) {
    const Network net = load_model(*o.model);
    deep = predict_matrix(net, m);
    report["deep"] = to_json(*deep, net.config());
    report["model"] = o.model->string();
  }
  if (stat && deep) report["agreement"] = agreement_name(agreement(stat->biased, deep->biased));
  if (!o.out.empty()) write_report(o.out, report);
  else require_valid_report(report);
  return report;
}

// ---- compare ------------------------------------------------------------------

nlohmann::json cmd_compare(const CompareOptions& o) {
  require(!o.dimensions.empty() && !o.sample_sizes.empty(), "compare: dimensions and sample sizes must be non-empty");
  require(o.biased + o.unbiased > 0, "compare: no subjects requested");
  require(o.alpha > 0.0 && o.alpha < 1.0, "compare: alpha must lie in (0,1)");
  require(!o.out.empty(), "compare: --out is required");
  for (auto d : o.dimensions) require(d >= 1, "compare: dimensions must be >= 1");

  std::vector<std::pair<std::size_t, Network>> models;
  for (auto n : o.sample_sizes) {
    const fs::path path = o.model_dir / model_file_name(n);
    if (!fs::exists(path))
      fail(ErrorCategory::kIo, "compare: missing model for sample size " + std::to_string(n) + " (" + path.string() + ")");
    Network net = load_model(path);
    if (net.config().sample_size != n)
      fail(ErrorCategory::kShape, "compare: " + path.string() + " is a model for sample size " +
                                      std::to_string(net.config().sample_size));
    models.emplace_back(n, std::move(net));
  }

  const auto& portfolio = enumerate_portfolio();
  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < portfolio.size(); ++i)
    by_class[class_index(portfolio[i].class_label())].push_back(i);
  const std::size_t uniform_spec = by_class[0].front();

  ExperimentSummary summary;
  for (const auto& [n, net] : models) {
    for (auto d : o.dimensions) {
      const std::size_t total = o.biased + o.unbiased;
      std::vector<char> stat_flag(total), deep_flag(total);
      parallel_for(total, [&, n = n, d = d, &net = net](std::size_t s) {
        const bool biased = s < o.biased;
        const std::uint64_t subject_seed = derive_seed(o.seed, {n, d, s});
        std::size_t spec_index = uniform_spec;
        if (biased) {
          Rng pick(derive_seed(subject_seed, {0}));
          const auto& members = by_class[1 + pick.index(kNumClasses - 1)];
          spec_index = members[pick.index(members.size())];
        }
        std::vector<std::vector<double>> columns(d);
        for (std::size_t j = 0; j < d; ++j)
          columns[j] = generate(portfolio[spec_index], derive_seed(subject_seed, {1, j}), n);
        const PositionMatrix m = from_columns(columns);
        stat_flag[s] = detect_bias_statistical(m, o.alpha).biased;
        deep_flag[s] = predict_matrix(net, m).biased;
      });
      ExperimentCell stat_cell{"statistical", d, n, {}};
      ExperimentCell deep_cell{"deep", d, n, {}};
      for (std::size_t s = 0; s < total; ++s) {
        stat_cell.counts.add(s < o.biased, stat_flag[s]);
        deep_cell.counts.add(s < o.biased, deep_flag[s]);
      }
      summary.cells.push_back(stat_cell);
      summary.cells.push_back(deep_cell);
    }
  }

  ensure_dir(o.out);
  std::vector<SummaryCell> figure_cells;
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : summary.cells) {
    cells.push_back(to_json(c));
    figure_cells.push_back({c.method, c.dimension, c.sample_size, c.counts.false_positive_rate(),
                            c.counts.false_negative_rate(), c.counts.f1()});
  }
  write_text_file(o.out / "summary.svg", render_summary_svg(figure_cells));

  nlohmann::json report = report_header("compare");
  report["alpha"] = o.alpha;
  report["seed"] = o.seed;
  report["subjects"] = {{"biased", o.biased}, {"unbiased", o.unbiased}};
  report["dimensions"] = o.dimensions;
  report["sample_sizes"] = o.sample_sizes;
  report["portfolio_version"] = kPortfolioVersion;
  report["cells"] = cells;
  report["figure"] = "summary.svg";
  write_report(o.out / "compare.json", report);
  return report;
}

// ---- explain ------------------------------------------------------------------

nlohmann::json cmd_explain(const ExplainOptions& o) {
  require(!o.out.empty(), "explain: --out is required");
  std::optional<BiasClass> target;
  if (!o.target_class.empty()) target = parse_class(o.target_class);
  if (!o.true_class.empty()) parse_class(o.true_class);
  const Network net = load_model(o.model);
  const std::size_t n = net.config().sample_size;
  const PositionMatrix m = read_positions(o.positions);
  if (m.runs() != n)
    fail(ErrorCategory::kShape, "explain: positions have " + std::to_string(m.runs()) +
                                    " runs but the model expects " + std::to_string(n));
  std::vector<std::size_t> dims = o.dims;
  if (dims.empty())
    for (std::size_t j = 0; j < m.dims(); ++j) dims.push_back(j);
  for (auto j : dims)
    if (j >= m.dims()) fail(ErrorCategory::kValidation, "explain: dimension " + std::to_string(j) + " out of range");

  const BackgroundSet background =
      o.background_data ? BackgroundSet::from_training(read_dataset(*o.background_data).train, o.background_size, o.seed)
                        : BackgroundSet::uniform(n, o.background_size, o.seed);
  const std::size_t coalitions = o.n_coalitions ? o.n_coalitions : 128 * n;

  ensure_dir(o.out);
  nlohmann::json attributions = nlohmann::json::array();
  for (auto j : dims) {
    const auto sorted = preprocess(m.column(j), n);
    const Prediction pred = net.forward(sorted);
    const BiasClass cls = target.value_or(pred.label);
    const Attribution a = shapley_attribute(net, sorted, background, cls, coalitions, derive_seed(o.seed, {j}));
    const std::string stem = "attribution_dim" + std::to_string(j);
    write_text_file(o.out / (stem + ".csv"), format_attribution_csv(a));
    AttributionLabels labels{std::string(class_name(pred.label)), o.true_class, "dim " + std::to_string(j)};
    render_attribution(a, labels, o.out / (stem + ".svg"));
    attributions.push_back({{"dimension", j},
                            {"target_class", class_name(cls)},
                            {"predicted_label", class_name(pred.label)},
                            {"base_value", a.base_value},
                            {"prediction_value", a.prediction_value},
                            {"phi_sum", a.phi_sum()},
                            {"table", stem + ".csv"},
                            {"figure", stem + ".svg"}});
  }
  nlohmann::json report = report_header("explain");
  report["model"] = o.model.string();
  report["source"] = o.positions.string();
  report["background_size"] = o.background_size;
  report["n_coalitions"] = coalitions;
  report["seed"] = o.seed;
  report["attributions"] = attributions;
  write_report(o.out / "explain.json", report);
  return report;
}

// ---- benchmark ----------------------------------------------------------------

nlohmann::json cmd_benchmark(const BenchmarkOptions& o) {
  require(!o.out.empty(), "benchmark: --out is required");
  require(o.alpha > 0.0 && o.alpha < 1.0, "benchmark: alpha must lie in (0,1)");
  std::vector<OptimizerConfig> configs;
  if (o.selection.empty()) {
    configs = reference_portfolio();
  } else {
    std::set<std::string> seen;
    for (const auto& id : o.selection) {
      if (!seen.insert(id).second) fail(ErrorCategory::kValidation, "benchmark: optimizer '" + id + "' selected twice");
      configs.push_back(find_optimizer(id));
    }
  }
  RunBudget budget = RunBudget::desk(o.dimension, o.runs, o.seed);
  if (o.max_evaluations) budget.max_evaluations = o.max_evaluations;
  const Network net = load_model(o.model);
  if (net.config().sample_size != o.runs)
    fail(ErrorCategory::kShape, "benchmark: model expects " + std::to_string(net.config().sample_size) +
                                    " runs per matrix but --runs is " + std::to_string(o.runs));
  for (const auto& c : configs) budget.validate(c);

  ensure_dir(o.out);
  nlohmann::json records = nlohmann::json::array();
  HeatmapPanel deep_panel{"deep: mean class probability", {}, {}, {}};
  HeatmapPanel stat_panel{"statistical: fraction of dimensions rejected", {"KS", "AD", "CvM", "any"}, {}, {}};
  for (auto c : kAllClasses) deep_panel.columns.emplace_back(class_name(c));
  for (const auto& cfg : configs) {
    const PositionMatrix m = collect(cfg, budget);
    const std::string file = "positions_" + sanitize(cfg.id()) + ".csv";
    write_positions(o.out / file, m);
    ComparisonRecord rec = make_comparison(cfg.id(), detect_bias_statistical(m, o.alpha), predict_matrix(net, m));
    nlohmann::json j = to_json(rec, net.config());
    j["optimizer"] = to_json(cfg);
    j["positions"] = file;
    records.push_back(j);

    deep_panel.rows.push_back(cfg.id());
    deep_panel.values.emplace_back(rec.deep.aggregated.begin(), rec.deep.aggregated.end());
    std::vector<double> fractions(4, 0.0);
    for (const auto& d : rec.statistical.per_dimension) {
      for (std::size_t t = 0; t < 3; ++t) fractions[t] += d.test_rejected[t] ? 1.0 : 0.0;
      fractions[3] += d.rejected ? 1.0 : 0.0;
    }
    for (double& f : fractions) f /= static_cast<double>(m.dims());
    stat_panel.rows.push_back(cfg.id());
    stat_panel.values.push_back(fractions);
  }
  write_text_file(o.out / "heatmap.svg", render_heatmap_svg({deep_panel, stat_panel}));

  nlohmann::json report = report_header("benchmark");
  report["alpha"] = o.alpha;
  report["budget"] = to_json(budget);
  report["model"] = o.model.string();
  report["optimizer_portfolio_version"] = kOptimizerPortfolioVersion;
  report["records"] = records;
  report["figure"] = "heatmap.svg";
  write_report(o.out / "benchmark.json", report);
  return report;
}

}  // namespace sbd
