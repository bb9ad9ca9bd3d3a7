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

// sbdetect: structural-bias detection toolkit.
//
//   sbdetect generate  --out DIR [--sample-size N] [--per-class K] [--scenarios a,b]
//   sbdetect train     --data DIR --out MODEL [--epochs E] [--sample-size N]
//   sbdetect detect    --positions CSV [--model MODEL] [--method stat|deep|both] [--out JSON]
//   sbdetect compare   --model DIR --out DIR [--dims 1,10] [--sizes 100,600]
//   sbdetect explain   --positions CSV --model MODEL --out DIR [--class NAME]
//   sbdetect benchmark --model MODEL --out DIR [--optimizers id,...]
//
// Failures print {"error":{"category":...,"message":...}} on stderr and
// exit with a category-specific code (see README).

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sbdetect/classes.hpp"
#include "sbdetect/commands.hpp"
#include "sbdetect/error.hpp"
#include "sbdetect/optimizers.hpp"

namespace {

int report_error(std::string_view category, const std::string& message, int code) {
  nlohmann::json j = {{"error", {{"category", category}, {"message", message}}}};
  std::cerr << j.dump() << "\n";
  return code;
}

void print(const nlohmann::json& j) { std::cout << j.dump(2) << "\n"; }

nlohmann::json detect_summary(const nlohmann::json& r) {
  nlohmann::json s = {{"method", r["method"]}};
  if (r.contains("statistical"))
    s["statistical"] = {{"biased", r["statistical"]["biased"]},
                        {"rejected_count", r["statistical"]["rejected_count"]}};
  if (r.contains("deep"))
    s["deep"] = {{"biased", r["deep"]["biased"]},
                 {"non_uniform_count", r["deep"]["non_uniform_count"]},
                 {"aggregated_label", r["deep"]["aggregated_label"]}};
  if (r.contains("agreement")) s["agreement"] = r["agreement"];
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structural-bias detection for iterative optimizers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("sbdetect ") + SBDETECT_VERSION);

  std::uint64_t seed = 0;
  double alpha = 0.01;
  std::string method = "both";
  std::string out;
  std::string model;
  std::size_t sample_size = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Master seed")->capture_default_str();
    sub->add_option("--out", out, "Output path");
  };

  // generate
  sbd::GenerateOptions gen;
  auto* g = app.add_subcommand("generate", "Generate a labelled training dataset");
  add_common(g);
  g->add_option("--sample-size", gen.sample_size, "Points per sample")->capture_default_str();
  g->add_option("--per-class", gen.per_bias_class, "Samples per bias class (uniform gets 4x)")->capture_default_str();
  g->add_option("--train-fraction", gen.train_fraction, "Training share per class")->capture_default_str();
  g->add_option("--scenarios", gen.scenarios, "Scenario ids to keep (default: all)")->delimiter(',');

  // train
  sbd::TrainOptions tr;
  std::string data_dir;
  bool quiet = false;
  auto* t = app.add_subcommand("train", "Train a classifier on a generated dataset");
  add_common(t);
  t->add_option("--data", data_dir, "Dataset directory")->required();
  t->add_option("--sample-size", sample_size, "Expected sample size (checked against the dataset)");
  t->add_option("--epochs", tr.train.epochs, "Training epochs")->capture_default_str();
  t->add_option("--batch-size", tr.train.batch_size, "Mini-batch size")->capture_default_str();
  t->add_option("--learning-rate", tr.train.learning_rate, "Adam learning rate")->capture_default_str();
  t->add_option("--validation-fraction", tr.train.validation_fraction,
                "Share of train.csv held back for best-epoch selection")->capture_default_str();
  t->add_option("--filters", tr.block1_filters, "Filters in the first block")->capture_default_str();
  t->add_option("--kernel-size", tr.kernel_size, "Convolution kernel size")->capture_default_str();
  t->add_option("--dense-units", tr.dense_units, "Dense layer width")->capture_default_str();
  t->add_flag("--no-keep-best", [&](std::int64_t) { tr.train.keep_best = false; }, "Keep the last epoch's weights");
  t->add_flag("--quiet", quiet, "Suppress per-epoch progress");

  // detect
  sbd::DetectOptions det;
  std::string positions;
  auto* d = app.add_subcommand("detect", "Run the statistical and/or deep detector on a positions file");
  add_common(d);
  d->add_option("--positions", positions, "Positions CSV")->required();
  d->add_option("--model", model, "Model file (needed for deep and both)");
  d->add_option("--alpha", alpha, "Significance level")->capture_default_str();
  d->add_option("--method", method, "stat, deep or both")->capture_default_str();

  // compare
  sbd::CompareOptions cmp;
  auto* c = app.add_subcommand("compare", "Compare both detectors on synthetic biased/unbiased subjects");
  add_common(c);
  c->add_option("--model", model, "Directory holding model_n<N>.bin files")->required();
  c->add_option("--alpha", alpha, "Significance level")->capture_default_str();
  c->add_option("--dims", cmp.dimensions, "Dimensionalities")->delimiter(',');
  c->add_option("--sizes", cmp.sample_sizes, "Sample sizes")->delimiter(',');
  c->add_option("--sample-size", sample_size, "Single sample size (overrides --sizes)");
  c->add_option("--biased", cmp.biased, "Biased subjects per condition")->capture_default_str();
  c->add_option("--unbiased", cmp.unbiased, "Unbiased subjects per condition")->capture_default_str();

  // explain
  sbd::ExplainOptions ex;
  std::string background_data;
  auto* e = app.add_subcommand("explain", "Shapley attributions for a model's per-dimension predictions");
  add_common(e);
  e->add_option("--positions", positions, "Positions CSV (one column for a single distribution)")->required();
  e->add_option("--model", model, "Model file")->required();
  e->add_option("--class", ex.target_class, "Target class (default: predicted class)");
  e->add_option("--true-class", ex.true_class, "Known class shown in figure titles");
  e->add_option("--dims", ex.dims, "Dimensions to explain (default: all)")->delimiter(',');
  e->add_option("--background", ex.background_size, "Background samples")->capture_default_str();
  e->add_option("--background-data", background_data, "Dataset directory for the background set");
  e->add_option("--coalitions", ex.n_coalitions, "Coalitions per attribution (default 128 x sample size)");

  // benchmark
  sbd::BenchmarkOptions bm;
  auto* b = app.add_subcommand("benchmark", "Run reference optimizers on f0 and detect their bias");
  add_common(b);
  b->add_option("--model", model, "Model file whose sample size equals --runs")->required();
  b->add_option("--alpha", alpha, "Significance level")->capture_default_str();
  b->add_option("--optimizers", bm.selection, "Optimizer ids (default: whole portfolio)")->delimiter(',');
  b->add_option("--dimension", bm.dimension, "Problem dimensionality n")->capture_default_str();
  b->add_option("--runs", bm.runs, "Independent runs N")->capture_default_str();
  b->add_option("--sample-size", sample_size, "Alias for --runs");
  b->add_option("--evaluations", bm.max_evaluations, "Evaluation budget per run (default 1000 x n)");
  b->add_flag_callback("--list", [] {
    for (const auto& cfg : sbd::reference_portfolio()) std::cout << cfg.id() << "\n";
    std::exit(0);
  }, "Print the optimizer ids and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex_help) {
    return app.exit(ex_help);
  } catch (const CLI::CallForAllHelp& ex_help) {
    return app.exit(ex_help);
  } catch (const CLI::CallForVersion& ex_version) {
    return app.exit(ex_version);
  } catch (const CLI::ParseError& err) {
    return report_error("usage", err.what(), sbd::exit_code(sbd::ErrorCategory::kValidation));
  }

  try {
    if (g->parsed()) {
      gen.out = out;
      gen.seed = seed;
      if (sample_size) gen.sample_size = sample_size;
      print(sbd::cmd_generate(gen));
    } else if (t->parsed()) {
      tr.dataset = data_dir;
      tr.model_out = out;
      tr.train.seed = seed;
      if (sample_size) tr.sample_size = sample_size;
      if (!quiet) {
        tr.on_epoch = [](const sbd::EpochStats& s) {
          std::fprintf(stderr, "epoch %3d  train_loss %.4f  train_acc %.4f  val_loss %.4f  val_acc %.4f\n",
                       s.epoch, s.train_loss, s.train_accuracy, s.val_loss, s.val_accuracy);
        };
      }
      const auto r = sbd::cmd_train(tr);
      print({{"model", r["model_path"]}, {"best_epoch", r["best_epoch"]},
             {"macro_f1", r["evaluation"]["macro_f1"]}, {"accuracy", r["evaluation"]["accuracy"]}});
    } else if (d->parsed()) {
      det.positions = positions;
      if (!model.empty()) det.model = model;
      det.alpha = alpha;
      det.method = sbd::parse_method(method);
      det.out = out;
      const auto r = sbd::cmd_detect(det);
      print(out.empty() ? r : detect_summary(r));
    } else if (c->parsed()) {
      cmp.model_dir = model;
      cmp.alpha = alpha;
      cmp.seed = seed;
      cmp.out = out;
      if (sample_size) cmp.sample_sizes = {sample_size};
      const auto r = sbd::cmd_compare(cmp);
      print(r["cells"]);
    } else if (e->parsed()) {
      ex.positions = positions;
      ex.model = model;
      ex.seed = seed;
      ex.out = out;
      if (!background_data.empty()) ex.background_data = background_data;
      const auto r = sbd::cmd_explain(ex);
      print(r["attributions"]);
    } else if (b->parsed()) {
      bm.model = model;
      bm.alpha = alpha;
      bm.seed = seed;
      bm.out = out;
      if (sample_size) bm.runs = sample_size;
      const auto r = sbd::cmd_benchmark(bm);
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& rec : r["records"])
        rows.push_back({{"optimizer", rec["subject_id"]},
                        {"statistical_biased", rec["statistical"]["biased"]},
                        {"deep_biased", rec["deep"]["biased"]},
                        {"agreement", rec["agreement"]}});
      print(rows);
    }
  } catch (const sbd::Error& err) {
    return report_error(sbd::category_name(err.category()), err.what(), sbd::exit_code(err.category()));
  } catch (const std::exception& err) {
    return report_error("internal", err.what(), 1);
  }
  return 0;
}
