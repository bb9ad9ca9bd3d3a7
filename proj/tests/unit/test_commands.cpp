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


#include <array>
#include <cstdio>
#include <memory>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include "sbdetect/commands.hpp"
#include "sbdetect/dataset.hpp"
#include "sbdetect/error.hpp"
#include "sbdetect/explain.hpp"
#include "sbdetect/io_util.hpp"
#include "sbdetect/model_io.hpp"
#include "sbdetect/optimizers.hpp"
#include "sbdetect/position_matrix.hpp"
#include "sbdetect/report.hpp"
#include "test_support.hpp"

namespace sbd {
namespace {

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(read_text_file(p)); }

// One tiny dataset and model shared by every test in this file.
class CommandsTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir();
    GenerateOptions g;
    g.out = *dir_ / "data";
    g.sample_size = 30;
    g.per_bias_class = 50;
    g.seed = 5;
    cmd_generate(g);

    TrainOptions t;
    t.dataset = *dir_ / "data";
    t.model_out = *dir_ / "models" / model_file_name(30);
    t.block1_filters = 4;
    t.dense_units = 8;
    t.train.epochs = 2;
    t.train.seed = 1;
    train_report_ = new nlohmann::json(cmd_train(t));

    const auto m = collect(find_optimizer("RandomSearch"), RunBudget::desk(3, 30, 2));
    write_positions(*dir_ / "positions.csv", m);
  }
  static void TearDownTestSuite() {
    delete train_report_;
    delete dir_;
  }
  static fs::path path(const std::string& name) { return *dir_ / name; }
  static fs::path model_path() { return *dir_ / "models" / model_file_name(30); }

  static testing::TempDir* dir_;
  static nlohmann::json* train_report_;
};
testing::TempDir* CommandsTest::dir_ = nullptr;
nlohmann::json* CommandsTest::train_report_ = nullptr;

TEST_F(CommandsTest, GenerateWritesManifestAndIsReproducible) {
  const auto manifest = read_manifest(path("data"));
  EXPECT_EQ(manifest["dataset_spec"]["sample_size"], 30);
  GenerateOptions g;
  g.out = path("data_again");
  g.sample_size = 30;
  g.per_bias_class = 50;
  g.seed = 5;
  cmd_generate(g);
  for (const char* f : {"train.csv", "validation.csv"})
    EXPECT_EQ(read_text_file(path("data") / f), read_text_file(path("data_again") / f)) << f;
  const Dataset regenerated = regenerate_from_manifest(manifest);
  EXPECT_EQ(format_dataset_csv(regenerated.train, 30), read_text_file(path("data") / "train.csv"));
}

TEST_F(CommandsTest, GenerateRejectsUnknownScenario) {
  GenerateOptions g;
  g.out = path("bad");
  g.sample_size = 30;
  g.per_bias_class = 2;
  g.scenarios = {"wobble"};
  try {
    cmd_generate(g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kValidation);
    EXPECT_NE(std::string(e.what()).find("uniform"), std::string::npos);
  }
}

TEST_F(CommandsTest, TrainWritesModelHistoryAndReport) {
  EXPECT_TRUE(fs::exists(model_path()));
  const auto report = read_json(fs::path(model_path().string() + ".report.json"));
  EXPECT_TRUE(validate_report(report).empty());
  EXPECT_EQ(report["kind"], "train");
  EXPECT_EQ(report["history"].size(), 2u);
  const auto history = parse_history_csv(read_text_file(fs::path(model_path().string() + ".history.csv")));
  EXPECT_EQ(history.size(), 2u);
  EXPECT_EQ(load_model(model_path()).config().sample_size, 30u);
  EXPECT_EQ(*train_report_, report);
}

TEST_F(CommandsTest, TrainSampleSizeMismatchIsShapeError) {
  TrainOptions t;
  t.dataset = path("data");
  t.model_out = path("never.bin");
  t.sample_size = 100;
  t.train.epochs = 1;
  try {
    cmd_train(t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kShape);
  }
}

TEST_F(CommandsTest, DetectBothMethodsWritesValidReport) {
  DetectOptions d;
  d.positions = path("positions.csv");
  d.model = model_path();
  d.out = path("detect.json");
  const auto r = cmd_detect(d);
  EXPECT_EQ(read_json(d.out), r);
  EXPECT_TRUE(validate_report(r).empty());
  EXPECT_EQ(r["method"], "both");
  EXPECT_EQ(r["statistical"]["dimensions"].size(), 3u);

  d.method = DetectMethod::kStat;
  d.model.reset();
  d.out.clear();
  const auto s = cmd_detect(d);
  EXPECT_FALSE(s.contains("deep"));
  d.method = DetectMethod::kDeep;
  EXPECT_THROW(cmd_detect(d), Error);
}

TEST_F(CommandsTest, ExplainWritesFiguresTablesAndReport) {
  ExplainOptions e;
  e.positions = path("positions.csv");
  e.model = model_path();
  e.dims = {1};
  e.background_size = 10;
  e.n_coalitions = 120;
  e.out = path("explain");
  const auto r = cmd_explain(e);
  EXPECT_TRUE(validate_report(r).empty());
  ASSERT_EQ(r["attributions"].size(), 1u);
  EXPECT_TRUE(fs::exists(path("explain") / "attribution_dim1.svg"));
  const auto [values, phi] = parse_attribution_csv(read_text_file(path("explain") / "attribution_dim1.csv"));
  EXPECT_EQ(values.size(), 30u);
  double sum = 0.0;
  for (double p : phi) sum += p;
  EXPECT_NEAR(sum, r["attributions"][0]["phi_sum"].get<double>(), 1e-9);

  e.target_class = "sideways";
  try {
    cmd_explain(e);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.category(), ErrorCategory::kValidation);
    EXPECT_NE(std::string(err.what()).find("discretisation"), std::string::npos);
  }
}

TEST_F(CommandsTest, BenchmarkRunsSelectedOptimizers) {
  BenchmarkOptions b;
  b.selection = {"RandomSearch", "DE-best/1/bin-p20-saturate"};
  b.dimension = 3;
  b.runs = 30;
  b.max_evaluations = 300;
  b.model = model_path();
  b.out = path("bench");
  const auto r = cmd_benchmark(b);
  EXPECT_TRUE(validate_report(r).empty());
  ASSERT_EQ(r["records"].size(), 2u);
  EXPECT_TRUE(fs::exists(path("bench") / "heatmap.svg"));
  for (const auto& rec : r["records"]) {
    const auto m = read_positions(path("bench") / rec["positions"].get<std::string>());
    EXPECT_EQ(m.runs(), 30u);
    EXPECT_EQ(m.dims(), 3u);
  }
  b.runs = 40;
  try {
    cmd_benchmark(b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kShape);
  }
}

TEST_F(CommandsTest, CompareProducesCellsPerMethodAndCondition) {
  CompareOptions c;
  c.dimensions = {1, 4};
  c.sample_sizes = {30};
  c.biased = 6;
  c.unbiased = 6;
  c.model_dir = *dir_ / "models";
  c.seed = 3;
  c.out = path("compare");
  const auto r = cmd_compare(c);
  EXPECT_TRUE(validate_report(r).empty());
  EXPECT_EQ(r["cells"].size(), 4u);
  for (const auto& cell : r["cells"]) {
    EXPECT_EQ(cell["tp"].get<int>() + cell["fn"].get<int>(), 6);
    EXPECT_EQ(cell["fp"].get<int>() + cell["tn"].get<int>(), 6);
  }
  EXPECT_TRUE(fs::exists(path("compare") / "summary.svg"));
  EXPECT_EQ(cmd_compare(c), r);

  c.sample_sizes = {100};
  try {
    cmd_compare(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kIo);
  }
}

#ifdef SBDETECT_CLI_PATH

struct CliResult {
  int exit_code;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(SBDETECT_CLI_PATH) + " " + args + " 2>&1";
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe.get())) > 0) out.append(buf.data(), got);
  const int status = pclose(pipe.release());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

nlohmann::json error_of(const CliResult& r) {
  const auto start = r.output.find("{\"error\"");
  if (start == std::string::npos) return {};
  return nlohmann::json::parse(r.output.substr(start, r.output.find('\n', start) - start));
}

TEST_F(CommandsTest, CliSuccessAndErrorExitCodes) {
  const auto ok = run_cli("detect --positions " + path("positions.csv").string() + " --method stat");
  EXPECT_EQ(ok.exit_code, 0) << ok.output;

  const auto missing = run_cli("detect --positions " + path("nope.csv").string() + " --method stat");
  EXPECT_EQ(missing.exit_code, exit_code(ErrorCategory::kIo));
  EXPECT_EQ(error_of(missing)["error"]["category"], "io");

  const auto bad_method = run_cli("detect --positions " + path("positions.csv").string() + " --method vote");
  EXPECT_EQ(bad_method.exit_code, exit_code(ErrorCategory::kValidation));
  EXPECT_EQ(error_of(bad_method)["error"]["category"], "validation");

  const auto usage = run_cli("detect --frobnicate");
  EXPECT_EQ(usage.exit_code, 2);
  EXPECT_EQ(error_of(usage)["error"]["category"], "usage");

  const auto bad_class = run_cli("explain --positions " + path("positions.csv").string() + " --model " +
                                 model_path().string() + " --class sideways --out " + path("x").string());
  EXPECT_EQ(bad_class.exit_code, exit_code(ErrorCategory::kValidation));
  EXPECT_NE(bad_class.output.find("gaps_clusters"), std::string::npos);

  const auto list = run_cli("benchmark --list");
  EXPECT_EQ(list.exit_code, 0);
  EXPECT_NE(list.output.find("DE-best/1/bin-p20-saturate"), std::string::npos);
}

TEST_F(CommandsTest, CliCorruptModelExitCode) {
  write_text_file(path("broken.bin"), "SBDMODEL-not-really");
  const auto r = run_cli("detect --positions " + path("positions.csv").string() + " --model " +
                         path("broken.bin").string() + " --method deep");
  EXPECT_EQ(r.exit_code, exit_code(ErrorCategory::kCorrupt));
  EXPECT_EQ(error_of(r)["error"]["category"], "corrupt");
}

#endif

}  // namespace
}  // namespace sbd
