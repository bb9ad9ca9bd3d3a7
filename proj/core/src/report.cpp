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

#include "sbdetect/report.hpp"

#include <array>
#include <cmath>

#include "sbdetect/error.hpp"

namespace sbd {
namespace {

constexpr std::array<std::string_view, 4> kAgreementNames = {"BothBiased", "BothUnbiased",
                                                             "StatOnly", "DeepOnly"};

nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json class_order() {
  nlohmann::json j = nlohmann::json::array();
  for (auto c : kAllClasses) j.push_back(class_name(c));
  return j;
}

// ---- schema ---------------------------------------------------------------------

enum class JType { kString, kInteger, kNumber, kNumberOrNull, kBoolean, kObject, kArray };

struct Field {
  std::string_view name;
  JType type;
  bool required = true;
  // Rules for an object field, or for each element of an array of objects.
  const std::vector<Field>* nested = nullptr;
};

std::string_view type_name(JType t) {
  switch (t) {
    case JType::kString: return "string";
    case JType::kInteger: return "integer";
    case JType::kNumber: return "number";
    case JType::kNumberOrNull: return "number or null";
    case JType::kBoolean: return "boolean";
    case JType::kObject: return "object";
    case JType::kArray: return "array";
  }
  return "?";
}

bool has_type(const nlohmann::json& v, JType t) {
  switch (t) {
    case JType::kString: return v.is_string();
    case JType::kInteger: return v.is_number_integer();
    case JType::kNumber: return v.is_number();
    case JType::kNumberOrNull: return v.is_number() || v.is_null();
    case JType::kBoolean: return v.is_boolean();
    case JType::kObject: return v.is_object();
    case JType::kArray: return v.is_array();
  }
  return false;
}

void check(const nlohmann::json& obj, const std::vector<Field>& rules, const std::string& path,
           std::vector<std::string>& errors) {
  if (!obj.is_object()) {
    errors.push_back(path + ": expected object");
    return;
  }
  for (const auto& f : rules) {
    const std::string where = path + "." + std::string(f.name);
    auto it = obj.find(f.name);
    if (it == obj.end()) {
      if (f.required) errors.push_back(where + ": missing");
      continue;
    }
    if (!has_type(*it, f.type)) {
      errors.push_back(where + ": expected " + std::string(type_name(f.type)));
      continue;
    }
    if (!f.nested) continue;
    if (f.type == JType::kObject) {
      check(*it, *f.nested, where, errors);
    } else if (f.type == JType::kArray) {
      for (std::size_t i = 0; i < it->size(); ++i)
        check((*it)[i], *f.nested, where + "[" + std::to_string(i) + "]", errors);
    }
  }
}

const std::vector<Field> kGenerator = {{"name", JType::kString}, {"version", JType::kString}};
const std::vector<Field> kHeader = {{"schema", JType::kString},
                                    {"schema_version", JType::kInteger},
                                    {"kind", JType::kString},
                                    {"generator", JType::kObject, true, &kGenerator}};

const std::vector<Field> kTest = {{"test", JType::kString},
                                  {"statistic", JType::kNumber},
                                  {"p_value", JType::kNumber},
                                  {"rejected", JType::kBoolean}};
const std::vector<Field> kTies = {{"at_lower", JType::kInteger},
                                  {"at_upper", JType::kInteger},
                                  {"max_multiplicity", JType::kInteger}};
const std::vector<Field> kStatDimension = {{"index", JType::kInteger},
                                           {"rejected", JType::kBoolean},
                                           {"tests", JType::kArray, true, &kTest},
                                           {"ties", JType::kObject, true, &kTies}};
const std::vector<Field> kStatistical = {{"alpha", JType::kNumber},
                                         {"biased", JType::kBoolean},
                                         {"rejected_count", JType::kInteger},
                                         {"dimension_count", JType::kInteger},
                                         {"fraction_rejected", JType::kNumber},
                                         {"dimensions", JType::kArray, true, &kStatDimension}};

const std::vector<Field> kNetwork = {{"sample_size", JType::kInteger},
                                     {"block1_filters", JType::kInteger},
                                     {"block2_filters", JType::kInteger},
                                     {"kernel_size", JType::kInteger},
                                     {"pool_window", JType::kInteger},
                                     {"dense_units", JType::kInteger},
                                     {"n_classes", JType::kInteger}};
const std::vector<Field> kDeepDimension = {{"index", JType::kInteger},
                                           {"label", JType::kString},
                                           {"probabilities", JType::kArray}};
const std::vector<Field> kDeep = {{"model", JType::kObject, true, &kNetwork},
                                  {"class_order", JType::kArray},
                                  {"biased", JType::kBoolean},
                                  {"non_uniform_count", JType::kInteger},
                                  {"fraction_non_uniform", JType::kNumber},
                                  {"aggregated", JType::kArray},
                                  {"aggregated_label", JType::kString},
                                  {"dimensions", JType::kArray, true, &kDeepDimension}};

const std::vector<Field> kSubject = {{"source", JType::kString},
                                     {"runs", JType::kInteger},
                                     {"dims", JType::kInteger}};
const std::vector<Field> kDetect = {{"subject", JType::kObject, true, &kSubject},
                                    {"alpha", JType::kNumber},
                                    {"method", JType::kString},
                                    {"statistical", JType::kObject, false, &kStatistical},
                                    {"deep", JType::kObject, false, &kDeep},
                                    {"agreement", JType::kString, false}};

const std::vector<Field> kCell = {{"method", JType::kString},    {"dimension", JType::kInteger},
                                  {"sample_size", JType::kInteger}, {"tp", JType::kInteger},
                                  {"fp", JType::kInteger},        {"tn", JType::kInteger},
                                  {"fn", JType::kInteger},        {"fpr", JType::kNumber},
                                  {"fnr", JType::kNumber},        {"f1", JType::kNumber}};
const std::vector<Field> kCounts = {{"biased", JType::kInteger}, {"unbiased", JType::kInteger}};
const std::vector<Field> kCompare = {{"alpha", JType::kNumber},
                                     {"seed", JType::kInteger},
                                     {"subjects", JType::kObject, true, &kCounts},
                                     {"dimensions", JType::kArray},
                                     {"sample_sizes", JType::kArray},
                                     {"cells", JType::kArray, true, &kCell},
                                     {"figure", JType::kString}};

const std::vector<Field> kOptimizer = {{"id", JType::kString},
                                       {"algorithm", JType::kString},
                                       {"correction", JType::kString}};
const std::vector<Field> kBudget = {{"dimension", JType::kInteger},
                                    {"max_evaluations", JType::kInteger},
                                    {"runs", JType::kInteger},
                                    {"master_seed", JType::kInteger},
                                    {"f0_mode", JType::kString}};
const std::vector<Field> kRecord = {{"subject_id", JType::kString},
                                    {"optimizer", JType::kObject, true, &kOptimizer},
                                    {"positions", JType::kString},
                                    {"statistical", JType::kObject, true, &kStatistical},
                                    {"deep", JType::kObject, true, &kDeep},
                                    {"agreement", JType::kString}};
const std::vector<Field> kBenchmark = {{"alpha", JType::kNumber},
                                       {"budget", JType::kObject, true, &kBudget},
                                       {"model", JType::kString},
                                       {"records", JType::kArray, true, &kRecord},
                                       {"figure", JType::kString}};

const std::vector<Field> kTrainConfig = {{"epochs", JType::kInteger},
                                         {"batch_size", JType::kInteger},
                                         {"learning_rate", JType::kNumber},
                                         {"seed", JType::kInteger},
                                         {"validation_fraction", JType::kNumber},
                                         {"keep_best", JType::kBoolean}};
const std::vector<Field> kEpoch = {{"epoch", JType::kInteger},
                                   {"train_loss", JType::kNumberOrNull},
                                   {"train_acc", JType::kNumber},
                                   {"val_loss", JType::kNumberOrNull},
                                   {"val_acc", JType::kNumber}};
const std::vector<Field> kEvaluation = {{"macro_f1", JType::kNumber},
                                        {"accuracy", JType::kNumber},
                                        {"per_class_f1", JType::kArray},
                                        {"confusion", JType::kArray}};
const std::vector<Field> kTrain = {{"dataset", JType::kString},
                                   {"model_path", JType::kString},
                                   {"history_path", JType::kString},
                                   {"network", JType::kObject, true, &kNetwork},
                                   {"train_config", JType::kObject, true, &kTrainConfig},
                                   {"history", JType::kArray, true, &kEpoch},
                                   {"best_epoch", JType::kInteger},
                                   {"evaluation", JType::kObject, true, &kEvaluation}};

const std::vector<Field> kAttribution = {{"dimension", JType::kInteger},
                                         {"target_class", JType::kString},
                                         {"predicted_label", JType::kString},
                                         {"base_value", JType::kNumber},
                                         {"prediction_value", JType::kNumber},
                                         {"phi_sum", JType::kNumber},
                                         {"table", JType::kString},
                                         {"figure", JType::kString}};
const std::vector<Field> kExplain = {{"model", JType::kString},
                                     {"source", JType::kString},
                                     {"background_size", JType::kInteger},
                                     {"n_coalitions", JType::kInteger},
                                     {"seed", JType::kInteger},
                                     {"attributions", JType::kArray, true, &kAttribution}};

const std::vector<Field>* rules_for(std::string_view kind) {
  if (kind == "detect") return &kDetect;
  if (kind == "compare") return &kCompare;
  if (kind == "benchmark") return &kBenchmark;
  if (kind == "train") return &kTrain;
  if (kind == "explain") return &kExplain;
  return nullptr;
}

}  // namespace

Agreement agreement(bool statistical_biased, bool deep_biased) {
  if (statistical_biased && deep_biased) return Agreement::kBothBiased;
  if (statistical_biased) return Agreement::kStatOnly;
  if (deep_biased) return Agreement::kDeepOnly;
  return Agreement::kBothUnbiased;
}

std::string_view agreement_name(Agreement a) { return kAgreementNames[static_cast<std::size_t>(a)]; }

ComparisonRecord make_comparison(std::string subject_id, RejectionSummary statistical,
                                 DeepBiasReport deep) {
  ComparisonRecord r;
  r.subject_id = std::move(subject_id);
  r.agreement = agreement(statistical.biased, deep.biased);
  r.statistical = std::move(statistical);
  r.deep = std::move(deep);
  return r;
}

nlohmann::json report_header(std::string_view kind) {
  return {{"schema", kReportSchema},
          {"schema_version", kReportSchemaVersion},
          {"kind", kind},
          {"generator", {{"name", "sbdetect"}, {"version", SBDETECT_VERSION}}}};
}

nlohmann::json to_json(const RejectionSummary& s) {
  nlohmann::json dims = nlohmann::json::array();
  for (const auto& d : s.per_dimension) {
    nlohmann::json tests = nlohmann::json::array();
    for (std::size_t t = 0; t < d.results.size(); ++t) {
      tests.push_back({{"test", test_name(d.results[t].test)},
                       {"statistic", d.results[t].statistic},
                       {"p_value", d.results[t].p_value},
                       {"rejected", static_cast<bool>(d.test_rejected[t])}});
    }
    dims.push_back({{"index", d.index},
                    {"rejected", d.rejected},
                    {"tests", tests},
                    {"ties",
                     {{"at_lower", d.at_lower},
                      {"at_upper", d.at_upper},
                      {"max_multiplicity", d.max_multiplicity}}}});
  }
  return {{"alpha", s.alpha},
          {"biased", s.biased},
          {"rejected_count", s.rejected_count},
          {"dimension_count", s.per_dimension.size()},
          {"fraction_rejected", s.fraction_rejected},
          {"dimensions", dims}};
}

nlohmann::json to_json(const DeepBiasReport& r, const NetworkConfig& model) {
  nlohmann::json dims = nlohmann::json::array();
  for (std::size_t i = 0; i < r.per_dimension.size(); ++i) {
    const auto& p = r.per_dimension[i];
    dims.push_back({{"index", i}, {"label", class_name(p.label)}, {"probabilities", p.probabilities}});
  }
  return {{"model", to_json(model)},
          {"class_order", class_order()},
          {"biased", r.biased},
          {"non_uniform_count", r.non_uniform_count},
          {"fraction_non_uniform", r.fraction_non_uniform},
          {"aggregated", r.aggregated},
          {"aggregated_label", class_name(r.aggregated_label)},
          {"dimensions", dims}};
}

nlohmann::json to_json(const ComparisonRecord& r, const NetworkConfig& model) {
  return {{"subject_id", r.subject_id},
          {"statistical", to_json(r.statistical)},
          {"deep", to_json(r.deep, model)},
          {"agreement", agreement_name(r.agreement)}};
}

nlohmann::json to_json(const ExperimentCell& c) {
  return {{"method", c.method},
          {"dimension", c.dimension},
          {"sample_size", c.sample_size},
          {"tp", c.counts.tp},
          {"fp", c.counts.fp},
          {"tn", c.counts.tn},
          {"fn", c.counts.fn},
          {"fpr", c.counts.false_positive_rate()},
          {"fnr", c.counts.false_negative_rate()},
          {"f1", c.counts.f1()}};
}

nlohmann::json to_json(const NetworkConfig& c) {
  return {{"sample_size", c.sample_size},     {"block1_filters", c.block1_filters},
          {"block2_filters", c.block2_filters}, {"kernel_size", c.kernel_size},
          {"pool_window", c.pool_window},       {"dense_units", c.dense_units},
          {"n_classes", NetworkConfig::n_classes}};
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"seed", c.seed},
          {"validation_fraction", c.validation_fraction},
          {"keep_best", c.keep_best},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"epsilon", c.epsilon}};
}

nlohmann::json to_json(const EpochStats& e) {
  return {{"epoch", e.epoch},
          {"train_loss", finite_or_null(e.train_loss)},
          {"train_acc", e.train_accuracy},
          {"val_loss", finite_or_null(e.val_loss)},
          {"val_acc", e.val_accuracy}};
}

nlohmann::json to_json(const Evaluation& ev) {
  nlohmann::json per_class = nlohmann::json::array();
  nlohmann::json confusion = nlohmann::json::array();
  for (std::size_t r = 0; r < ev.confusion.classes(); ++r) {
    per_class.push_back(ev.confusion.f1(r));
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t c = 0; c < ev.confusion.classes(); ++c) row.push_back(ev.confusion.at(r, c));
    confusion.push_back(row);
  }
  return {{"macro_f1", ev.macro_f1},
          {"accuracy", ev.accuracy},
          {"class_order", class_order()},
          {"per_class_f1", per_class},
          {"confusion", confusion}};
}

std::vector<std::string> validate_report(const nlohmann::json& report) {
  std::vector<std::string> errors;
  check(report, kHeader, "$", errors);
  if (!errors.empty()) return errors;
  if (report["schema"] != kReportSchema) errors.push_back("$.schema: expected '" + std::string(kReportSchema) + "'");
  if (report["schema_version"] != kReportSchemaVersion)
    errors.push_back("$.schema_version: unsupported version " + report["schema_version"].dump());
  const std::string kind = report["kind"];
  const auto* rules = rules_for(kind);
  if (!rules) {
    errors.push_back("$.kind: unknown kind '" + kind + "'");
    return errors;
  }
  check(report, *rules, "$", errors);
  if (!errors.empty()) return errors;

  if (kind == "detect") {
    const std::string method = report["method"];
    const bool want_stat = method == "stat" || method == "both";
    const bool want_deep = method == "deep" || method == "both";
    if (!want_stat && !want_deep) errors.push_back("$.method: expected stat, deep or both");
    if (want_stat && !report.contains("statistical")) errors.push_back("$.statistical: missing for method " + method);
    if (want_deep && !report.contains("deep")) errors.push_back("$.deep: missing for method " + method);
    if (method == "both") {
      if (!report.contains("agreement")) {
        errors.push_back("$.agreement: missing for method both");
      } else if (errors.empty()) {
        const auto expected = agreement(report["statistical"]["biased"], report["deep"]["biased"]);
        if (report["agreement"] != agreement_name(expected))
          errors.push_back("$.agreement: inconsistent with the biased flags");
      }
    }
  }
  if (kind == "benchmark") {
    for (std::size_t i = 0; i < report["records"].size(); ++i) {
      const auto& r = report["records"][i];
      const auto expected = agreement(r["statistical"]["biased"], r["deep"]["biased"]);
      if (r["agreement"] != agreement_name(expected))
        errors.push_back("$.records[" + std::to_string(i) + "].agreement: inconsistent with the biased flags");
    }
  }
  if (kind == "compare") {
    for (std::size_t i = 0; i < report["cells"].size(); ++i) {
      const auto& c = report["cells"][i];
      for (const char* rate : {"fpr", "fnr", "f1"}) {
        const double v = c[rate];
        if (!(v >= 0.0 && v <= 1.0))
          errors.push_back("$.cells[" + std::to_string(i) + "]." + rate + ": outside [0,1]");
      }
    }
  }
  return errors;
}

void require_valid_report(const nlohmann::json& report) {
  const auto errors = validate_report(report);
  if (errors.empty()) return;
  std::string msg = "report failed schema validation:";
  for (const auto& e : errors) msg += "\n  " + e;
  fail(ErrorCategory::kValidation, msg);
}

}  // namespace sbd
