// Copyright 2026 The emoint Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "emoint/pipeline/config.h"

#include <cstdlib>
#include <set>

#include <fmt/format.h>

#include "emoint/common/error.h"
#include "emoint/common/files.h"
#include "emoint/common/hash.h"
#include "emoint/common/url.h"
#include "emoint/dataprep/text_record.h"
#include "emoint/llmrun/stub_server.h"

namespace emoint::pipeline {
namespace {

using nlohmann::json;

[[noreturn]] void Fail(const std::string& message) {
  throw Error(ErrorCode::kConfigError, message);
}

// Reads one object, remembering which keys were consumed so leftovers can
// be reported as typos.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) Fail(fmt::format("'{}' must be an object", name_));
  }

  bool Has(const std::string& key) const { return j_.contains(key); }

  template <typename T>
  void Read(const std::string& key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      Fail(fmt::format("'{}.{}' has the wrong type", name_, key));
    }
  }

  void ReadPath(const std::string& key, fs::path& out) {
    std::string s = out.string();
    Read(key, s);
    out = s;
  }

  void ReadOptionalPath(const std::string& key, std::optional<fs::path>& out) {
    seen_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return;
    if (!j_.at(key).is_string()) {
      Fail(fmt::format("'{}.{}' must be a string", name_, key));
    }
    out = j_.at(key).get<std::string>();
  }

  template <typename T>
  void Require(const std::string& key, T& out) {
    if (!j_.contains(key)) {
      Fail(fmt::format("'{}.{}' is required", name_, key));
    }
    Read(key, out);
  }

  Section Child(const std::string& key) {
    seen_.insert(key);
    static const json kEmpty = json::object();
    return Section(j_.contains(key) ? j_.at(key) : kEmpty,
                   name_.empty() ? key : name_ + "." + key);
  }

  const json& Raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  void Finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) {
        Fail(fmt::format("unknown key '{}{}'", name_.empty() ? "" : name_ + ".",
                         key));
      }
    }
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

void RequirePositive(std::size_t v, const char* what) {
  if (v == 0) Fail(fmt::format("'{}' must be positive", what));
}

}  // namespace

fs::path PipelineConfig::Resolve(const fs::path& p) const {
  if (p.empty() || p.is_absolute()) return p;
  return (base_dir / p).lexically_normal();
}

fs::path PipelineConfig::Artifact(const std::string& name) const {
  return Resolve(paths.artifacts) / name;
}

fs::path PipelineConfig::ManifestDir() const {
  return Resolve(paths.artifacts) / "manifests";
}

fs::path PipelineConfig::ExportPath() const {
  return Resolve(paths.exports) / "ratings.csv";
}

fs::path PipelineConfig::RunsDir() const { return Resolve(paths.runs); }

fs::path PipelineConfig::StorePath() const { return Resolve(server.store); }

PipelineConfig ConfigFromJson(const json& j, const fs::path& base_dir) {
  PipelineConfig c;
  c.base_dir = base_dir;
  Section root(j, "");

  Section paths = root.Child("paths");
  paths.ReadPath("corpus", c.paths.corpus);
  paths.ReadPath("lexicon", c.paths.lexicon);
  paths.ReadPath("artifacts", c.paths.artifacts);
  paths.ReadPath("exports", c.paths.exports);
  paths.ReadPath("runs", c.paths.runs);
  paths.Finish();

  Section seeds = root.Child("seeds");
  seeds.Require("sample", c.seeds.sample);
  seeds.Require("plan", c.seeds.plan);
  seeds.Require("simulate", c.seeds.simulate);
  seeds.Require("split", c.seeds.split);
  seeds.Require("kfold", c.seeds.kfold);
  seeds.Finish();

  Section cleaning = root.Child("cleaning");
  cleaning.Read("split_platforms", c.cleaning.split_platforms);
  cleaning.Read("max_chars", c.cleaning.max_chars);
  cleaning.Read("stemmer", c.cleaning.stemmer);
  cleaning.Finish();

  Section sampling = root.Child("sampling");
  sampling.Read("n_weighted", c.sampling.n_weighted);
  sampling.Read("n_uniform", c.sampling.n_uniform);
  sampling.Finish();

  Section plan = root.Child("plan");
  plan.Read("sets", c.plan.sets);
  plan.Read("set_size", c.plan.set_size);
  plan.Read("raters_per_set", c.plan.raters_per_set);
  plan.Read("sets_per_week", c.plan.sets_per_week);
  plan.Read("weeks", c.plan.weeks);
  if (plan.Has("annotators") && plan.Has("annotator_count")) {
    Fail("give either 'plan.annotators' or 'plan.annotator_count'");
  }
  plan.Read("annotators", c.plan.annotators);
  std::size_t count = 0;
  plan.Read("annotator_count", count);
  for (std::size_t i = 0; i < count; ++i) {
    c.plan.annotators.push_back(fmt::format("a{:02}", i + 1));
  }
  plan.Finish();

  Section sim = root.Child("simulate");
  sim.Read("sigma_between", c.simulate.sigma_between);
  sim.Read("sigma_within", c.simulate.sigma_within);
  sim.Read("emotion_mean", c.simulate.emotion_mean);
  sim.Read("dimension_mean", c.simulate.dimension_mean);
  sim.Finish();

  Section split = root.Child("split");
  split.Read("test_frac", c.split.test_frac);
  split.Read("val_frac", c.split.val_frac);
  split.Read("include_dimensions", c.split.include_dimensions);
  split.Finish();

  Section kfold = root.Child("kfold");
  kfold.Read("k", c.kfold.k);
  kfold.Read("train_ratio", c.kfold.train_ratio);
  kfold.Read("val_ratio", c.kfold.val_ratio);
  kfold.Finish();

  Section shots = root.Child("shots");
  shots.Read("basic", c.shots.basic);
  shots.Read("dimensional", c.shots.dimensional);
  Section emb = shots.Child("embedding");
  emb.Read("provider", c.shots.embedding.provider);
  emb.Read("url", c.shots.embedding.url);
  emb.Read("model", c.shots.embedding.model);
  emb.Read("dimension", c.shots.embedding.dimension);
  emb.Read("batch_size", c.shots.embedding.batch_size);
  emb.Read("parallelism", c.shots.embedding.parallelism);
  emb.Finish();
  shots.Finish();

  Section llm = root.Child("llm");
  llm.Read("provider", c.llm.provider);
  llm.Read("url", c.llm.url);
  llm.Read("model", c.llm.model);
  llm.Read("run_id", c.llm.run_id);
  llm.Read("partition", c.llm.partition);
  llm.Read("stub_mode", c.llm.stub_mode);
  llm.Read("temperature", c.llm.temperature);
  llm.Read("max_attempts", c.llm.max_attempts);
  llm.Read("base_delay_ms", c.llm.base_delay_ms);
  llm.Read("parallelism", c.llm.parallelism);
  llm.Read("requests_per_minute", c.llm.requests_per_minute);
  std::size_t budget = 0;
  if (llm.Has("query_budget")) {
    llm.Read("query_budget", budget);
    c.llm.query_budget = budget;
  }
  llm.Finish();

  Section server = root.Child("server");
  server.Read("host", c.server.host);
  server.Read("port", c.server.port);
  server.ReadPath("store", c.server.store);
  server.ReadOptionalPath("static_dir", c.server.static_dir);
  server.ReadOptionalPath("instructions", c.server.instructions);
  server.Finish();

  Section eval = root.Child("eval");
  eval.Read("min_coverage", c.eval.min_coverage);
  eval.Read("histogram_bins", c.eval.histogram_bins);
  eval.Read("legacy_histogram_scaling", c.eval.legacy_histogram_scaling);
  if (eval.Has("predictions")) {
    const json& list = eval.Raw("predictions");
    if (!list.is_array()) Fail("'eval.predictions' must be an array");
    for (const json& item : list) {
      Section p(item, "eval.predictions[]");
      ExternalPredictions ext;
      std::string path;
      p.Require("name", ext.name);
      p.Require("path", path);
      p.Finish();
      ext.path = path;
      c.eval.predictions.push_back(std::move(ext));
    }
  }
  eval.Finish();

  Section sweep = root.Child("sweep");
  sweep.Read("family", c.sweep.family);
  if (sweep.Has("runs")) {
    const json& runs = sweep.Raw("runs");
    if (!runs.is_object()) Fail("'sweep.runs' must map shot counts to run ids");
    for (const auto& [k, id] : runs.items()) {
      int shots_k = 0;
      try {
        std::size_t used = 0;
        shots_k = std::stoi(k, &used);
        if (used != k.size()) throw std::invalid_argument(k);
      } catch (const std::exception&) {
        Fail(fmt::format("'sweep.runs' key '{}' is not a shot count", k));
      }
      if (!id.is_string()) Fail("'sweep.runs' values must be run ids");
      c.sweep.runs[shots_k] = id.get<std::string>();
    }
  }
  sweep.Finish();

  Section folds = root.Child("fold_report");
  folds.ReadOptionalPath("folds", c.fold_report.folds);
  folds.Read("k", c.fold_report.k);
  folds.Read("ci", c.fold_report.ci);
  folds.Finish();

  if (root.Has("prices")) {
    try {
      c.prices = llmrun::PriceTableFromJson(root.Raw("prices"));
    } catch (const Error& e) {
      Fail(fmt::format("'prices': {}", e.what()));
    }
  } else {
    root.Child("prices");
  }
  root.Finish();
  return c;
}

PipelineConfig LoadConfig(const fs::path& path) {
  json j;
  try {
    j = ReadJson(path);
  } catch (const Error& e) {
    Fail(fmt::format("cannot read config '{}': {}", path.string(), e.what()));
  }
  const fs::path base = fs::absolute(path).parent_path();
  return ConfigFromJson(j, base);
}

json ConfigToJson(const PipelineConfig& c) {
  json prices = json::object();
  for (const auto& [model, p] : c.prices) {
    prices[model] = {{"input_per_million", p.input_per_million},
                     {"output_per_million", p.output_per_million}};
  }
  json sweep_runs = json::object();
  for (const auto& [k, id] : c.sweep.runs) sweep_runs[std::to_string(k)] = id;
  json preds = json::array();
  for (const auto& p : c.eval.predictions) {
    preds.push_back({{"name", p.name}, {"path", p.path.string()}});
  }
  json j = {
      {"paths",
       {{"corpus", c.paths.corpus.string()},
        {"lexicon", c.paths.lexicon.string()},
        {"artifacts", c.paths.artifacts.string()},
        {"exports", c.paths.exports.string()},
        {"runs", c.paths.runs.string()}}},
      {"seeds",
       {{"sample", c.seeds.sample},
        {"plan", c.seeds.plan},
        {"simulate", c.seeds.simulate},
        {"split", c.seeds.split},
        {"kfold", c.seeds.kfold}}},
      {"cleaning",
       {{"split_platforms", c.cleaning.split_platforms},
        {"max_chars", c.cleaning.max_chars},
        {"stemmer", c.cleaning.stemmer}}},
      {"sampling",
       {{"n_weighted", c.sampling.n_weighted},
        {"n_uniform", c.sampling.n_uniform}}},
      {"plan",
       {{"sets", c.plan.sets},
        {"set_size", c.plan.set_size},
        {"raters_per_set", c.plan.raters_per_set},
        {"sets_per_week", c.plan.sets_per_week},
        {"weeks", c.plan.weeks},
        {"annotators", c.plan.annotators}}},
      {"simulate",
       {{"sigma_between", c.simulate.sigma_between},
        {"sigma_within", c.simulate.sigma_within},
        {"emotion_mean", c.simulate.emotion_mean},
        {"dimension_mean", c.simulate.dimension_mean}}},
      {"split",
       {{"test_frac", c.split.test_frac},
        {"val_frac", c.split.val_frac},
        {"include_dimensions", c.split.include_dimensions}}},
      {"kfold",
       {{"k", c.kfold.k},
        {"train_ratio", c.kfold.train_ratio},
        {"val_ratio", c.kfold.val_ratio}}},
      {"shots",
       {{"basic", c.shots.basic},
        {"dimensional", c.shots.dimensional},
        {"embedding",
         {{"provider", c.shots.embedding.provider},
          {"url", c.shots.embedding.url},
          {"model", c.shots.embedding.model},
          {"dimension", c.shots.embedding.dimension},
          {"batch_size", c.shots.embedding.batch_size},
          {"parallelism", c.shots.embedding.parallelism}}}}},
      {"llm",
       {{"provider", c.llm.provider},
        {"url", c.llm.url},
        {"model", c.llm.model},
        {"run_id", c.llm.run_id},
        {"partition", c.llm.partition},
        {"stub_mode", c.llm.stub_mode},
        {"temperature", c.llm.temperature},
        {"max_attempts", c.llm.max_attempts},
        {"base_delay_ms", c.llm.base_delay_ms},
        {"parallelism", c.llm.parallelism},
        {"requests_per_minute", c.llm.requests_per_minute}}},
      {"server",
       {{"host", c.server.host},
        {"port", c.server.port},
        {"store", c.server.store.string()}}},
      {"eval",
       {{"min_coverage", c.eval.min_coverage},
        {"histogram_bins", c.eval.histogram_bins},
        {"legacy_histogram_scaling", c.eval.legacy_histogram_scaling},
        {"predictions", preds}}},
      {"sweep", {{"family", c.sweep.family}, {"runs", sweep_runs}}},
      {"fold_report", {{"k", c.fold_report.k}, {"ci", c.fold_report.ci}}},
      {"prices", prices},
  };
  if (c.llm.query_budget) j["llm"]["query_budget"] = *c.llm.query_budget;
  if (c.server.static_dir) {
    j["server"]["static_dir"] = c.server.static_dir->string();
  }
  if (c.server.instructions) {
    j["server"]["instructions"] = c.server.instructions->string();
  }
  if (c.fold_report.folds) {
    j["fold_report"]["folds"] = c.fold_report.folds->string();
  }
  return j;
}

void ValidateConfig(const PipelineConfig& c) {
  auto must_exist = [&](const fs::path& p, const char* what) {
    if (p.empty()) Fail(fmt::format("'{}' is not set", what));
    const fs::path full = c.Resolve(p);
    if (!fs::is_regular_file(full)) {
      Fail(fmt::format("'{}' does not name a file: {}", what, full.string()));
    }
  };
  must_exist(c.paths.corpus, "paths.corpus");
  must_exist(c.paths.lexicon, "paths.lexicon");
  for (const auto& p : c.eval.predictions) {
    must_exist(p.path, "eval.predictions[].path");
  }
  if (c.fold_report.folds) must_exist(*c.fold_report.folds, "fold_report.folds");
  if (c.server.instructions) {
    must_exist(*c.server.instructions, "server.instructions");
  }
  if (c.server.static_dir && !fs::is_directory(c.Resolve(*c.server.static_dir))) {
    Fail("'server.static_dir' is not a directory");
  }

  for (const std::string& p : c.cleaning.split_platforms) {
    const auto parsed = dataprep::ParsePlatform(p);
    if (parsed == dataprep::Platform::kOther && p != "other") {
      Fail(fmt::format("unknown platform '{}'", p));
    }
  }
  if (c.cleaning.stemmer != "suffix" && c.cleaning.stemmer != "identity") {
    Fail("'cleaning.stemmer' must be 'suffix' or 'identity'");
  }
  RequirePositive(c.cleaning.max_chars, "cleaning.max_chars");
  RequirePositive(c.plan.set_size, "plan.set_size");
  RequirePositive(c.plan.raters_per_set, "plan.raters_per_set");
  const std::size_t sampled = c.sampling.n_weighted + c.sampling.n_uniform;
  RequirePositive(sampled, "sampling.n_weighted + sampling.n_uniform");
  if (c.plan.sets * c.plan.set_size != sampled) {
    Fail(fmt::format(
        "plan.sets * plan.set_size = {} but sampling selects {} texts",
        c.plan.sets * c.plan.set_size, sampled));
  }
  if (c.plan.annotators.size() < c.plan.raters_per_set) {
    Fail("fewer annotators than raters per set");
  }
  std::set<std::string> unique(c.plan.annotators.begin(),
                               c.plan.annotators.end());
  if (unique.size() != c.plan.annotators.size()) {
    Fail("duplicate annotator ids");
  }
  if (!(c.simulate.sigma_between >= 0) || !(c.simulate.sigma_within >= 0)) {
    Fail("simulation spreads must be nonnegative");
  }
  if (!(c.split.test_frac > 0 && c.split.val_frac >= 0 &&
        c.split.test_frac + c.split.val_frac < 1)) {
    Fail("split fractions must satisfy 0 < test, 0 <= val, test + val < 1");
  }
  if (c.kfold.k < 2) Fail("'kfold.k' must be at least 2");
  if (c.kfold.train_ratio <= 0 || c.kfold.val_ratio < 0) {
    Fail("bad k-fold train:val ratio");
  }
  auto check_shots = [](int k, const char* what) {
    if (k < 0 || k > 5) Fail(fmt::format("'{}' must be in 0..5", what));
  };
  check_shots(c.shots.basic, "shots.basic");
  check_shots(c.shots.dimensional, "shots.dimensional");
  const auto& emb = c.shots.embedding;
  if (emb.provider == "local") {
    RequirePositive(emb.dimension, "shots.embedding.dimension");
  } else if (emb.provider == "http") {
    SplitUrl(emb.url);
    if (emb.model.empty()) Fail("'shots.embedding.model' is required");
  } else {
    Fail("'shots.embedding.provider' must be 'local' or 'http'");
  }
  if (c.llm.provider == "http") {
    SplitUrl(c.llm.url);
  } else if (c.llm.provider == "stub") {
    try {
      llmrun::ParseStubMode(c.llm.stub_mode);
    } catch (const Error& e) {
      Fail(e.what());
    }
  } else {
    Fail("'llm.provider' must be 'http' or 'stub'");
  }
  if (c.llm.model.empty()) Fail("'llm.model' is required");
  if (c.llm.run_id.empty() ||
      c.llm.run_id.find_first_of("/\\") != std::string::npos ||
      c.llm.run_id == "." || c.llm.run_id == "..") {
    Fail("'llm.run_id' must be a plain name");
  }
  if (c.llm.partition != "test" && c.llm.partition != "val" &&
      c.llm.partition != "train" && c.llm.partition != "all") {
    Fail("'llm.partition' must be train, val, test or all");
  }
  if (c.llm.max_attempts < 1) Fail("'llm.max_attempts' must be >= 1");
  if (c.llm.base_delay_ms < 0) Fail("'llm.base_delay_ms' must be >= 0");
  RequirePositive(c.llm.parallelism, "llm.parallelism");
  if (c.llm.requests_per_minute < 0) {
    Fail("'llm.requests_per_minute' must be >= 0");
  }
  if (!(c.eval.min_coverage >= 0 && c.eval.min_coverage <= 1)) {
    Fail("'eval.min_coverage' must be in [0, 1]");
  }
  if (c.eval.histogram_bins < 1) Fail("'eval.histogram_bins' must be >= 1");
  std::set<std::string> names;
  for (const auto& p : c.eval.predictions) {
    if (p.name.empty() || !names.insert(p.name).second) {
      Fail("prediction source names must be unique and nonempty");
    }
  }
  if (c.sweep.family != "basic" && c.sweep.family != "dimensional") {
    Fail("'sweep.family' must be 'basic' or 'dimensional'");
  }
  for (const auto& [k, id] : c.sweep.runs) check_shots(k, "sweep.runs key");
  if (c.fold_report.k < 2) Fail("'fold_report.k' must be >= 2");
  if (c.fold_report.ci != "t" && c.fold_report.ci != "fisher_z") {
    Fail("'fold_report.ci' must be 't' or 'fisher_z'");
  }
  if (c.server.port < 0 || c.server.port > 65535) Fail("bad server port");
}

std::string ApiKey() { return EnvOr("EMOINT_API_KEY", ""); }

std::string AnnotatorToken(const std::string& annotator_id) {
  const std::string secret = EnvOr("EMOINT_TOKEN_SECRET", "");
  if (secret.empty()) {
    Fail("EMOINT_TOKEN_SECRET must be set to derive annotator tokens");
  }
  return Sha256Hex(secret + ":" + annotator_id).substr(0, 32);
}

}  // namespace emoint::pipeline
