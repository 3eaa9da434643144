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

#include "emoint/pipeline/stages.h"

#include <algorithm>
#include <chrono>
#include <set>
#include <thread>

#include <fmt/format.h>

#include "emoint/annostore/plan.h"
#include "emoint/annostore/rating.h"
#include "emoint/annostore/server.h"
#include "emoint/annostore/store.h"
#include "emoint/common/csv.h"
#include "emoint/common/error.h"
#include "emoint/common/files.h"
#include "emoint/common/hash.h"
#include "emoint/common/metrics.h"
#include "emoint/dataprep/cleaning.h"
#include "emoint/dataprep/lexicon.h"
#include "emoint/dataprep/sampling.h"
#include "emoint/dataprep/splits.h"
#include "emoint/evaluation/correlation.h"
#include "emoint/evaluation/predictions.h"
#include "emoint/evaluation/report.h"
#include "emoint/fewshot/embedding.h"
#include "emoint/fewshot/prompt.h"
#include "emoint/fewshot/selection.h"
#include "emoint/llmrun/client.h"
#include "emoint/llmrun/stub_server.h"
#include "emoint/pipeline/synthetic.h"
#include "emoint/reliability/agreement.h"

namespace emoint::pipeline {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr char kExternal[] = "external";

std::string DisplayPath(const PipelineConfig& config, const fs::path& p) {
  const fs::path rel = p.lexically_relative(config.base_dir);
  return rel.empty() ? p.string() : rel.string();
}

// Collects inputs and outputs while a stage runs, then writes the manifest.
class StageRecord {
 public:
  StageRecord(const PipelineConfig& config, std::string stage,
              std::string run_id = "")
      : config_(config),
        stage_(std::move(stage)),
        run_id_(std::move(run_id)),
        started_wall_(annostore::UtcNow()),
        started_(Clock::now()) {}

  // Fails with kMissingUpstream naming the stage that would produce `path`.
  fs::path Input(const fs::path& path, const std::string& producer) {
    if (!fs::exists(path)) {
      if (producer == kExternal) {
        throw Error(ErrorCode::kMissingUpstream,
                    fmt::format("input file '{}' does not exist",
                                DisplayPath(config_, path)));
      }
      throw Error(ErrorCode::kMissingUpstream,
                  fmt::format("'{}' needs '{}'; run stage '{}' first", stage_,
                              DisplayPath(config_, path), producer));
    }
    inputs_.push_back({path, ProducerOf(path, producer)});
    return path;
  }

  void Output(const fs::path& path) { outputs_.push_back(path); }
  // Files that carry timings, listed without a content hash.
  void Attach(const fs::path& path) { attached_.push_back(path); }

  void Seed(std::uint64_t seed) { seed_ = seed; }
  json& Params() { return params_; }

  json Finish() {
    json inputs = json::array();
    for (const auto& [path, producer] : inputs_) {
      inputs.push_back({{"path", DisplayPath(config_, path)},
                        {"sha256", HashOf(path)},
                        {"stage", producer}});
    }
    json outputs = json::array();
    for (const fs::path& path : outputs_) {
      outputs.push_back(
          {{"path", DisplayPath(config_, path)}, {"sha256", HashOf(path)}});
    }
    json attached = json::array();
    for (const fs::path& path : attached_) {
      attached.push_back(DisplayPath(config_, path));
    }
    const double seconds =
        std::chrono::duration<double>(Clock::now() - started_).count();
    json m = {{"stage", stage_},
              {"seed", seed_ ? json(*seed_) : json(nullptr)},
              {"params", params_},
              {"inputs", inputs},
              {"outputs", outputs},
              {"attached", attached},
              {"started_at", started_wall_},
              {"finished_at", annostore::UtcNow()},
              {"seconds", seconds}};
    if (!run_id_.empty()) m["run_id"] = run_id_;
    WriteJson(ManifestPath(config_, stage_, run_id_), m);
    return m;
  }

 private:
  static std::string HashOf(const fs::path& path) {
    if (fs::is_directory(path)) return "";
    return Sha256File(path);
  }

  // Prefers the most recent manifest on disk listing the file as an output.
  std::string ProducerOf(const fs::path& path, const std::string& fallback) {
    const std::string shown = DisplayPath(config_, path);
    std::string best = fallback;
    std::string best_time;
    for (const json& m : LoadManifests(config_)) {
      for (const json& out : m.value("outputs", json::array())) {
        if (out.value("path", "") != shown) continue;
        const std::string when = m.value("finished_at", "");
        if (!best_time.empty() && when < best_time) continue;
        best_time = when;
        best = m.value("stage", fallback);
        if (m.contains("run_id")) best += ":" + m["run_id"].get<std::string>();
      }
    }
    return best;
  }

  const PipelineConfig& config_;
  std::string stage_;
  std::string run_id_;
  std::string started_wall_;
  Clock::time_point started_;
  std::optional<std::uint64_t> seed_;
  json params_ = json::object();
  std::vector<std::pair<fs::path, std::string>> inputs_;
  std::vector<fs::path> outputs_;
  std::vector<fs::path> attached_;
};

fs::path EnsureParent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  return p;
}

// Artifact names, one place.
fs::path RawPath(const PipelineConfig& c) { return c.Artifact("raw.jsonl"); }
fs::path CleanPath(const PipelineConfig& c) { return c.Artifact("clean.jsonl"); }
fs::path ScoredPath(const PipelineConfig& c) {
  return c.Artifact("scored.jsonl");
}
fs::path SamplePath(const PipelineConfig& c) {
  return c.Artifact("sample.jsonl");
}
fs::path PlanPath(const PipelineConfig& c) { return c.Artifact("plan.json"); }
fs::path SplitsPath(const PipelineConfig& c) {
  return c.Artifact("splits.csv");
}
fs::path ShotsPath(const PipelineConfig& c) { return c.Artifact("shots.json"); }
fs::path OutcomesPath(const PipelineConfig& c, const std::string& run_id) {
  return c.RunsDir() / run_id / "outcomes.jsonl";
}

const std::string& ExportProducer() {
  static const std::string kName = "simulate-ratings";
  return kName;
}

std::map<std::string, std::string> CleanTexts(const fs::path& sample) {
  std::map<std::string, std::string> out;
  for (const auto& r : dataprep::ReadCorpus(sample)) {
    out[r.id] = r.clean_text;
  }
  return out;
}

std::unique_ptr<dataprep::Stemmer> MakeStemmer(const PipelineConfig& c) {
  if (c.cleaning.stemmer == "identity") {
    return std::make_unique<dataprep::IdentityStemmer>();
  }
  return std::make_unique<dataprep::SuffixStemmer>();
}

// Texts in the evaluated partition, sorted.
std::set<std::string> PartitionIds(const PipelineConfig& c,
                                   const fs::path& splits) {
  std::set<std::string> ids;
  for (const auto& a : dataprep::ReadSplits(splits)) {
    if (c.llm.partition == "all" ||
        dataprep::PartitionName(a.partition) == c.llm.partition) {
      ids.insert(a.text_id);
    }
  }
  return ids;
}

struct Reference {
  std::map<std::string, MetricArray> means;
  evaluation::SdProfile profile;
  std::vector<annostore::RatingRecord> finals;
};

Reference LoadReference(const fs::path& export_path,
                        const std::set<std::string>& keep) {
  Reference ref;
  for (auto& r : annostore::ReadExport(export_path)) {
    if (keep.count(r.text_id)) ref.finals.push_back(std::move(r));
  }
  if (ref.finals.empty()) {
    throw Error(ErrorCode::kNoData,
                "no reference ratings fall in the evaluated partition");
  }
  for (const auto& [id, agg] : annostore::AggregateAll(ref.finals)) {
    ref.means[id] = agg.mean;
  }
  ref.profile = evaluation::ComputeSdProfile(
      annostore::CanonicalByText(ref.finals));
  return ref;
}

json HistogramsJson(const std::vector<annostore::RatingRecord>& finals,
                    const std::vector<evaluation::PredictionSet>& sources,
                    int bins, bool legacy) {
  json out = json::array();
  for (Metric m : kAllMetrics) {
    std::vector<int> raw;
    raw.reserve(finals.size());
    for (const auto& r : finals) raw.push_back(r.labels[Index(m)]);
    if (!raw.empty()) {
      out.push_back(evaluation::HistogramToJson(
          evaluation::RawLabelHistogram("annotators", m, raw, bins, legacy)));
    }
    for (const auto& s : sources) {
      std::vector<double> values;
      for (const auto& [id, row] : s.rows) {
        if (row[Index(m)]) values.push_back(*row[Index(m)]);
      }
      if (values.empty()) continue;
      out.push_back(evaluation::HistogramToJson(
          evaluation::LabelHistogram(s.name, m, values, bins)));
    }
  }
  return out;
}

fewshot::ShotPlan ShotPlanFromJson(const json& j) {
  fewshot::ShotPlan plan;
  plan.metric = MetricFromKey(j.at("metric").get<std::string>());
  plan.k = j.at("k").get<int>();
  plan.prompt_prefix = j.at("prompt_prefix").get<std::string>();
  for (const json& e : j.at("exemplars")) {
    plan.exemplars.push_back({e.at("text_id").get<std::string>(),
                              e.at("clean_text").get<std::string>(),
                              e.at("gold").get<double>(),
                              e.at("score").get<int>()});
  }
  return plan;
}

json ShotPlanToJson(const fewshot::ShotPlan& plan) {
  json ex = json::array();
  for (const auto& e : plan.exemplars) {
    ex.push_back({{"text_id", e.text_id},
                  {"clean_text", e.clean_text},
                  {"gold", e.gold},
                  {"score", e.score}});
  }
  return {{"metric", MetricKey(plan.metric)},
          {"k", plan.k},
          {"exemplars", ex},
          {"prompt_prefix", plan.prompt_prefix}};
}

std::unique_ptr<fewshot::EmbeddingProvider> MakeEmbedder(
    const PipelineConfig& c) {
  const auto& e = c.shots.embedding;
  if (e.provider == "http") {
    return std::make_unique<fewshot::HttpEmbeddingProvider>(
        fewshot::HttpEmbeddingOptions{e.url, e.model, ApiKey(), e.batch_size,
                                      e.parallelism});
  }
  return std::make_unique<fewshot::HashedBagOfWords>(e.dimension);
}

MetricFamily ParseFamily(const std::string& name) {
  if (name == "basic") return MetricFamily::kBasic;
  if (name == "dimensional") return MetricFamily::kDimensional;
  throw Error(ErrorCode::kConfigError,
              fmt::format("unknown metric family '{}'", name));
}

// ---- stages --------------------------------------------------------------

json Ingest(const PipelineConfig& c, const StageOptions&) {
  StageRecord rec(c, "ingest");
  const fs::path in = rec.Input(c.Resolve(c.paths.corpus), kExternal);
  std::vector<dataprep::TextRecord> records = dataprep::ReadCorpus(in);
  std::set<std::string> ids;
  for (const auto& r : records) {
    if (r.id.empty()) throw Error(ErrorCode::kParseError, "record without id");
    if (!ids.insert(r.id).second) {
      throw Error(ErrorCode::kParseError,
                  fmt::format("duplicate record id '{}'", r.id));
    }
  }
  std::map<std::string, std::size_t> per_platform;
  for (const auto& r : records) {
    ++per_platform[std::string(dataprep::PlatformName(r.platform))];
  }
  const fs::path out = EnsureParent(RawPath(c));
  dataprep::WriteCorpus(out, records);
  rec.Output(out);
  rec.Params() = {{"records", records.size()}, {"platforms", per_platform}};
  return rec.Finish();
}

json Clean(const PipelineConfig& c, const StageOptions&) {
  StageRecord rec(c, "clean");
  const auto raw = dataprep::ReadCorpus(rec.Input(RawPath(c), "ingest"));
  dataprep::CleaningOptions opts;
  opts.split_platforms.clear();
  for (const auto& p : c.cleaning.split_platforms) {
    opts.split_platforms.insert(dataprep::ParsePlatform(p));
  }
  opts.max_chars = c.cleaning.max_chars;
  dataprep::CleaningStats stats;
  const auto cleaned = dataprep::CleanCorpus(
      raw, dataprep::AcceptAllLanguages(), opts, &stats);
  const fs::path out = EnsureParent(CleanPath(c));
  dataprep::WriteCorpus(out, cleaned);
  rec.Output(out);
  rec.Params() = {{"input", stats.input},
                  {"after_split", stats.after_split},
                  {"dropped_empty", stats.dropped_empty},
                  {"dropped_language", stats.dropped_language},
                  {"dropped_length", stats.dropped_length},
                  {"output", stats.output},
                  {"max_chars", opts.max_chars}};
  return rec.Finish();
}

json ScoreLexicon(const PipelineConfig& c, const StageOptions&) {
  StageRecord rec(c, "score-lexicon");
  auto records = dataprep::ReadCorpus(rec.Input(CleanPath(c), "clean"));
  const auto lexicon =
      dataprep::Lexicon::Load(rec.Input(c.Resolve(c.paths.lexicon), kExternal));
  const auto stemmer = MakeStemmer(c);
  std::size_t positive = 0;
  for (auto& r : records) {
    r.weight = dataprep::LexiconScore(r, lexicon, *stemmer);
    if (*r.weight > 0) ++positive;
  }
  const fs::path out = EnsureParent(ScoredPath(c));
  dataprep::WriteCorpus(out, records);
  rec.Output(out);
  rec.Params() = {{"records", records.size()},
                  {"positive_weight", positive},
                  {"lexicon_entries", lexicon.size()},
                  {"stemmer", c.cleaning.stemmer}};
  return rec.Finish();
}

json Sample(const PipelineConfig& c, const StageOptions& o) {
  StageRecord rec(c, "sample");
  const std::uint64_t seed = o.seed.value_or(c.seeds.sample);
  rec.Seed(seed);
  const auto records =
      dataprep::ReadCorpus(rec.Input(ScoredPath(c), "score-lexicon"));
  std::vector<double> weights;
  weights.reserve(records.size());
  for (const auto& r : records) weights.push_back(r.weight.value_or(0.0));
  const auto drawn = dataprep::WeightedSample(
      weights, c.sampling.n_weighted, c.sampling.n_uniform, seed);
  std::vector<json> lines;
  auto emit = [&](const std::vector<std::size_t>& idx, const char* stratum) {
    for (std::size_t i : idx) {
      json j = dataprep::ToJson(records[i]);
      j["stratum"] = stratum;
      lines.push_back(std::move(j));
    }
  };
  emit(drawn.weighted, "weighted");
  emit(drawn.uniform, "uniform");
  const fs::path out = EnsureParent(SamplePath(c));
  WriteJsonLines(out, lines);
  rec.Output(out);
  rec.Params() = {{"pool", records.size()},
                  {"n_weighted", drawn.weighted.size()},
                  {"n_uniform", drawn.uniform.size()}};
  return rec.Finish();
}

json Plan(const PipelineConfig& c, const StageOptions& o) {
  StageRecord rec(c, "plan");
  const std::uint64_t seed = o.seed.value_or(c.seeds.plan);
  rec.Seed(seed);
  std::vector<std::string> ids;
  for (const auto& r : dataprep::ReadCorpus(rec.Input(SamplePath(c), "sample"))) {
    ids.push_back(r.id);
  }
  annostore::PlanOptions opts;
  opts.set_size = c.plan.set_size;
  opts.raters_per_set = c.plan.raters_per_set;
  opts.sets_per_week = c.plan.sets_per_week;
  opts.weeks = c.plan.weeks;
  const auto plan = annostore::BuildPlan(ids, c.plan.annotators, seed, opts);
  if (plan.sets.size() != c.plan.sets) {
    throw Error(ErrorCode::kConfigError,
                fmt::format("sample gives {} sets, config expects {}",
                            plan.sets.size(), c.plan.sets));
  }
  const fs::path out = EnsureParent(PlanPath(c));
  WriteJson(out, annostore::PlanToJson(plan));
  rec.Output(out);
  rec.Params() = {{"sets", plan.sets.size()},
                  {"annotators", plan.assignments.size()},
                  {"slots", plan.TotalSlots()}};
  return rec.Finish();
}

json SimulateRatingsStage(const PipelineConfig& c, const StageOptions& o) {
  StageRecord rec(c, "simulate-ratings");
  const std::uint64_t seed = o.seed.value_or(c.seeds.simulate);
  rec.Seed(seed);
  const auto plan =
      annostore::PlanFromJson(ReadJson(rec.Input(PlanPath(c), "plan")));
  const auto ratings = SimulateRatings(plan, c.simulate, seed);
  const fs::path out = EnsureParent(c.ExportPath());
  annostore::WriteExport(out, ratings);
  rec.Output(out);
  rec.Params() = {{"ratings", ratings.size()},
                  {"sigma_between", c.simulate.sigma_between},
                  {"sigma_within", c.simulate.sigma_within}};
  return rec.Finish();
}

json Serve(const PipelineConfig& c, const StageOptions& o) {
  StageRecord rec(c, "serve");
  const auto plan =
      annostore::PlanFromJson(ReadJson(rec.Input(PlanPath(c), "plan")));
  const auto texts = CleanTexts(rec.Input(SamplePath(c), "sample"));
  // Derive every token before touching the store so a missing secret leaves
  // no half-imported database behind.
  std::vector<std::pair<std::string, std::string>> tokens;
  for (const auto& [who, sets] : plan.assignments) {
    tokens.emplace_back(who, AnnotatorToken(who));
  }
  const fs::path store_path = EnsureParent(c.StorePath());
  annostore::AnnotationStore store(store_path.string());
  store.ImportPlan(plan, texts);
  for (const auto& [who, token] : tokens) store.RegisterAnnotator(who, token);
  rec.Output(store_path);
  const int port = o.port.value_or(c.server.port);
  rec.Params() = {{"sets", plan.sets.size()},
                  {"annotators", tokens.size()},
                  {"host", c.server.host},
                  {"port", port}};
  json manifest = rec.Finish();
  if (!o.keep_serving) return manifest;

  annostore::ServerOptions server_opts;
  server_opts.host = c.server.host;
  server_opts.port = port;
  if (c.server.static_dir) server_opts.static_dir = c.Resolve(*c.server.static_dir);
  if (c.server.instructions) {
    server_opts.instructions = c.Resolve(*c.server.instructions);
  }
  annostore::AnnotationServer server(store, server_opts);
  const int bound = server.Start();
  if (o.on_listening) o.on_listening(bound);
  while (o.keep_serving()) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  server.Stop();
  return manifest;
}

json ExportStage(const PipelineConfig& c, const StageOptions&) {
  StageRecord rec(c, "export");
  const fs::path store_path = rec.Input(c.StorePath(), "serve");
  annostore::AnnotationStore store(store_path.string());
  const fs::path out = EnsureParent(c.ExportPath());
  store.Export(out);
  rec.Output(out);
  rec.Params() = {
      {"final", store.CountRatings(annostore::RatingStatus::kFinal)},
      {"draft", store.CountRatings(annostore::RatingStatus::kDraft)}};
  return rec.Finish();
}

json Agree(const PipelineConfig& c, const StageOptions&) {
  StageRecord rec(c, "agree");
  const auto finals =
      annostore::ReadExport(rec.Input(c.ExportPath(), ExportProducer()));
  const auto report = reliability::ComputeAgreement(
      annostore::CanonicalByText(finals), c.plan.raters_per_set);
  const fs::path json_out = EnsureParent(c.Artifact("agreement.json"));
  const fs::path csv_out = c.Artifact("agreement.csv");
  const fs::path txt_out = c.Artifact("agreement.txt");
  WriteJson(json_out, reliability::AgreementToJson(report));
  WriteFile(csv_out, reliability::RenderAgreementCsv(report));
  WriteFile(txt_out, reliability::RenderAgreementTable(report));
  rec.Output(json_out);
  rec.Output(csv_out);
  rec.Output(txt_out);
  rec.Params() = {{"raters", report.raters},
                  {"texts_used", report.texts_used},
                  {"texts_excluded", report.texts_excluded}};
  return rec.Finish();
}

std::vector<dataprep::LabeledText> LabeledFromExport(const fs::path& path) {
  std::vector<dataprep::LabeledText> out;
  for (const auto& [id, agg] :
       annostore::AggregateAll(annostore::ReadExport(path))) {
    out.push_back({id, agg.mean});
  }
  return out;
}

json Split(const PipelineConfig& c, const StageOptions& o) {
  StageRecord rec(c, "split");
  const std::uint64_t seed = o.seed.value_or(c.seeds.split);
  rec.Seed(seed);
  const auto labeled =
      LabeledFromExport(rec.Input(c.ExportPath(), ExportProducer()));
  dataprep::ZscoreSplitOptions opts;
  opts.test_frac = c.split.test_frac;
  opts.val_frac = c.split.val_frac;
  opts.include_dimensions = c.split.include_dimensions;
  const auto splits = dataprep::ZscoreTestSplit(labeled, opts, seed);
  const fs::path out = EnsureParent(SplitsPath(c));
  dataprep::WriteSplits(out, splits);
  rec.Output(out);
  std::map<std::string, std::size_t> counts;
  for (const auto& a : splits) {
    ++counts[std::string(dataprep::PartitionName(a.partition))];
  }
  rec.Params() = {{"texts", splits.size()}, {"partitions", counts}};
  return rec.Finish();
}

json Kfold(const PipelineConfig& c, const StageOptions& o) {
  StageRecord rec(c, "kfold");
  const std::uint64_t seed = o.seed.value_or(c.seeds.kfold);
  rec.Seed(seed);
  std::vector<std::string> ids;
  for (const auto& l :
       LabeledFromExport(rec.Input(c.ExportPath(), ExportProducer()))) {
    ids.push_back(l.text_id);
  }
  dataprep::KfoldOptions opts{c.kfold.k, c.kfold.train_ratio,
                              c.kfold.val_ratio};
  std::vector<dataprep::SplitAssignment> flat;
  for (auto& fold : dataprep::KfoldSplit(ids, opts, seed)) {
    flat.insert(flat.end(), fold.begin(), fold.end());
  }
  const fs::path out = EnsureParent(c.Artifact("kfold.csv"));
  dataprep::WriteSplits(out, flat);
  rec.Output(out);
  rec.Params() = {{"texts", ids.size()}, {"k", c.kfold.k}};
  return rec.Finish();
}

json Shots(const PipelineConfig& c, const StageOptions&) {
  StageRecord rec(c, "shots");
  const auto labeled =
      LabeledFromExport(rec.Input(c.ExportPath(), ExportProducer()));
  std::set<std::string> train;
  for (const auto& a : dataprep::ReadSplits(rec.Input(SplitsPath(c), "split"))) {
    if (a.partition == dataprep::Partition::kTrain) train.insert(a.text_id);
  }
  const auto texts = CleanTexts(rec.Input(SamplePath(c), "sample"));

  std::vector<std::string> ids;
  std::vector<std::string> bodies;
  std::vector<MetricArray> gold;
  for (const auto& l : labeled) {
    if (!train.count(l.text_id)) continue;
    const auto it = texts.find(l.text_id);
    if (it == texts.end()) {
      throw Error(ErrorCode::kMissingUpstream,
                  fmt::format("rated text '{}' is not in the sample",
                              l.text_id));
    }
    ids.push_back(l.text_id);
    bodies.push_back(it->second);
    gold.push_back(l.labels);
  }
  auto embedder = MakeEmbedder(c);
  const auto embedded = fewshot::EmbedBatch(ids, bodies, *embedder);
  std::vector<fewshot::Candidate> pool;
  pool.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    pool.push_back({ids[i], bodies[i], embedded[i].centroid_dist, gold[i]});
  }
  const auto templates = fewshot::PromptTemplates::LoadDefault();
  json plans = json::array();
  const int max_k = std::min<int>(fewshot::kMaxShots,
                                  static_cast<int>(pool.size()));
  for (int k = 0; k <= max_k; ++k) {
    for (Metric m : kAllMetrics) {
      auto plan = fewshot::SelectExemplars(pool, m, k);
      fewshot::AttachPrefix(templates, plan);
      plans.push_back(ShotPlanToJson(plan));
    }
  }
  const fs::path out = EnsureParent(ShotsPath(c));
  const auto& e = c.shots.embedding;
  WriteJson(out, {{"embedding",
                   {{"provider", e.provider},
                    {"model", e.provider == "http" ? e.model : ""},
                    {"dimension", e.provider == "local" ? e.dimension : 0}}},
                  {"pool", pool.size()},
                  {"max_k", max_k},
                  {"plans", plans}});
  rec.Output(out);
  rec.Params() = {{"pool", pool.size()}, {"max_k", max_k}};
  return rec.Finish();
}

json AnnotateLlm(const PipelineConfig& c, const StageOptions& o) {
  const std::string run_id = o.run_id.value_or(c.llm.run_id);
  if (run_id.empty() || run_id.find_first_of("/\\") != std::string::npos) {
    throw Error(ErrorCode::kConfigError, "run id must be a plain name");
  }
  StageRecord rec(c, "annotate-llm", run_id);
  const int k_basic = o.shots_basic.value_or(c.shots.basic);
  const int k_dim = o.shots_dimensional.value_or(c.shots.dimensional);
  for (int k : {k_basic, k_dim}) {
    if (k < 0 || k > fewshot::kMaxShots) {
      throw Error(ErrorCode::kConfigError, "shot counts must be in 0..5");
    }
  }
  const json shots = ReadJson(rec.Input(ShotsPath(c), "shots"));
  std::map<std::pair<Metric, int>, fewshot::ShotPlan> plans;
  for (const json& p : shots.at("plans")) {
    auto plan = ShotPlanFromJson(p);
    plans[{plan.metric, plan.k}] = std::move(plan);
  }
  const auto ids = PartitionIds(c, rec.Input(SplitsPath(c), "split"));
  const auto texts = CleanTexts(rec.Input(SamplePath(c), "sample"));
  const auto templates = fewshot::PromptTemplates::LoadDefault();

  std::vector<llmrun::LlmTask> tasks;
  for (Metric m : kAllMetrics) {
    const int k = FamilyOf(m) == MetricFamily::kBasic ? k_basic : k_dim;
    const auto it = plans.find({m, k});
    if (it == plans.end()) {
      throw Error(ErrorCode::kMissingUpstream,
                  fmt::format("shots.json has no {}-shot plan for {}", k,
                              MetricKey(m)));
    }
    for (const std::string& id : ids) {
      const auto t = texts.find(id);
      if (t == texts.end()) {
        throw Error(ErrorCode::kMissingUpstream,
                    fmt::format("text '{}' is not in the sample", id));
      }
      tasks.push_back({m, id, templates.Render(it->second, t->second)});
    }
  }

  std::unique_ptr<llmrun::StubChatServer> stub;
  std::string url = c.llm.url;
  if (c.llm.provider == "stub") {
    llmrun::StubOptions so;
    so.mode = llmrun::ParseStubMode(c.llm.stub_mode);
    stub = std::make_unique<llmrun::StubChatServer>(so);
    stub->Start();
    url = stub->ChatUrl();
  }
  llmrun::HttpChatClient client({url, ApiKey()});

  llmrun::RunOptions ro;
  ro.run_id = run_id;
  ro.runs_dir = c.RunsDir();
  ro.model = o.model.value_or(c.llm.model);
  ro.temperature = c.llm.temperature;
  ro.retry.max_attempts = c.llm.max_attempts;
  ro.retry.base_delay = std::chrono::milliseconds(c.llm.base_delay_ms);
  ro.parallelism = c.llm.parallelism;
  ro.requests_per_minute = c.llm.requests_per_minute;
  ro.shots_basic = k_basic;
  ro.shots_dimensional = k_dim;
  ro.resume = o.resume.value_or(true);
  ro.query_budget = c.llm.query_budget;
  if (!c.prices.empty()) ro.prices = c.prices;
  const auto result = llmrun::RunAnnotation(tasks, client, ro);
  if (stub) stub->Stop();

  const fs::path dir = llmrun::RunDir(ro);
  const fs::path csv_out = dir / "outcomes.csv";
  llmrun::WriteOutcomesCsv(csv_out, run_id, result.outcomes);
  rec.Output(dir / "outcomes.jsonl");
  rec.Output(csv_out);
  rec.Attach(dir / "manifest.json");
  rec.Params() = {{"model", ro.model},
                  {"shots_basic", k_basic},
                  {"shots_dimensional", k_dim},
                  {"texts", ids.size()},
                  {"tasks", tasks.size()},
                  {"queried", result.queried},
                  {"reused", result.reused},
                  {"complete", result.complete}};
  return rec.Finish();
}

std::vector<evaluation::PredictionSet> LoadSources(
    const PipelineConfig& c, const StageOptions& o, StageRecord& rec,
    bool include_config_predictions) {
  std::vector<std::string> runs = o.runs;
  if (runs.empty() && o.predictions.empty()) runs.push_back(c.llm.run_id);
  std::vector<evaluation::PredictionSet> sources;
  for (const std::string& run_id : runs) {
    const auto outcomes =
        llmrun::LoadOutcomes(rec.Input(OutcomesPath(c, run_id), "annotate-llm"));
    sources.push_back(
        evaluation::PredictionsFromOutcomes(outcomes, run_id, run_id));
  }
  std::vector<ExternalPredictions> external = o.predictions;
  if (include_config_predictions) {
    external.insert(external.end(), c.eval.predictions.begin(),
                    c.eval.predictions.end());
  }
  for (const auto& p : external) {
    sources.push_back(evaluation::ReadPredictions(
        rec.Input(c.Resolve(p.path), kExternal), p.name));
  }
  std::set<std::string> names;
  for (const auto& s : sources) {
    if (!names.insert(s.name).second) {
      throw Error(ErrorCode::kConfigError,
                  fmt::format("source name '{}' given twice", s.name));
    }
  }
  return sources;
}

fs::path ReferencePath(const PipelineConfig& c, const StageOptions& o) {
  return o.reference ? c.Resolve(*o.reference) : c.ExportPath();
}

json Eval(const PipelineConfig& c, const StageOptions& o) {
  StageRecord rec(c, "eval");
  const fs::path ref_path = rec.Input(ReferencePath(c, o), ExportProducer());
  const auto keep = PartitionIds(c, rec.Input(SplitsPath(c), "split"));
  auto sources = LoadSources(c, o, rec, true);
  const Reference ref = LoadReference(ref_path, keep);

  const fs::path dir = c.Artifact("eval");
  fs::create_directories(dir);
  json summary = json::array();
  for (const auto& s : sources) {
    const auto report = evaluation::Evaluate(ref.means, s, ref.profile);
    const fs::path j = dir / (s.name + ".json");
    const fs::path t = dir / (s.name + ".txt");
    json rj = evaluation::EvalReportToJson(report);
    rj["kind"] = evaluation::SourceKindName(s.kind);
    WriteJson(j, rj);
    WriteFile(t, evaluation::RenderMainTable(report));
    rec.Output(j);
    rec.Output(t);
    summary.push_back({{"source", s.name},
                       {"kind", evaluation::SourceKindName(s.kind)}});
  }
  const auto table = evaluation::BuildComparison(sources, ref.means,
                                                 ref.profile,
                                                 c.eval.min_coverage);
  const fs::path ct = dir / "comparison.txt";
  const fs::path cc = dir / "comparison.csv";
  const fs::path cj = dir / "comparison.json";
  WriteFile(ct, evaluation::RenderComparisonTable(table));
  WriteFile(cc, evaluation::ComparisonToCsv(table));
  WriteJson(cj, evaluation::ComparisonToJson(table));
  const fs::path hj = dir / "histograms.json";
  WriteJson(hj, HistogramsJson(ref.finals, sources, c.eval.histogram_bins,
                               c.eval.legacy_histogram_scaling));
  for (const auto& p : {ct, cc, cj, hj}) rec.Output(p);
  rec.Params() = {{"sources", summary},
                  {"reference_texts", ref.means.size()},
                  {"partition", c.llm.partition}};
  return rec.Finish();
}

json HistogramStage(const PipelineConfig& c, const StageOptions& o) {
  StageRecord rec(c, "histogram");
  const fs::path ref_path = rec.Input(ReferencePath(c, o), ExportProducer());
  const auto finals = annostore::ReadExport(ref_path);
  std::vector<evaluation::PredictionSet> sources;
  if (!o.runs.empty() || !o.predictions.empty() ||
      fs::exists(OutcomesPath(c, c.llm.run_id))) {
    sources = LoadSources(c, o, rec, false);
  }
  const fs::path out = EnsureParent(c.Artifact("histograms.json"));
  WriteJson(out, HistogramsJson(finals, sources, c.eval.histogram_bins,
                                c.eval.legacy_histogram_scaling));
  rec.Output(out);
  rec.Params() = {{"ratings", finals.size()},
                  {"sources", sources.size()},
                  {"legacy_scaling", c.eval.legacy_histogram_scaling}};
  return rec.Finish();
}

json SweepReportStage(const PipelineConfig& c, const StageOptions& o) {
  StageRecord rec(c, "sweep-report");
  const std::string family_name = o.family.value_or(c.sweep.family);
  const MetricFamily family = ParseFamily(family_name);
  const auto runs = o.sweep_runs.empty() ? c.sweep.runs : o.sweep_runs;
  if (runs.empty()) {
    throw Error(ErrorCode::kConfigError,
                "sweep-report needs shot-count to run-id pairs");
  }
  const fs::path ref_path = rec.Input(ReferencePath(c, o), ExportProducer());
  const auto keep = PartitionIds(c, rec.Input(SplitsPath(c), "split"));
  const Reference ref = LoadReference(ref_path, keep);
  std::map<int, std::vector<llmrun::LlmOutcome>> by_k;
  std::vector<int> expected;
  for (const auto& [k, run_id] : runs) {
    by_k[k] = llmrun::LoadOutcomes(
        rec.Input(OutcomesPath(c, run_id), "annotate-llm"));
    expected.push_back(k);
  }
  const auto report =
      evaluation::ShotSweepReport(by_k, ref.means, family, expected);
  const fs::path dir = c.Artifact("sweep");
  fs::create_directories(dir);
  const fs::path t = dir / (family_name + ".txt");
  const fs::path j = dir / (family_name + ".json");
  WriteFile(t, evaluation::RenderSweepTable(report));
  WriteJson(j, evaluation::SweepReportToJson(report));
  rec.Output(t);
  rec.Output(j);
  rec.Params() = {{"family", family_name}, {"selected_k", report.selected_k}};
  return rec.Finish();
}

// Per-fold correlations: header "fold" plus any metric keys.
std::map<Metric, std::vector<double>> ReadFoldFile(const fs::path& path) {
  const csv::Table table = csv::Read(path);
  std::map<Metric, std::vector<double>> out;
  for (std::size_t col = 0; col < table.header.size(); ++col) {
    const std::string& name = table.header[col];
    if (name == "fold") continue;
    const Metric m = MetricFromKey(name);
    auto& values = out[m];
    for (const auto& row : table.rows) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(row.at(col), &used));
        if (used != row.at(col).size()) throw std::invalid_argument(name);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kParseError,
                    fmt::format("bad correlation in column '{}'", name));
      }
    }
  }
  if (out.empty()) {
    throw Error(ErrorCode::kParseError, "fold file has no metric columns");
  }
  return out;
}

json FoldReportStage(const PipelineConfig& c, const StageOptions& o) {
  StageRecord rec(c, "fold-report");
  std::optional<fs::path> folds = o.folds;
  if (!folds) folds = c.fold_report.folds;
  if (!folds) {
    throw Error(ErrorCode::kConfigError,
                "fold-report needs a per-fold correlation file");
  }
  const auto fold_r = ReadFoldFile(rec.Input(c.Resolve(*folds), kExternal));
  const auto method = c.fold_report.ci == "fisher_z"
                          ? evaluation::FoldCiMethod::kFisherZ
                          : evaluation::FoldCiMethod::kTRaw;
  const auto summaries =
      evaluation::FoldAggregate(fold_r, c.fold_report.k, method);
  const fs::path dir = c.Artifact("folds");
  fs::create_directories(dir);
  const fs::path t = dir / "summary.txt";
  const fs::path j = dir / "summary.json";
  WriteFile(t, evaluation::RenderFoldTable(summaries));
  WriteJson(j, evaluation::FoldSummaryToJson(summaries));
  rec.Output(t);
  rec.Output(j);
  rec.Params() = {{"k", c.fold_report.k}, {"ci", c.fold_report.ci}};
  return rec.Finish();
}

using StageFn = json (*)(const PipelineConfig&, const StageOptions&);

const std::vector<std::pair<std::string, StageFn>>& Registry() {
  static const std::vector<std::pair<std::string, StageFn>> kStages = {
      {"ingest", Ingest},
      {"clean", Clean},
      {"score-lexicon", ScoreLexicon},
      {"sample", Sample},
      {"plan", Plan},
      {"serve", Serve},
      {"simulate-ratings", SimulateRatingsStage},
      {"export", ExportStage},
      {"agree", Agree},
      {"split", Split},
      {"kfold", Kfold},
      {"shots", Shots},
      {"annotate-llm", AnnotateLlm},
      {"eval", Eval},
      {"histogram", HistogramStage},
      {"sweep-report", SweepReportStage},
      {"fold-report", FoldReportStage},
  };
  return kStages;
}

}  // namespace

const std::vector<std::string>& StageNames() {
  static const std::vector<std::string> kNames = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : Registry()) out.push_back(name);
    return out;
  }();
  return kNames;
}

bool IsStage(const std::string& name) {
  const auto& names = StageNames();
  return std::find(names.begin(), names.end(), name) != names.end();
}

const std::vector<std::string>& OfflineChain() {
  static const std::vector<std::string> kChain = {
      "ingest", "clean", "score-lexicon", "sample",     "plan",
      "simulate-ratings", "agree", "split", "kfold",    "shots",
      "annotate-llm", "eval", "histogram"};
  return kChain;
}

fs::path ManifestPath(const PipelineConfig& config, const std::string& stage,
                      const std::string& run_id) {
  const std::string name =
      run_id.empty() ? stage + ".json" : stage + "." + run_id + ".json";
  return config.ManifestDir() / name;
}

std::vector<json> LoadManifests(const PipelineConfig& config) {
  std::vector<json> out;
  const fs::path dir = config.ManifestDir();
  if (!fs::is_directory(dir)) return out;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) out.push_back(ReadJson(f));
  return out;
}

json RunStage(const std::string& stage, const PipelineConfig& config,
              const StageOptions& options) {
  for (const auto& [name, fn] : Registry()) {
    if (name == stage) {
      ValidateConfig(config);
      fs::create_directories(config.ManifestDir());
      return fn(config, options);
    }
  }
  throw Error(ErrorCode::kConfigError, fmt::format("unknown stage '{}'", stage));
}

json RunAll(const PipelineConfig& config, const StageOptions& options) {
  StageOptions per_stage = options;
  per_stage.seed.reset();
  json out = json::array();
  for (const std::string& stage : OfflineChain()) {
    out.push_back(RunStage(stage, config, per_stage));
  }
  return out;
}

}  // namespace emoint::pipeline
