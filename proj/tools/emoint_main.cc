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

// Command-line entry point for the pipeline.

#include <atomic>
#include <csignal>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "emoint/common/csv.h"
#include "emoint/common/error.h"
#include "emoint/common/files.h"
#include "emoint/dataprep/text_record.h"
#include "emoint/pipeline/config.h"
#include "emoint/pipeline/stages.h"
#include "emoint/pipeline/synthetic.h"

namespace {

using nlohmann::json;
namespace pl = emoint::pipeline;

std::atomic<bool> g_stop{false};

void HandleSignal(int) { g_stop = true; }

int ExitCodeFor(emoint::ErrorCode code) {
  switch (code) {
    case emoint::ErrorCode::kConfigError:
      return 2;
    case emoint::ErrorCode::kMissingUpstream:
      return 3;
    default:
      return 1;
  }
}

void PrintError(const std::string& code, const std::string& message,
                const std::string& stage) {
  json err = {{"error", code}, {"message", message}};
  if (!stage.empty()) err["stage"] = stage;
  std::cerr << err.dump() << "\n";
}

// "name=path" or a bare path named after its stem.
pl::ExternalPredictions ParsePrediction(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos) {
    return {std::filesystem::path(arg).stem().string(), arg};
  }
  return {arg.substr(0, eq), arg.substr(eq + 1)};
}

std::map<int, std::string> ParseSweepRuns(const std::vector<std::string>& args) {
  std::map<int, std::string> out;
  for (const std::string& a : args) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == a.size()) {
      throw emoint::Error(emoint::ErrorCode::kConfigError,
                          "--run expects K=RUN_ID, got '" + a + "'");
    }
    int k = 0;
    try {
      k = std::stoi(a.substr(0, eq));
    } catch (const std::exception&) {
      throw emoint::Error(emoint::ErrorCode::kConfigError,
                          "bad shot count in '" + a + "'");
    }
    out[k] = a.substr(eq + 1);
  }
  return out;
}

struct Cli {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  // annotate-llm
  std::optional<std::string> run_id;
  std::optional<std::string> model;
  std::optional<int> shots_basic;
  std::optional<int> shots_dim;
  bool resume = false;
  bool no_resume = false;
  // eval, histogram, sweep
  std::optional<std::string> reference;
  std::vector<std::string> predictions;
  std::vector<std::string> runs;
  std::optional<std::string> family;
  std::optional<std::string> folds;
  std::optional<int> port;
  // run
  std::string stage;
  // token
  std::string annotator;
  // synthesize
  std::size_t synth_n = 500;
  std::uint64_t synth_seed = 0;
  std::string synth_corpus;
  std::string synth_lexicon;
};

pl::StageOptions ToStageOptions(const Cli& cli, const std::string& stage) {
  pl::StageOptions o;
  o.seed = cli.seed;
  o.run_id = cli.run_id;
  o.model = cli.model;
  o.shots_basic = cli.shots_basic;
  o.shots_dimensional = cli.shots_dim;
  if (cli.no_resume) o.resume = false;
  if (cli.resume) o.resume = true;
  if (cli.reference) o.reference = *cli.reference;
  for (const auto& p : cli.predictions) o.predictions.push_back(ParsePrediction(p));
  if (stage == "sweep-report") {
    o.sweep_runs = ParseSweepRuns(cli.runs);
  } else {
    o.runs = cli.runs;
  }
  o.family = cli.family;
  if (cli.folds) o.folds = *cli.folds;
  o.port = cli.port;
  if (stage == "serve") {
    o.keep_serving = [] { return !g_stop.load(); };
    o.on_listening = [](int port) {
      std::cerr << json{{"listening", port}}.dump() << "\n";
    };
  }
  return o;
}

void AddStageFlags(CLI::App* sub, Cli& cli, const std::string& stage) {
  if (stage == "annotate-llm") {
    sub->add_option("--model", cli.model, "Model id sent to the chat endpoint");
    sub->add_option("--shots-basic", cli.shots_basic,
                    "Exemplars for the six basic emotions")
        ->check(CLI::Range(0, 5));
    sub->add_option("--shots-dim", cli.shots_dim,
                    "Exemplars for valence and arousal")
        ->check(CLI::Range(0, 5));
    sub->add_option("--run-id", cli.run_id, "Run directory name");
    auto* r = sub->add_flag("--resume", cli.resume,
                            "Reuse settled outcomes (default)");
    sub->add_flag("--no-resume", cli.no_resume, "Start the run log afresh")
        ->excludes(r);
  }
  if (stage == "eval" || stage == "histogram" || stage == "sweep-report") {
    sub->add_option("--reference", cli.reference,
                    "Ratings export used as ground truth");
  }
  if (stage == "eval" || stage == "histogram") {
    sub->add_option("--predictions", cli.predictions,
                    "External predictions file, NAME=PATH or PATH");
    sub->add_option("--run", cli.runs, "LLM run id (repeatable)");
  }
  if (stage == "sweep-report") {
    sub->add_option("--family", cli.family, "basic or dimensional");
    sub->add_option("--run", cli.runs, "K=RUN_ID per shot count (repeatable)");
  }
  if (stage == "fold-report") {
    sub->add_option("--folds", cli.folds,
                    "CSV with a fold column and one column per metric");
  }
  if (stage == "serve") {
    sub->add_option("--port", cli.port, "Listen port; 0 picks a free one");
  }
}

int Run(int argc, char** argv) {
  CLI::App app{"Emotion-intensity dataset and LLM evaluation pipeline",
               "emoint"};
  app.require_subcommand(1);
  app.fallthrough();
  Cli cli;
  app.add_option("--config", cli.config_path, "Pipeline config file")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", cli.seed, "Override the stage seed");

  std::map<CLI::App*, std::string> stage_of;
  for (const std::string& stage : pl::StageNames()) {
    CLI::App* sub = app.add_subcommand(stage, "Run the " + stage + " stage");
    AddStageFlags(sub, cli, stage);
    stage_of[sub] = stage;
  }
  CLI::App* run = app.add_subcommand("run", "Run one stage by name, or all");
  run->add_option("--stage", cli.stage, "Stage name or 'all'")->required();
  AddStageFlags(run, cli, "annotate-llm");
  CLI::App* validate =
      app.add_subcommand("validate", "Check the config without side effects");
  CLI::App* token = app.add_subcommand(
      "token", "Print an annotator's login token (needs EMOINT_TOKEN_SECRET)");
  token->add_option("--annotator", cli.annotator, "Annotator id")->required();
  CLI::App* synth = app.add_subcommand(
      "synthesize", "Write a synthetic corpus and lexicon for offline runs");
  synth->add_option("--n", cli.synth_n, "Number of posts");
  synth->add_option("--seed", cli.synth_seed, "Generator seed")->required();
  synth->add_option("--corpus", cli.synth_corpus, "Output corpus JSONL")
      ->required();
  synth->add_option("--lexicon", cli.synth_lexicon, "Output lexicon CSV")
      ->required();

  std::string current_stage;
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    PrintError("UsageError", e.what(), "");
    return 2;
  }

  try {
    if (synth->parsed()) {
      std::vector<json> posts;
      for (const auto& r : pl::SyntheticCorpus(cli.synth_n, cli.synth_seed)) {
        posts.push_back({{"id", r.id},
                         {"platform", emoint::dataprep::PlatformName(r.platform)},
                         {"text", r.raw_text}});
      }
      emoint::WriteJsonLines(cli.synth_corpus, posts);
      emoint::csv::Table lex;
      lex.header = {"stem", "valence", "arousal", "dominance"};
      for (const auto& e : pl::SyntheticLexicon()) {
        lex.rows.push_back({e.stem, fmt::format("{}", e.valence),
                            fmt::format("{}", e.arousal),
                            fmt::format("{}", e.dominance)});
      }
      emoint::csv::Write(cli.synth_lexicon, lex);
      std::cout << json{{"corpus", cli.synth_corpus},
                        {"lexicon", cli.synth_lexicon},
                        {"records", cli.synth_n}}
                       .dump(2)
                << "\n";
      return 0;
    }
    if (token->parsed()) {
      std::cout << pl::AnnotatorToken(cli.annotator) << "\n";
      return 0;
    }
    if (cli.config_path.empty()) {
      PrintError("ConfigError", "--config is required", "");
      return 2;
    }
    const pl::PipelineConfig config = pl::LoadConfig(cli.config_path);
    if (validate->parsed()) {
      pl::ValidateConfig(config);
      std::cout << json{{"valid", true}, {"config", cli.config_path}}.dump(2)
                << "\n";
      return 0;
    }
    std::signal(SIGINT, HandleSignal);
    std::signal(SIGTERM, HandleSignal);
    if (run->parsed()) {
      current_stage = cli.stage;
      if (cli.stage == "all") {
        std::cout << pl::RunAll(config, ToStageOptions(cli, "all")).dump(2)
                  << "\n";
        return 0;
      }
      if (!pl::IsStage(cli.stage)) {
        throw emoint::Error(emoint::ErrorCode::kConfigError,
                            "unknown stage '" + cli.stage + "'");
      }
    } else {
      for (const auto& [sub, name] : stage_of) {
        if (sub->parsed()) current_stage = name;
      }
    }
    const json manifest = pl::RunStage(
        current_stage, config, ToStageOptions(cli, current_stage));
    std::cout << manifest.dump(2) << "\n";
    return 0;
  } catch (const emoint::Error& e) {
    PrintError(std::string(emoint::ErrorCodeName(e.code())), e.what(),
               current_stage);
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    PrintError("InternalError", e.what(), current_stage);
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) { return Run(argc, argv); }
