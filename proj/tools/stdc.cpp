/**
 * Copyright 2026 The STDC Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
// Command-line front end: stdc synth|extract|train|score|eval.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "stdc/stdc.hpp"

namespace {

using namespace stdc;

struct Args {
  std::string manifest;
  std::string config;
  std::string kind = "stdc";
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string subset = "eval";
  std::size_t count = 400;
  double duration = 1.5;
};

PipelineConfig config_from(const Args& a) {
  PipelineConfig cfg = a.config.empty() ? PipelineConfig{} : load_config(a.config);
  if (a.seed) cfg.seed = *a.seed;
  validate(cfg);
  return cfg;
}

FeatureKind kind_from(const std::string& s) {
  if (s == "sdc") return FeatureKind::kSdc;
  if (s == "stc") return FeatureKind::kStc;
  if (s == "stdc") return FeatureKind::kStdc;
  throw Error(ErrorCode::kInvalidArgument, "unknown kind '" + s + "'");
}

fs::path manifest_base(const std::string& manifest) {
  return fs::path(manifest).parent_path();
}

int run_synth(const Args& a) {
  SynthOptions opt;
  opt.count = a.count;
  opt.duration = a.duration;
  if (a.seed) opt.seed = *a.seed;
  const auto entries = write_synthetic_corpus(a.out, opt);
  std::cout << "wrote " << entries.size() << " utterances to " << a.out << "\n";
  return 0;
}

int run_extract(const Args& a) {
  const auto cfg = config_from(a);
  const auto entries = read_manifest(a.manifest);
  const auto set = extract_features(entries, manifest_base(a.manifest), cfg, kind_from(a.kind));
  write_features(a.out, set);
  std::cout << "wrote " << set.count() << " " << to_string(set.kind) << " vectors to " << a.out << "\n";
  return 0;
}

int run_train(const Args& a) {
  auto cfg = config_from(a);
  if (!a.out.empty()) cfg.model_dir = a.out;
  const auto entries = read_manifest(a.manifest);
  const auto summary = train_models(entries, manifest_base(a.manifest), cfg, &std::cout);
  char line[160];
  std::snprintf(line, sizeof line, "train accuracy: stdc %.4f, sdc %.4f", summary.stdc_train_accuracy,
                summary.sdc_train_accuracy);
  std::cout << line << "\nmodels written to " << cfg.model_dir.string() << "\n";
  return 0;
}

int run_score(const Args& a) {
  const auto cfg = config_from(a);
  const auto subset = parse_subset(a.subset);
  if (!subset) throw Error(ErrorCode::kInvalidArgument, "unknown subset '" + a.subset + "'");
  std::vector<ManifestEntry> part;
  for (const auto& e : read_manifest(a.manifest))
    if (e.subset == *subset) part.push_back(e);
  const auto records = score_entries(part, manifest_base(a.manifest), cfg, kind_from(a.kind));
  write_scores(a.out, records);
  std::cout << "wrote " << records.size() << " scores to " << a.out << "\n";
  return 0;
}

int run_eval(const Args& a) {
  const auto cfg = config_from(a);
  const auto results = evaluate(read_manifest(a.manifest), manifest_base(a.manifest), cfg,
                                kind_from(a.kind), a.out);
  for (const auto& r : results) {
    char line[160];
    std::snprintf(line, sizeof line, "%s: EER %.4f, accuracy %.4f (%zu bona fide, %zu spoof)",
                  std::string(to_string(r.subset)).c_str(), r.report.eer, r.report.accuracy,
                  r.report.bona_fide_count, r.report.spoof_count);
    std::cout << line << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectra-temporal deviated coefficient pipeline"};
  app.require_subcommand(1);
  Args a;

  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus and manifest");
  synth->add_option("--out", a.out, "output directory")->required();
  synth->add_option("--seed", a.seed, "corpus seed");
  synth->add_option("--count", a.count, "number of utterances")->check(CLI::PositiveNumber);
  synth->add_option("--duration", a.duration, "seconds per utterance")->check(CLI::PositiveNumber);

  const auto common = [&](CLI::App* cmd, bool with_kind) {
    cmd->add_option("--manifest", a.manifest, "manifest CSV")->required()->check(CLI::ExistingFile);
    cmd->add_option("--config", a.config, "key = value config file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", a.seed, "overrides the config seed");
    if (with_kind)
      cmd->add_option("--kind", a.kind, "sdc, stc or stdc")
          ->check(CLI::IsMember({"sdc", "stc", "stdc"}));
  };
  auto* extract = app.add_subcommand("extract", "write a feature file");
  common(extract, true);
  extract->add_option("--out", a.out, "feature file")->required();
  auto* train = app.add_subcommand("train", "train all models");
  common(train, false);
  train->add_option("--out", a.out, "model directory (overrides model_dir)");
  auto* score = app.add_subcommand("score", "score one subset");
  common(score, true);
  score->add_option("--out", a.out, "score CSV")->required();
  score->add_option("--subset", a.subset, "train, dev or eval");
  auto* eval = app.add_subcommand("eval", "score dev and eval, write reports");
  common(eval, true);
  eval->add_option("--out", a.out, "report directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "InvalidArgument: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*synth) return run_synth(a);
    if (*extract) return run_extract(a);
    if (*train) return run_train(a);
    if (*score) return run_score(a);
    if (*eval) return run_eval(a);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "IoFailure: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
