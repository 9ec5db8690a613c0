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
#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <set>

#include <sys/wait.h>

#include "stdc/pipeline.hpp"
#include "stdc/synth_corpus.hpp"
#include "test_util.hpp"

namespace stdc {
namespace {

using testing::expect_error;

SynthOptions small_corpus(std::size_t count, std::uint64_t seed = 5) {
  SynthOptions opt;
  opt.count = count;
  opt.seed = seed;
  opt.duration = 0.5;
  return opt;
}

PipelineConfig quick_config(const fs::path& model_dir) {
  PipelineConfig cfg;
  cfg.epochs = 2;
  cfg.model_dir = model_dir;
  return cfg;
}

std::vector<double> pcm16(const std::vector<double>& s, int rate) {
  return decode_wav(encode_wav({s}, rate, WavEncoding::kPcm16)).samples();
}

TEST(Synth, FixedSeedGivesIdenticalBytes) {
  testing::TempDir a("synth_a"), b("synth_b");
  write_synthetic_corpus(a.path(), small_corpus(12));
  write_synthetic_corpus(b.path(), small_corpus(12));
  for (const auto& entry : fs::directory_iterator(a.path()))
    EXPECT_EQ(read_file_bytes(entry.path()), read_file_bytes(b.path() / entry.path().filename()))
        << entry.path().filename();
}

TEST(Synth, HundredRowsBothClassesAndSplits) {
  testing::TempDir dir("synth_100");
  write_synthetic_corpus(dir.path(), small_corpus(100));
  const auto entries = read_manifest(dir / "manifest.csv");
  ASSERT_EQ(entries.size(), 100u);
  std::size_t counts[2][3] = {};
  std::set<std::string> styles;
  for (const auto& e : entries) {
    counts[class_index(e.label)][static_cast<int>(e.subset)]++;
    if (e.attack_tag) styles.insert(*e.attack_tag);
    EXPECT_TRUE(fs::exists(dir / e.path));
  }
  for (int c = 0; c < 2; ++c) {
    EXPECT_EQ(counts[c][static_cast<int>(Subset::kTrain)], 30u);
    EXPECT_EQ(counts[c][static_cast<int>(Subset::kDev)], 10u);
    EXPECT_EQ(counts[c][static_cast<int>(Subset::kEval)], 10u);
  }
  EXPECT_EQ(styles, (std::set<std::string>{"full", "partial", "replay"}));
}

TEST(Synth, PartialSpoofSubstitutesConfiguredFraction) {
  testing::TempDir dir("synth_partial");
  auto opt = small_corpus(36, 9);
  opt.duration = 1.0;
  write_synthetic_corpus(dir.path(), opt);
  std::size_t checked = 0;
  for (std::size_t i = 0; i < opt.count; ++i) {
    const auto plan = plan_utterance(opt, i);
    if (plan.style != SpoofStyle::kPartial) continue;
    ++checked;
    EXPECT_EQ(plan.splice_length, static_cast<std::size_t>(std::floor(0.4 * plan.length)));
    const auto decoded = load_wav(dir / utterance_file_name(i)).samples();
    const auto genuine = pcm16(render_genuine(plan), plan.sample_rate);
    ASSERT_EQ(decoded.size(), genuine.size());
    std::size_t inside_diff = 0;
    for (std::size_t n = 0; n < decoded.size(); ++n) {
      const bool inside = n >= plan.splice_start && n < plan.splice_start + plan.splice_length;
      if (!inside) {
        ASSERT_EQ(decoded[n], genuine[n]) << "utterance " << i << " sample " << n;
      } else if (decoded[n] != genuine[n]) {
        ++inside_diff;
      }
    }
    EXPECT_GT(inside_diff, plan.splice_length * 95 / 100);
    EXPECT_TRUE(plan.splice_start == 0 || plan.splice_start + plan.splice_length == plan.length);
  }
  EXPECT_EQ(checked, 6u);
}

TEST(Synth, InvalidOptions) {
  testing::TempDir dir("synth_bad");
  auto opt = small_corpus(1);
  expect_error(ErrorCode::kInvalidArgument, [&] { write_synthetic_corpus(dir.path(), opt); });
  opt.count = 4;
  opt.partial_fraction = 1.0;
  expect_error(ErrorCode::kInvalidArgument, [&] { write_synthetic_corpus(dir.path(), opt); });
}

TEST(ParallelFor, CoversAllAndRethrowsLowestIndex) {
  std::vector<std::atomic<int>> hits(50);
  parallel_for(50, 4, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  try {
    parallel_for(20, 3, [](std::size_t i) {
      if (i == 7 || i == 13) throw Error(ErrorCode::kIoFailure, "item " + std::to_string(i));
    });
    FAIL() << "expected a throw";
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.what()), "IoFailure: item 7");
  }
}

TEST(Extract, EmptyManifestGivesEmptyFile) {
  testing::TempDir dir("extract_empty");
  const auto set = extract_features({}, dir.path(), quick_config(dir / "models"), FeatureKind::kSdc);
  EXPECT_EQ(set.count(), 0u);
  write_features(dir / "f.sdcf", set);
  EXPECT_EQ(read_features(dir / "f.sdcf").count(), 0u);
}

TEST(Extract, SdcDeterministicAndCached) {
  testing::TempDir dir("extract_sdc");
  write_synthetic_corpus(dir / "corpus", small_corpus(8));
  const auto entries = read_manifest(dir / "corpus" / "manifest.csv");
  auto cfg = quick_config(dir / "models");
  cfg.workers = 3;
  const auto a = encode_features(extract_features(entries, dir / "corpus", cfg, FeatureKind::kSdc));
  cfg.workers = 1;
  const auto b = encode_features(extract_features(entries, dir / "corpus", cfg, FeatureKind::kSdc));
  EXPECT_EQ(a, b);

  cfg.cache_dir = dir / "cache";
  const auto cold = encode_features(extract_features(entries, dir / "corpus", cfg, FeatureKind::kSdc));
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(cfg.cache_dir)) ++files;
  EXPECT_EQ(files, 8u);
  const auto warm = encode_features(extract_features(entries, dir / "corpus", cfg, FeatureKind::kSdc));
  EXPECT_EQ(cold, a);
  EXPECT_EQ(warm, a);
  // A different spectral setting must not reuse those entries.
  cfg.hop = 256;
  extract_features(entries, dir / "corpus", cfg, FeatureKind::kSdc);
  files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(cfg.cache_dir)) ++files;
  EXPECT_EQ(files, 16u);
}

TEST(Extract, ModelKindsNeedTrainedModels) {
  testing::TempDir dir("extract_missing");
  write_synthetic_corpus(dir / "corpus", small_corpus(4));
  const auto entries = read_manifest(dir / "corpus" / "manifest.csv");
  const auto cfg = quick_config(dir / "models");
  expect_error(ErrorCode::kMissingModel,
               [&] { extract_features(entries, dir / "corpus", cfg, FeatureKind::kStc); });
  expect_error(ErrorCode::kMissingModel,
               [&] { extract_features(entries, dir / "corpus", cfg, FeatureKind::kStdc); });
  expect_error(ErrorCode::kMissingModel, [&] { score_entries(entries, dir / "corpus", cfg, FeatureKind::kSdc); });
}

TEST(Train, StagedArtifactsAndShapes) {
  testing::TempDir dir("train_small");
  write_synthetic_corpus(dir / "corpus", small_corpus(20));
  const auto entries = read_manifest(dir / "corpus" / "manifest.csv");
  const auto cfg = quick_config(dir / "models");
  const auto summary = train_models(entries, dir / "corpus", cfg);
  EXPECT_EQ(summary.bona_fide, 6u);
  EXPECT_EQ(summary.spoof, 6u);
  EXPECT_EQ(summary.augmented, 0u);
  EXPECT_EQ(summary.stc_epoch_loss.size(), 2u);
  EXPECT_EQ(summary.autoencoder_epoch_loss.size(), 3u);
  for (const char* f : {model_files::kStc, model_files::kNorm, model_files::kAutoencoder,
                        model_files::kHeadStdc, model_files::kHeadSdc})
    EXPECT_TRUE(fs::exists(cfg.model_dir / f)) << f;

  // Stage ordering: with stage-3 artifacts gone, STDC extraction refuses to run.
  for (auto kind : {FeatureKind::kSdc, FeatureKind::kStc, FeatureKind::kStdc}) {
    const auto set = extract_features(entries, dir / "corpus", cfg, kind);
    EXPECT_EQ(set.count(), 20u);
    EXPECT_EQ(set.dim(), 128u);
    for (double v : set.values.data()) EXPECT_TRUE(std::isfinite(v));
  }
  fs::remove(cfg.model_dir / model_files::kAutoencoder);
  expect_error(ErrorCode::kMissingModel,
               [&] { extract_features(entries, dir / "corpus", cfg, FeatureKind::kStdc); });
  EXPECT_EQ(extract_features(entries, dir / "corpus", cfg, FeatureKind::kStc).count(), 20u);
}

TEST(Train, SingleClassRejected) {
  testing::TempDir dir("train_single");
  write_synthetic_corpus(dir / "corpus", small_corpus(10));
  auto entries = read_manifest(dir / "corpus" / "manifest.csv");
  for (auto& e : entries)
    if (e.label == Label::kSpoof) e.subset = Subset::kEval;
  expect_error(ErrorCode::kSingleClassData,
               [&] { train_models(entries, dir / "corpus", quick_config(dir / "models")); });
}

TEST(Balance, MinorityClassAugmented) {
  std::vector<AudioBuffer> audio;
  std::vector<int> labels;
  for (int i = 0; i < 7; ++i) {
    audio.push_back(synth_two_tone(0.3, 0.2, 440.0 + i, 120.0, 0.2, 16000));
    labels.push_back(i < 2 ? 0 : 1);
  }
  EXPECT_EQ(balance_with_augmentation(audio, labels, 3), 3u);
  ASSERT_EQ(audio.size(), 10u);
  EXPECT_EQ(std::count(labels.begin(), labels.end(), 0), 5);
  for (const auto& a : audio) EXPECT_EQ(a.size(), audio[0].size());
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(STDC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

TEST(Cli, ExitCodes) {
  testing::TempDir dir("cli");
  const auto d = dir.path().string();
  EXPECT_EQ(run_cli("synth --out " + d + "/c --count 6 --duration 0.4 --seed 3"), 0);
  EXPECT_EQ(run_cli("extract --manifest " + d + "/c/manifest.csv --kind sdc --out " + d + "/f.sdcf"), 0);
  EXPECT_EQ(read_features(dir / "f.sdcf").count(), 6u);
  // Model kinds without models.
  EXPECT_EQ(run_cli("extract --manifest " + d + "/c/manifest.csv --kind stdc --out " + d + "/g.sdcf"), 1);
  EXPECT_EQ(run_cli("extract --manifest " + d + "/nope.csv --out " + d + "/g.sdcf"), 2);
  EXPECT_EQ(run_cli("extract --manifest " + d + "/c/manifest.csv --kind mfcc --out x"), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  std::ofstream(dir / "bad.cfg") << "n_fft = 1000\n";
  EXPECT_EQ(run_cli("extract --manifest " + d + "/c/manifest.csv --config " + d + "/bad.cfg --out x"), 1);
}

TEST(Cli, ErrorLineIsMachineParsable) {
  testing::TempDir dir("cli_err");
  const auto d = dir.path().string();
  ASSERT_EQ(run_cli("synth --out " + d + "/c --count 4 --duration 0.4"), 0);
  const std::string cmd = std::string(STDC_CLI_PATH) + " score --manifest " + d +
                          "/c/manifest.csv --kind stc --out " + d + "/s.csv 2> " + d + "/err.txt";
  EXPECT_NE(std::system(cmd.c_str()), 0);
  std::ifstream in(dir / "err.txt");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("MissingModel: ", 0), 0u) << line;
  EXPECT_FALSE(std::getline(in, line));
}

}  // namespace
}  // namespace stdc
