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
#pragma once

#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "stdc/augment.hpp"
#include "stdc/classifier.hpp"
#include "stdc/config.hpp"
#include "stdc/feature_file.hpp"
#include "stdc/fusion_stdc.hpp"
#include "stdc/ldp_sdc.hpp"
#include "stdc/melspec.hpp"
#include "stdc/metrics.hpp"
#include "stdc/model_io.hpp"
#include "stdc/temporal_stc.hpp"

namespace stdc {

namespace fs = std::filesystem;

/// Runs fn(i) for i in [0, n) on up to `workers` threads. If any call throws,
/// the exception from the lowest index is rethrown after all threads join.
inline void parallel_for(std::size_t n, std::size_t workers,
                         const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  workers = std::max<std::size_t>(1, std::min(workers, n));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Model files
// ---------------------------------------------------------------------------

namespace model_files {
inline constexpr const char* kStc = "stc.stdc";          // Bi-LSTM + its training head
inline constexpr const char* kNorm = "norm.stdc";
inline constexpr const char* kAutoencoder = "autoencoder.stdc";
inline constexpr const char* kHeadStdc = "head_stdc.stdc";
inline constexpr const char* kHeadSdc = "head_sdc.stdc";
}  // namespace model_files

/// Bi-LSTM and the head it was trained jointly with.
struct StcModel {
  BiLstmParams lstm;
  HeadParams head;

  template <typename F>
  void for_each_tensor(F&& f) {
    lstm.for_each_tensor(f);
    head.for_each_tensor(f);
  }
  template <typename F>
  void for_each_tensor(F&& f) const {
    lstm.for_each_tensor(f);
    head.for_each_tensor(f);
  }
};

/// Rebuilds a head from a tensor map, inferring the variant from its tensors.
inline HeadParams head_from_map(const TensorMap& map) {
  HeadParams p;
  const auto get = [&](const std::string& name) -> const Tensor2& {
    const auto it = map.find(name);
    require(it != map.end(), ErrorCode::kBadModelFile, "missing tensor '" + name + "'");
    return it->second;
  };
  p.variant = map.count("head.hidden.weight") ? HeadVariant::kMlp : HeadVariant::kLogistic;
  if (p.variant == HeadVariant::kMlp) {
    p.hidden_w = get("head.hidden.weight");
    p.hidden_b = get("head.hidden.bias");
  }
  p.out_w = get("head.out.weight");
  p.out_b = get("head.out.bias");
  require(p.out_w.rows() == 2 && p.out_b.rows() == 1 && p.out_b.cols() == 2,
          ErrorCode::kBadModelFile, "head output layer must have 2 classes");
  if (p.variant == HeadVariant::kMlp)
    require(p.hidden_b.cols() == p.hidden_w.rows() && p.out_w.cols() == p.hidden_w.rows(),
            ErrorCode::kBadModelFile, "inconsistent head shapes");
  return p;
}

inline StcModel load_stc_model(const fs::path& dir, const PipelineConfig& cfg) {
  const auto map = load_tensor_file(dir / model_files::kStc);
  StcModel m{BiLstmParams::init(cfg.n_mels, cfg.stc_hidden, 0), head_from_map(map)};
  assign_tensors(m.lstm, map);
  return m;
}

inline NormStats load_norm(const fs::path& dir) {
  const auto map = load_tensor_file(dir / model_files::kNorm);
  NormStats s = NormStats::shaped(kFusedDim);
  assign_tensors(s, map);
  return s;
}

inline AutoencoderParams load_autoencoder(const fs::path& dir) {
  const auto map = load_tensor_file(dir / model_files::kAutoencoder);
  AutoencoderParams p = AutoencoderParams::init(0);
  assign_tensors(p, map);
  return p;
}

inline HeadParams load_head(const fs::path& path) { return head_from_map(load_tensor_file(path)); }

// ---------------------------------------------------------------------------
// Front end
// ---------------------------------------------------------------------------

struct UtteranceFrontEnd {
  SpectrogramMatrix log_mel;
  SdcVector sdc;
};

/// Resamples to the configured rate and zero-pads to at least three frames.
inline AudioBuffer condition_audio(const AudioBuffer& raw, const PipelineConfig& cfg) {
  AudioBuffer buf = resample(raw, cfg.sample_rate);
  if (buf.size() >= cfg.min_samples()) return buf;
  std::vector<double> padded = buf.samples();
  padded.resize(cfg.min_samples(), 0.0);
  return AudioBuffer(std::move(padded), cfg.sample_rate);
}

inline UtteranceFrontEnd front_end(const AudioBuffer& buf, const LogMelExtractor& mel) {
  UtteranceFrontEnd fe{mel(buf), SdcVector{}};
  fe.sdc = sdc_features(fe.log_mel);
  return fe;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// SDC cache keyed by (audio file content hash, feature config hash). Each
/// entry is a one-row feature file; writes go through a rename, so concurrent
/// writers of the same key leave one complete file.
class SdcCache {
 public:
  SdcCache(fs::path dir, std::uint64_t config_hash) : dir_(std::move(dir)), config_hash_(config_hash) {
    if (!dir_.empty()) fs::create_directories(dir_);
  }

  bool enabled() const noexcept { return !dir_.empty(); }

  fs::path entry_path(std::uint64_t content_hash) const {
    return dir_ / (hex64(content_hash) + "-" + hex64(config_hash_) + ".sdcf");
  }

  std::optional<SdcVector> get(std::uint64_t content_hash) const {
    if (!enabled()) return std::nullopt;
    const auto path = entry_path(content_hash);
    if (!fs::exists(path)) return std::nullopt;
    try {
      const auto set = read_features(path);
      if (set.kind != FeatureKind::kSdc || set.count() != 1) return std::nullopt;
      return SdcVector(set.values.row(0));
    } catch (const Error&) {
      return std::nullopt;
    }
  }

  void put(std::uint64_t content_hash, const SdcVector& v) const {
    if (!enabled()) return;
    FeatureSet set{FeatureKind::kSdc, Tensor2(1, kFeatureDim,
                                              std::vector<double>(v.values().begin(), v.values().end())),
                   {hex64(content_hash)}};
    // Per-thread staging name, then rename over the key (last writer wins).
    const auto path = entry_path(content_hash);
    auto staging = path;
    staging += "." + hex64(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    write_file_bytes(staging, encode_features(set));
    std::error_code ec;
    fs::rename(staging, path, ec);
    require(!ec, ErrorCode::kIoFailure, "cannot publish cache entry " + path.string());
  }

 private:
  fs::path dir_;
  std::uint64_t config_hash_;
};

/// Rounds a vector through float32, the precision of every on-disk format.
template <FeatureKind K>
Coefficients<K> quantized(const Coefficients<K>& v) {
  std::array<double, kFeatureDim> q;
  for (std::size_t i = 0; i < kFeatureDim; ++i) q[i] = static_cast<double>(static_cast<float>(v[i]));
  return Coefficients<K>(q);
}

inline fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

/// Loads and front-ends every entry in manifest order (parallel over workers).
inline std::vector<UtteranceFrontEnd> front_end_all(const std::vector<ManifestEntry>& entries,
                                                    const fs::path& base, const PipelineConfig& cfg) {
  const LogMelExtractor mel(cfg.sample_rate, cfg.n_fft, cfg.hop, cfg.n_mels);
  const SdcCache cache(cfg.cache_dir, cfg.feature_hash());
  std::vector<std::optional<UtteranceFrontEnd>> out(entries.size());
  parallel_for(entries.size(), cfg.workers, [&](std::size_t i) {
    const auto bytes = read_file_bytes(resolve(base, entries[i].path));
    const AudioBuffer buf = condition_audio(decode_wav(bytes), cfg);
    const auto hash = fnv1a(bytes);
    UtteranceFrontEnd fe{mel(buf), SdcVector{}};
    if (auto hit = cache.get(hash)) {
      fe.sdc = *hit;
    } else {
      fe.sdc = quantized(sdc_features(fe.log_mel));
      cache.put(hash, fe.sdc);
    }
    out[i] = std::move(fe);
  });
  std::vector<UtteranceFrontEnd> result;
  result.reserve(out.size());
  for (auto& o : out) result.push_back(std::move(*o));
  return result;
}

// ---------------------------------------------------------------------------
// Feature stacks
// ---------------------------------------------------------------------------

template <typename Vec>
Tensor2 stack(const std::vector<Vec>& vs) {
  Tensor2 out(vs.size(), kFeatureDim);
  for (std::size_t i = 0; i < vs.size(); ++i)
    std::copy(vs[i].values().begin(), vs[i].values().end(), out.row(i).begin());
  return out;
}

inline std::vector<SdcVector> sdc_of(const std::vector<UtteranceFrontEnd>& fes) {
  std::vector<SdcVector> v;
  for (const auto& fe : fes) v.push_back(fe.sdc);
  return v;
}

inline std::vector<StcVector> stc_of(const std::vector<UtteranceFrontEnd>& fes, const BiLstmParams& lstm,
                                     const PipelineConfig& cfg) {
  std::vector<StcVector> v(fes.size());
  parallel_for(fes.size(), cfg.workers,
               [&](std::size_t i) { v[i] = quantized(stc_features(fes[i].log_mel, lstm, cfg.max_frames)); });
  return v;
}

inline Tensor2 fused(const std::vector<SdcVector>& sdc, const std::vector<StcVector>& stc) {
  Tensor2 out(sdc.size(), kFusedDim);
  for (std::size_t i = 0; i < sdc.size(); ++i) {
    const auto v = fuse(sdc[i], stc[i]);
    std::copy(v.begin(), v.end(), out.row(i).begin());
  }
  return out;
}

inline std::vector<StdcVector> stdc_of(const std::vector<SdcVector>& sdc, const std::vector<StcVector>& stc,
                                       const NormStats& norm, const AutoencoderParams& ae) {
  std::vector<StdcVector> v;
  v.reserve(sdc.size());
  for (std::size_t i = 0; i < sdc.size(); ++i) v.push_back(quantized(encode_stdc(sdc[i], stc[i], norm, ae)));
  return v;
}

/// Input matrix the SDC-only head sees: SDC z-scored with the SDC half of the
/// fused statistics.
inline Tensor2 sdc_head_input(const std::vector<SdcVector>& sdc, const NormStats& norm) {
  return normalize(stack(sdc), slice_stats(norm, 0, kFeatureDim));
}

// ---------------------------------------------------------------------------
// Extraction
// ---------------------------------------------------------------------------

inline FeatureSet extract_features(const std::vector<ManifestEntry>& entries, const fs::path& base,
                                   const PipelineConfig& cfg, FeatureKind kind) {
  // Fail on missing models before touching any audio.
  std::optional<StcModel> stc;
  std::optional<NormStats> norm;
  std::optional<AutoencoderParams> ae;
  if (kind != FeatureKind::kSdc) stc = load_stc_model(cfg.model_dir, cfg);
  if (kind == FeatureKind::kStdc) {
    norm = load_norm(cfg.model_dir);
    ae = load_autoencoder(cfg.model_dir);
  }
  const auto fes = front_end_all(entries, base, cfg);
  FeatureSet set;
  set.kind = kind;
  for (const auto& e : entries) set.ids.push_back(e.path);
  const auto sdc = sdc_of(fes);
  switch (kind) {
    case FeatureKind::kSdc: set.values = stack(sdc); break;
    case FeatureKind::kStc: set.values = stack(stc_of(fes, stc->lstm, cfg)); break;
    case FeatureKind::kStdc: set.values = stack(stdc_of(sdc, stc_of(fes, stc->lstm, cfg), *norm, *ae)); break;
  }
  return set;
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

struct TrainSummary {
  std::size_t bona_fide = 0;
  std::size_t spoof = 0;
  std::size_t augmented = 0;
  std::vector<double> stc_epoch_loss;
  std::vector<double> autoencoder_epoch_loss;
  double stdc_train_accuracy = 0.0;
  double sdc_train_accuracy = 0.0;
};

/// Adds augmented copies of the minority class until both classes have the
/// same count, cycling through the augmentation kinds.
inline std::size_t balance_with_augmentation(std::vector<AudioBuffer>& audio, std::vector<int>& labels,
                                             std::uint64_t seed) {
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  const int minority = by_class[0].size() < by_class[1].size() ? 0 : 1;
  const auto& members = by_class[minority];
  const std::size_t deficit = by_class[1 - minority].size() - members.size();
  if (members.empty()) return 0;
  for (std::size_t j = 0; j < deficit; ++j) {
    const auto kind = kAllAugmentKinds[j % kAllAugmentKinds.size()];
    const auto spec = AugmentSpec::defaults(kind, derive_seed(seed, 0xA000 + j));
    audio.push_back(apply_augment(audio[members[j % members.size()]], spec));
    labels.push_back(minority);
  }
  return deficit;
}

/// Jointly trains the Bi-LSTM and a head on cross-entropy.
inline StcModel train_stc(const std::vector<Tensor2>& sequences, const std::vector<int>& labels,
                          const PipelineConfig& cfg, std::vector<double>* epoch_loss = nullptr) {
  require(!sequences.empty(), ErrorCode::kEmptyTrainingSet, "no sequences to train on");
  require_both_classes(labels);
  const auto options = cfg.train_options();
  StcModel model{BiLstmParams::init(sequences.front().cols(), cfg.stc_hidden, derive_seed(cfg.seed, 10)),
                 HeadParams::init(cfg.head, derive_seed(cfg.seed, 11), 2 * cfg.stc_hidden)};
  Rng rng(derive_seed(cfg.seed, 12));
  auto tensors = tensor_list(model);
  AdamState adam(options.adam, tensors);
  std::vector<int> batch_labels;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    double loss_sum = 0.0;
    for (const auto& batch : epoch_batches(sequences.size(), options.batch_size, rng)) {
      std::vector<StcTrace> traces(batch.size());
      Tensor2 x(batch.size(), model.lstm.output_dim());
      batch_labels.clear();
      for (std::size_t b = 0; b < batch.size(); ++b) {
        const auto out = bilstm_forward(sequences[batch[b]], model.lstm, &traces[b]);
        std::copy(out.begin(), out.end(), x.row(b).begin());
        batch_labels.push_back(labels[batch[b]]);
      }
      StcModel grads = zeros_like(model);
      Tensor2 dx;
      loss_sum += head_loss_and_grad(x, batch_labels, model.head, grads.head, &dx) *
                  static_cast<double>(batch.size());
      for (std::size_t b = 0; b < batch.size(); ++b)
        bilstm_backward(traces[b], model.lstm, dx.row(b), grads.lstm);
      adam_step(model, grads, adam);
    }
    if (epoch_loss) epoch_loss->push_back(loss_sum / static_cast<double>(sequences.size()));
  }
  quantize_f32(model);
  return model;
}

/// Staged training: front end, joint Bi-LSTM + head, normalization and
/// autoencoder, then the final STDC head (plus the SDC-only head).
inline TrainSummary train_models(const std::vector<ManifestEntry>& entries, const fs::path& base,
                                 const PipelineConfig& cfg, std::ostream* log = nullptr) {
  validate(cfg);
  const auto say = [&](const std::string& s) {
    if (log) *log << s << std::endl;
  };
  std::vector<AudioBuffer> audio;
  std::vector<int> labels;
  TrainSummary summary;
  {
    std::vector<ManifestEntry> train;
    for (const auto& e : entries)
      if (e.subset == Subset::kTrain) train.push_back(e);
    require(!train.empty(), ErrorCode::kEmptyTrainingSet, "manifest has no train entries");
    std::vector<std::optional<AudioBuffer>> loaded(train.size());
    parallel_for(train.size(), cfg.workers, [&](std::size_t i) {
      loaded[i] = condition_audio(load_wav(resolve(base, train[i].path)), cfg);
    });
    for (std::size_t i = 0; i < train.size(); ++i) {
      audio.push_back(std::move(*loaded[i]));
      labels.push_back(class_index(train[i].label));
    }
  }
  require_both_classes(labels);
  for (int l : labels) (l == 0 ? summary.bona_fide : summary.spoof)++;
  summary.augmented = balance_with_augmentation(audio, labels, cfg.seed);
  say("train: " + std::to_string(summary.bona_fide) + " bona fide, " + std::to_string(summary.spoof) +
      " spoof, " + std::to_string(summary.augmented) + " augmented");

  // Stage 1: log-Mel and SDC.
  const LogMelExtractor mel(cfg.sample_rate, cfg.n_fft, cfg.hop, cfg.n_mels);
  std::vector<UtteranceFrontEnd> fes(audio.size());
  parallel_for(audio.size(), cfg.workers, [&](std::size_t i) {
    fes[i] = front_end(audio[i], mel);
    fes[i].sdc = quantized(fes[i].sdc);
  });
  say("stage 1: front end done");

  // Stage 2: Bi-LSTM + head.
  std::vector<Tensor2> sequences;
  for (const auto& fe : fes) sequences.push_back(spectrogram_sequence(fe.log_mel, cfg.max_frames));
  const StcModel stc = train_stc(sequences, labels, cfg, &summary.stc_epoch_loss);
  fs::create_directories(cfg.model_dir);
  save_params(cfg.model_dir / model_files::kStc, stc);
  say("stage 2: STC network trained");

  // Stage 3: normalization + autoencoder.
  const auto sdc = sdc_of(fes);
  const auto stc_vecs = stc_of(fes, stc.lstm, cfg);
  const Tensor2 fused_train = fused(sdc, stc_vecs);
  NormStats norm = fit_norm(fused_train);
  quantize_f32(norm);
  save_params(cfg.model_dir / model_files::kNorm, norm);
  AutoencoderParams ae = train_autoencoder(normalize(fused_train, norm), AutoencoderParams::init(derive_seed(cfg.seed, 20)),
                                           derive_seed(cfg.seed, 21), cfg.train_options(),
                                           &summary.autoencoder_epoch_loss);
  quantize_f32(ae);
  save_params(cfg.model_dir / model_files::kAutoencoder, ae);
  say("stage 3: autoencoder trained");

  // Stage 4: heads.
  const Tensor2 stdc_train = stack(stdc_of(sdc, stc_vecs, norm, ae));
  HeadParams head = train_head(stdc_train, labels, cfg.head, derive_seed(cfg.seed, 30), cfg.train_options());
  quantize_f32(head);
  save_params(cfg.model_dir / model_files::kHeadStdc, head);
  summary.stdc_train_accuracy = training_accuracy(stdc_train, labels, head);

  const Tensor2 sdc_train = sdc_head_input(sdc, norm);
  HeadParams sdc_head = train_head(sdc_train, labels, cfg.head, derive_seed(cfg.seed, 31), cfg.train_options());
  quantize_f32(sdc_head);
  save_params(cfg.model_dir / model_files::kHeadSdc, sdc_head);
  summary.sdc_train_accuracy = training_accuracy(sdc_train, labels, sdc_head);
  say("stage 4: heads trained");
  return summary;
}

// ---------------------------------------------------------------------------
// Scoring and evaluation
// ---------------------------------------------------------------------------

inline std::vector<ScoreRecord> score_entries(const std::vector<ManifestEntry>& entries, const fs::path& base,
                                              const PipelineConfig& cfg, FeatureKind kind) {
  std::vector<double> scores;
  switch (kind) {
    case FeatureKind::kSdc: {
      const HeadParams head = load_head(cfg.model_dir / model_files::kHeadSdc);
      const NormStats norm = load_norm(cfg.model_dir);
      scores = score(sdc_head_input(sdc_of(front_end_all(entries, base, cfg)), norm), head);
      break;
    }
    case FeatureKind::kStc: {
      const StcModel stc = load_stc_model(cfg.model_dir, cfg);
      scores = score(stack(stc_of(front_end_all(entries, base, cfg), stc.lstm, cfg)), stc.head);
      break;
    }
    case FeatureKind::kStdc: {
      const HeadParams head = load_head(cfg.model_dir / model_files::kHeadStdc);
      const FeatureSet set = extract_features(entries, base, cfg, FeatureKind::kStdc);
      scores = score(set.values, head);
      break;
    }
  }
  std::vector<ScoreRecord> records;
  for (std::size_t i = 0; i < entries.size(); ++i)
    records.push_back({entries[i].path, static_cast<double>(static_cast<float>(scores[i])), entries[i].label});
  return records;
}

struct SubsetEvaluation {
  Subset subset = Subset::kEval;
  std::vector<ScoreRecord> scores;
  EvalReport report;
};

/// Scores the dev and eval subsets and writes, per subset,
/// scores_<subset>_<kind>.csv, report_<subset>_<kind>.txt, det_<subset>_<kind>.csv.
inline std::vector<SubsetEvaluation> evaluate(const std::vector<ManifestEntry>& entries, const fs::path& base,
                                              const PipelineConfig& cfg, FeatureKind kind,
                                              const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::vector<SubsetEvaluation> results;
  for (Subset subset : {Subset::kDev, Subset::kEval}) {
    std::vector<ManifestEntry> part;
    for (const auto& e : entries)
      if (e.subset == subset) part.push_back(e);
    if (part.empty()) continue;
    SubsetEvaluation ev;
    ev.subset = subset;
    ev.scores = score_entries(part, base, cfg, kind);
    ev.report = compute_eer(ev.scores);
    const std::string tag = std::string(to_string(subset)) + "_" + std::string(to_string(kind));
    write_scores(out_dir / ("scores_" + tag + ".csv"), ev.scores);
    const auto report = format_report(ev.report, "subset: " + std::string(to_string(subset)) +
                                                     "\nfeatures: " + std::string(to_string(kind)));
    write_file_bytes(out_dir / ("report_" + tag + ".txt"), Bytes(report.begin(), report.end()));
    const auto det = format_det_csv(ev.report);
    write_file_bytes(out_dir / ("det_" + tag + ".csv"), Bytes(det.begin(), det.end()));
    results.push_back(std::move(ev));
  }
  return results;
}

}  // namespace stdc
