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

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "stdc/classifier.hpp"

namespace stdc {

struct DetPoint {
  double threshold = 0.0;
  double far = 0.0;  // spoofs scored above the threshold
  double frr = 0.0;  // bona fide scored at or below the threshold
};

struct EvalReport {
  double eer = 0.0;
  double threshold_at_eer = 0.0;
  double accuracy = 0.0;  // at threshold_at_eer, bona fide iff score > threshold
  std::size_t bona_fide_count = 0;
  std::size_t spoof_count = 0;
  std::vector<DetPoint> det_points;  // ascending threshold
};

/// Candidate thresholds: one below every score, the midpoint between each
/// pair of consecutive distinct scores, and one above every score.
inline std::vector<double> candidate_thresholds(std::vector<double> scores) {
  std::sort(scores.begin(), scores.end());
  scores.erase(std::unique(scores.begin(), scores.end()), scores.end());
  std::vector<double> t;
  t.reserve(scores.size() + 1);
  t.push_back(scores.front() - 1.0);
  for (std::size_t i = 0; i + 1 < scores.size(); ++i) t.push_back(0.5 * (scores[i] + scores[i + 1]));
  t.push_back(scores.back() + 1.0);
  return t;
}

/// Threshold sweep. The operating point minimizes |FAR - FRR| (compared
/// exactly on integer counts); ties go to the lower threshold. EER is the
/// mean of FAR and FRR there.
inline EvalReport compute_eer(const std::vector<ScoreRecord>& records) {
  std::vector<double> bona, spoof, all;
  for (const auto& r : records) {
    (r.label == Label::kBonaFide ? bona : spoof).push_back(r.score);
    all.push_back(r.score);
  }
  require(!bona.empty() && !spoof.empty(), ErrorCode::kSingleClassScores,
          "EER needs at least one bona fide and one spoof score");
  std::sort(bona.begin(), bona.end());
  std::sort(spoof.begin(), spoof.end());
  const auto nb = static_cast<std::int64_t>(bona.size());
  const auto ns = static_cast<std::int64_t>(spoof.size());

  EvalReport report;
  report.bona_fide_count = bona.size();
  report.spoof_count = spoof.size();
  std::int64_t best_gap = -1;
  std::int64_t best_fa = 0, best_fr = 0;
  for (double t : candidate_thresholds(all)) {
    const auto fr = static_cast<std::int64_t>(std::upper_bound(bona.begin(), bona.end(), t) - bona.begin());
    const auto fa = ns - static_cast<std::int64_t>(std::upper_bound(spoof.begin(), spoof.end(), t) - spoof.begin());
    report.det_points.push_back({t, static_cast<double>(fa) / ns, static_cast<double>(fr) / nb});
    // |fa/ns - fr/nb| scaled by ns·nb.
    const std::int64_t gap = std::abs(fa * nb - fr * ns);
    if (best_gap < 0 || gap < best_gap) {
      best_gap = gap;
      best_fa = fa;
      best_fr = fr;
      report.threshold_at_eer = t;
    }
  }
  report.eer = 0.5 * (static_cast<double>(best_fa) / ns + static_cast<double>(best_fr) / nb);
  const std::int64_t correct = (nb - best_fr) + (ns - best_fa);
  report.accuracy = static_cast<double>(correct) / static_cast<double>(nb + ns);
  return report;
}

inline std::string format_report(const EvalReport& r, const std::string& title) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%s\n"
                "bona_fide: %zu\n"
                "spoof: %zu\n"
                "eer: %.6f\n"
                "eer_percent: %.4f\n"
                "threshold: %.9g\n"
                "accuracy: %.6f\n",
                title.c_str(), r.bona_fide_count, r.spoof_count, r.eer, 100.0 * r.eer,
                r.threshold_at_eer, r.accuracy);
  return buf;
}

inline std::string format_det_csv(const EvalReport& r) {
  std::string out = "threshold,far,frr\n";
  char buf[128];
  for (const auto& p : r.det_points) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g\n", p.threshold, p.far, p.frr);
    out += buf;
  }
  return out;
}

}  // namespace stdc
