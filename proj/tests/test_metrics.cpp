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

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "stdc/metrics.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace stdc {
namespace {

using testing::expect_error;
using testing::oracle_eer;

std::vector<ScoreRecord> records(const std::vector<double>& bona, const std::vector<double>& spoof) {
  std::vector<ScoreRecord> out;
  for (std::size_t i = 0; i < bona.size(); ++i) out.push_back({"b" + std::to_string(i), bona[i], Label::kBonaFide});
  for (std::size_t i = 0; i < spoof.size(); ++i) out.push_back({"s" + std::to_string(i), spoof[i], Label::kSpoof});
  return out;
}

TEST(Eer, PerfectSeparation) {
  const auto r = compute_eer(records({0.9, 0.8}, {0.1, 0.2}));
  EXPECT_EQ(r.eer, 0.0);
  EXPECT_EQ(r.accuracy, 1.0);
}

TEST(Eer, PerfectInversion) { EXPECT_EQ(compute_eer(records({0.1}, {0.9})).eer, 1.0); }

TEST(Eer, InterleavedFourScores) {
  // Sorted: 0.2 s, 0.4 b, 0.6 s, 0.8 b. Only t = 0.5 balances the rates,
  // with one spoof accepted of two and one bona fide rejected of two.
  const auto r = compute_eer(records({0.8, 0.4}, {0.6, 0.2}));
  EXPECT_EQ(r.eer, 0.5);
  EXPECT_DOUBLE_EQ(r.threshold_at_eer, 0.5);
  EXPECT_EQ(r.accuracy, 0.5);
}

TEST(Eer, TiesGoToLowerThreshold) {
  // Candidates are -0.5 (FAR 1, FRR 0) and 1.5 (FAR 0, FRR 1), tied on the gap.
  const auto r = compute_eer(records({0.5}, {0.5}));
  EXPECT_EQ(r.eer, 0.5);
  EXPECT_DOUBLE_EQ(r.threshold_at_eer, -0.5);
}

TEST(Eer, MatchesExhaustiveOracle) {
  Rng rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t nb = 1 + rng.next() % 10, ns = 1 + rng.next() % 10;
    std::vector<double> b(nb), s(ns);
    // Coarse values force plenty of ties.
    for (double& v : b) v = std::round(rng.uniform(0.0, 8.0)) / 4.0 + 0.3;
    for (double& v : s) v = std::round(rng.uniform(0.0, 8.0)) / 4.0;
    const auto recs = records(b, s);
    EXPECT_EQ(compute_eer(recs).eer, oracle_eer(recs));
  }
}

TEST(Eer, InvariantUnderMonotoneTransform) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> b(15), s(12);
    for (double& v : b) v = rng.normal() + 0.5;
    for (double& v : s) v = rng.normal();
    auto t = records(b, s);
    for (auto& r : t) r.score = std::exp(3.0 * r.score) - 7.0;
    EXPECT_EQ(compute_eer(records(b, s)).eer, compute_eer(t).eer);
  }
}

TEST(Eer, LabelSwapWithNegation) {
  // Equal class sizes and distinct scores make the closest crossing unique;
  // otherwise negation mirrors which of two tied crossings is the lower one.
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> b(12), s(12);
    for (double& v : b) v = rng.normal() + 0.3;
    for (double& v : s) v = rng.normal();
    auto swapped = records(b, s);
    for (auto& r : swapped) {
      r.score = -r.score;
      r.label = r.label == Label::kBonaFide ? Label::kSpoof : Label::kBonaFide;
    }
    EXPECT_EQ(compute_eer(records(b, s)).eer, compute_eer(swapped).eer);
  }
}

TEST(Eer, DetPointsMonotone) {
  Rng rng(4);
  std::vector<double> b(30), s(30);
  for (double& v : b) v = rng.normal() + 1.0;
  for (double& v : s) v = rng.normal();
  const auto r = compute_eer(records(b, s));
  ASSERT_GE(r.det_points.size(), 2u);
  EXPECT_EQ(r.det_points.front().far, 1.0);
  EXPECT_EQ(r.det_points.back().frr, 1.0);
  for (std::size_t i = 1; i < r.det_points.size(); ++i) {
    EXPECT_GT(r.det_points[i].threshold, r.det_points[i - 1].threshold);
    EXPECT_LE(r.det_points[i].far, r.det_points[i - 1].far);
    EXPECT_GE(r.det_points[i].frr, r.det_points[i - 1].frr);
  }
  EXPECT_GE(r.eer, 0.0);
  EXPECT_LE(r.eer, 1.0);
}

TEST(Eer, SingleClassRejected) {
  expect_error(ErrorCode::kSingleClassScores, [] { compute_eer(records({0.1, 0.2}, {})); });
  expect_error(ErrorCode::kSingleClassScores, [] { compute_eer(records({}, {0.3})); });
}

TEST(Report, TextAndCsv) {
  const auto r = compute_eer(records({0.9, 0.8}, {0.1, 0.2}));
  const auto text = format_report(r, "eval/stdc");
  EXPECT_NE(text.find("eer: 0.000000"), std::string::npos);
  EXPECT_NE(text.find("accuracy: 1.000000"), std::string::npos);
  const auto csv = format_det_csv(r);
  EXPECT_EQ(csv.rfind("threshold,far,frr\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), static_cast<long>(r.det_points.size() + 1));
}

}  // namespace
}  // namespace stdc
