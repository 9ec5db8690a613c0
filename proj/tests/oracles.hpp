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
// Independent re-implementations used as test oracles.
#pragma once

#include <algorithm>
#include <array>
#include <cstdlib>
#include <vector>

#include "stdc/classifier.hpp"
#include "stdc/ldp_sdc.hpp"
#include "stdc/random.hpp"

namespace stdc::testing {

inline SpectrogramMatrix random_spec(std::size_t rows, std::size_t cols, Rng& rng, double hi = 10.0) {
  SpectrogramMatrix s{Grid<double>(rows, cols), SpectrogramKind::kLogMel};
  for (double& v : s.values.data()) v = rng.uniform(0.0, hi);
  return s;
}

// Straight-line per-cell evaluation: neighbors addressed by name, codes as
// -1/0/+1, then split into planes.
struct Brute {
  std::vector<std::vector<std::array<int, 8>>> codes;  // [r][c][dir]
};

inline Brute brute_force(const Grid<double>& s) {
  // (dr, dc) for E, NE, N, NW, W, SW, S, SE with north = row - 1.
  const int dr[8] = {0, -1, -1, -1, 0, 1, 1, 1};
  const int dc[8] = {1, 1, 0, -1, -1, -1, 0, 1};
  Brute b;
  b.codes.assign(s.rows() - 2, std::vector<std::array<int, 8>>(s.cols() - 2));
  for (std::size_t r = 1; r + 1 < s.rows(); ++r)
    for (std::size_t c = 1; c + 1 < s.cols(); ++c) {
      double sum = 0.0;
      for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j) sum += s(r + i, c + j);
      const double mu = sum / 9.0;
      const double center = s(r, c);
      for (int d = 0; d < 8; ++d) {
        const double n = s(r + dr[d], c + dc[d]);
        int code = 0;
        if (n >= center + mu)
          code = 1;
        else if (n <= center - mu)
          code = -1;
        b.codes[r - 1][c - 1][d] = code;
      }
    }
  return b;
}

// Independent sweep: every threshold below, between and above the sorted
// scores, error counts by direct loop, closest crossing with the lowest
// threshold on ties.
inline double oracle_eer(const std::vector<ScoreRecord>& recs) {
  std::vector<double> s;
  long long nb = 0, ns = 0;
  for (const auto& r : recs) {
    s.push_back(r.score);
    (r.label == Label::kBonaFide ? nb : ns) += 1;
  }
  std::sort(s.begin(), s.end());
  std::vector<double> cuts = {s.front() - 1.0};
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    if (s[i] != s[i + 1]) cuts.push_back(0.5 * (s[i] + s[i + 1]));
  cuts.push_back(s.back() + 1.0);
  long long best_num = -1, best_fa = 0, best_fr = 0;
  for (double t : cuts) {
    long long fa = 0, fr = 0;
    for (const auto& r : recs) {
      if (r.label == Label::kSpoof && r.score > t) ++fa;
      if (r.label == Label::kBonaFide && r.score <= t) ++fr;
    }
    const long long num = std::llabs(fa * nb - fr * ns);
    if (best_num < 0 || num < best_num) {
      best_num = num;
      best_fa = fa;
      best_fr = fr;
    }
  }
  return 0.5 * (static_cast<double>(best_fa) / ns + static_cast<double>(best_fr) / nb);
}

}  // namespace stdc::testing
