/*
 * Copyright 2026 The epialign Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "error.hpp"
#include "weighting.hpp"

using namespace epialign;

TEST_CASE("histogram layout") {
  const std::vector<double> residuals = {0.0, 0.1, 0.25, 1.0, 19.99, 20.0, 55.0};
  const ResidualHistogram h = BuildHistogram(residuals);
  CHECK(h.n_bins() == 100);
  CHECK(h.bin_edges.size() == 101);
  CHECK(h.bin_edges.front() == 0.0);
  CHECK(h.bin_edges.back() == 20.0);
  CHECK(h.bin_width() == doctest::Approx(0.2));
  CHECK(h.BinIndex(0.0) == 0);
  CHECK(h.BinIndex(0.1999) == 0);
  CHECK(h.BinIndex(0.2) == 1);
  CHECK(h.BinIndex(2.5) == 12);
  CHECK(h.BinIndex(55.0) == 99);
  // 20.0 is the closed right edge; 55.0 lies past the window.
  CHECK(h.counts[99] == 2);
  CHECK(h.overflow == 1);
  CHECK(std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}) + h.overflow ==
        residuals.size());
  CHECK(h.Density(55.0) == h.tail_density);
  CHECK(h.Density(std::nan("")) == h.tail_density);
  CHECK(h.Density(55.0) < h.Density(19.99));
}

TEST_CASE("residuals past the window get the floor density") {
  std::vector<double> residuals;
  for (int k = 0; k < 80; ++k) residuals.push_back(0.1 * k);
  for (int k = 0; k < 20; ++k) residuals.push_back(100.0 + k);
  const ResidualHistogram h = BuildHistogram(residuals);
  CHECK(h.overflow == 20);
  double mass = 0.0;
  for (double d : h.densities) mass += d * h.bin_width();
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  // Floor of an empty bin, on the same normalization as the bins.
  CHECK(h.tail_density == doctest::Approx(1e-6 / (0.8 + 60 * 0.2 * 1e-6)).epsilon(1e-12));
  const WeightTable w = AdaptiveWeights(residuals, h, 0.5);
  for (int k = 0; k < 80; ++k) CHECK(w.weights[k] > 1.0);
  for (int k = 80; k < 100; ++k) CHECK(w.weights[k] < 1e-2);

  // Everything past the window: flat density and unit weights.
  const std::vector<double> far(10, 50.0);
  const ResidualHistogram flat = BuildHistogram(far);
  CHECK(flat.tail_density == doctest::Approx(1.0 / 20.0));
  for (double v : AdaptiveWeights(far, flat, 0.5).weights) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("histogram density integrates to one with floored empty bins") {
  std::mt19937_64 rng(1);
  std::exponential_distribution<double> e(0.7);
  std::vector<double> residuals(5000);
  for (double& r : residuals) r = e(rng);
  const ResidualHistogram h = BuildHistogram(residuals);
  double mass = 0.0;
  for (double d : h.densities) {
    CHECK(d > 0.0);
    mass += d * h.bin_width();
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(h.ModalBin() < 5);

  // Hand evaluation: 4 residuals in bin 0 of a 2-bin [0, 20] histogram.
  const std::vector<double> packed = {1.0, 2.0, 3.0, 4.0};
  const ResidualHistogram two = BuildHistogram(packed, 2, 20.0);
  const double floor_mass = 1e-6 * 10.0;
  const double raw = 4.0 / (4.0 * 10.0);
  CHECK(two.densities[0] == doctest::Approx(raw / (raw * 10.0 + floor_mass)));
  CHECK(two.densities[1] == doctest::Approx(1e-6 / (raw * 10.0 + floor_mass)));
}

TEST_CASE("histogram errors") {
  try {
    BuildHistogram(std::vector<double>{});
    FAIL("expected EmptyResiduals");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptyResiduals);
  }
  CHECK_THROWS_AS(BuildHistogram(std::vector<double>{1.0, std::nan("")}), Error);
  CHECK_THROWS_AS(BuildHistogram(std::vector<double>{1.0}, 0), Error);
}

TEST_CASE("adaptive weights follow the density ratio") {
  std::vector<double> residuals;
  for (int k = 0; k < 90; ++k) residuals.push_back(0.5);
  for (int k = 0; k < 10; ++k) residuals.push_back(15.0);
  const ResidualHistogram h = BuildHistogram(residuals);
  const WeightTable w = AdaptiveWeights(residuals, h, 0.5);
  REQUIRE(w.weights.size() == residuals.size());
  const double f_in = h.Density(0.5), f_out = h.Density(15.0);
  const double mean = (90 * f_in + 10 * f_out) / 100.0;
  CHECK(w.avg_density == doctest::Approx(mean));
  CHECK(w.weights[0] == doctest::Approx(std::sqrt(f_in / mean)).epsilon(1e-14));
  CHECK(w.weights[99] == doctest::Approx(std::sqrt(f_out / mean)).epsilon(1e-14));
  CHECK(w.weights[0] > 1.0);
  CHECK(w.weights[99] < w.weights[0]);

  // alpha = 0 gives uniform weights; larger alpha sharpens the contrast.
  for (double v : AdaptiveWeights(residuals, h, 0.0).weights) CHECK(v == 1.0);
  const WeightTable sharp = AdaptiveWeights(residuals, h, 1.0);
  CHECK(sharp.weights[0] / sharp.weights[99] > w.weights[0] / w.weights[99]);
}

TEST_CASE("confidence and uniform weights") {
  MatchSet matches;
  PairMatches pair;
  pair.frame_i = 0;
  pair.frame_j = 1;
  pair.has_confidence = true;
  for (double c : {0.2, 0.9}) {
    Correspondence corr;
    corr.confidence = c;
    pair.correspondences.push_back(corr);
  }
  matches.pairs.push_back(pair);
  const WeightTable conf = ConfidenceWeights(matches);
  CHECK(conf.weights == std::vector<double>{0.2, 0.9});
  matches.pairs[0].has_confidence = false;
  try {
    ConfidenceWeights(matches);
    FAIL("expected MissingConfidence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingConfidence);
  }
  CHECK(UniformWeights(3).weights == std::vector<double>{1.0, 1.0, 1.0});
}

TEST_CASE("bin counts match a direct count") {
  std::mt19937_64 rng(2);
  std::exponential_distribution<double> e(0.3);
  std::vector<double> residuals(10000);
  for (double& r : residuals) r = e(rng);
  const ResidualHistogram h = BuildHistogram(residuals);
  std::vector<std::size_t> expected(100, 0);
  std::size_t beyond = 0;
  for (double r : residuals) {
    if (r > 20.0) {
      ++beyond;
      continue;
    }
    std::size_t b = 0;
    while (b < 99 && !(r < h.bin_edges[b + 1])) ++b;
    ++expected[b];
  }
  CHECK(h.counts == expected);
  CHECK(h.overflow == beyond);
  CHECK(beyond > 0);
}

TEST_CASE("edge populations") {
  const ResidualHistogram zeros = BuildHistogram(std::vector<double>(50, 0.0));
  CHECK(zeros.counts[0] == 50);
  CHECK(zeros.ModalBin() == 0);

  std::vector<double> spread;
  for (int b = 0; b < 100; ++b) spread.push_back(0.2 * b + 0.1);
  const ResidualHistogram flat = BuildHistogram(spread);
  for (double d : flat.densities) CHECK(d == doctest::Approx(1.0 / 20.0).epsilon(1e-12));
}

TEST_CASE("modal bin carries the largest weight and weights are deterministic") {
  std::mt19937_64 rng(3);
  std::lognormal_distribution<double> ln(1.0, 0.8);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> residuals(2000);
    for (double& r : residuals) r = ln(rng);
    const ResidualHistogram h = BuildHistogram(residuals);
    const WeightTable w = AdaptiveWeights(residuals, h, 0.5);
    const WeightTable again = AdaptiveWeights(residuals, BuildHistogram(residuals), 0.5);
    CHECK(w.weights == again.weights);
    const double top = *std::max_element(w.weights.begin(), w.weights.end());
    for (std::size_t k = 0; k < residuals.size(); ++k) {
      if (h.InWindow(residuals[k]) && h.BinIndex(residuals[k]) == h.ModalBin()) {
        CHECK(w.weights[k] == top);
      }
    }
  }
}
