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

#include "weighting.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "error.hpp"

namespace epialign {

std::size_t ResidualHistogram::BinIndex(double residual) const {
  const std::size_t n = n_bins();
  const double e = std::clamp(residual, clip_min, clip_max);
  auto idx = static_cast<std::size_t>(
      std::min<double>(std::floor((e - clip_min) / bin_width()), n - 1));
  // Settle floating-point disagreement with the stored edges.
  while (idx > 0 && e < bin_edges[idx]) --idx;
  while (idx + 1 < n && e >= bin_edges[idx + 1]) ++idx;
  return idx;
}

std::size_t ResidualHistogram::ModalBin() const {
  return static_cast<std::size_t>(
      std::max_element(densities.begin(), densities.end()) - densities.begin());
}

ResidualHistogram BuildHistogram(std::span<const double> residuals,
                                 std::size_t n_bins, double clip_max) {
  if (residuals.empty()) {
    throw Error(ErrorCode::kEmptyResiduals,
                "cannot build a histogram from zero residuals");
  }
  if (n_bins < 1 || !(clip_max > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "histogram needs n_bins >= 1 and a positive clip range");
  }
  ResidualHistogram hist;
  hist.clip_max = clip_max;
  hist.densities.assign(n_bins, 0.0);
  hist.counts.assign(n_bins, 0);
  hist.bin_edges.resize(n_bins + 1);
  const double width = clip_max / static_cast<double>(n_bins);
  for (std::size_t b = 0; b <= n_bins; ++b) {
    hist.bin_edges[b] = width * static_cast<double>(b);
  }
  hist.bin_edges.back() = clip_max;

  for (std::size_t k = 0; k < residuals.size(); ++k) {
    if (!std::isfinite(residuals[k])) {
      std::ostringstream msg;
      msg << "residual " << k << " is not finite";
      throw Error(ErrorCode::kInvalidArgument, msg.str());
    }
    if (hist.InWindow(residuals[k])) {
      ++hist.counts[hist.BinIndex(residuals[k])];
    } else {
      ++hist.overflow;
    }
  }

  const double total = static_cast<double>(residuals.size());
  double mass = 0.0;
  for (std::size_t b = 0; b < n_bins; ++b) {
    const double d = hist.counts[b] == 0
                         ? kDensityFloor
                         : static_cast<double>(hist.counts[b]) / (total * width);
    hist.densities[b] = d;
    mass += d * width;
  }
  for (double& d : hist.densities) d /= mass;
  hist.tail_density = kDensityFloor / mass;
  return hist;
}

WeightTable AdaptiveWeights(std::span<const double> residuals,
                            const ResidualHistogram& histogram, double alpha) {
  WeightTable table;
  table.alpha = alpha;
  if (residuals.empty()) return table;

  std::vector<double> f(residuals.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < residuals.size(); ++k) {
    f[k] = histogram.Density(residuals[k]);
    sum += f[k];
  }
  table.avg_density = sum / static_cast<double>(residuals.size());
  table.weights.resize(residuals.size());
  for (std::size_t k = 0; k < residuals.size(); ++k) {
    table.weights[k] = std::pow(f[k] / table.avg_density, alpha);
  }
  return table;
}

WeightTable ConfidenceWeights(const MatchSet& matches) {
  WeightTable table;
  table.alpha = 0.0;
  table.weights.reserve(matches.TotalCorrespondences());
  for (std::size_t p = 0; p < matches.pairs.size(); ++p) {
    const PairMatches& pair = matches.pairs[p];
    if (!pair.has_confidence && !pair.correspondences.empty()) {
      throw Error(ErrorCode::kMissingConfidence,
                  "pair " + std::to_string(p) + " carries no confidences");
    }
    for (const Correspondence& c : pair.correspondences) {
      table.weights.push_back(c.confidence);
    }
  }
  return table;
}

WeightTable UniformWeights(std::size_t count) {
  WeightTable table;
  table.alpha = 0.0;
  table.weights.assign(count, 1.0);
  return table;
}

}  // namespace epialign
