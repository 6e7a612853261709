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

#ifndef EPIALIGN_WEIGHTING_HPP_
#define EPIALIGN_WEIGHTING_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "pairing.hpp"

namespace epialign {

inline constexpr std::size_t kDefaultHistogramBins = 100;
inline constexpr double kHistogramClipMax = 20.0;  // px
inline constexpr double kDensityFloor = 1e-6;
inline constexpr double kDefaultAlpha = 0.5;

// Equal-width density estimate of epipolar residuals over [0, clip_max].
// Residuals beyond clip_max are not binned; they are tallied in `overflow`
// and evaluate to `tail_density`, the normalized floor of an empty bin.
struct ResidualHistogram {
  std::vector<double> bin_edges;     // n_bins + 1 entries
  std::vector<double> densities;     // integrates to 1 over [0, clip_max]
  std::vector<std::size_t> counts;   // raw counts, before the density floor
  std::size_t overflow = 0;
  double tail_density = 0.0;
  double clip_min = 0.0;
  double clip_max = kHistogramClipMax;

  std::size_t n_bins() const { return densities.size(); }
  double bin_width() const { return (clip_max - clip_min) / n_bins(); }
  // Clamps into [clip_min, clip_max] before locating the bin.
  std::size_t BinIndex(double residual) const;
  bool InWindow(double residual) const { return residual <= clip_max; }
  // Non-finite residuals also take the tail density.
  double Density(double residual) const {
    return InWindow(residual) ? densities[BinIndex(residual)] : tail_density;
  }
  std::size_t ModalBin() const;
};

// Per-correspondence weights, flattened in (pair, correspondence) order.
struct WeightTable {
  std::vector<double> weights;
  double alpha = kDefaultAlpha;
  double avg_density = 1.0;
};

ResidualHistogram BuildHistogram(std::span<const double> residuals,
                                 std::size_t n_bins = kDefaultHistogramBins,
                                 double clip_max = kHistogramClipMax);

// w_k = (f(e_k) / mean_k f(e_k))^alpha with f the histogram density.
WeightTable AdaptiveWeights(std::span<const double> residuals,
                            const ResidualHistogram& histogram,
                            double alpha = kDefaultAlpha);

// Weights equal to the matcher confidences. Throws MissingConfidence when any
// non-empty pair lacks them.
WeightTable ConfidenceWeights(const MatchSet& matches);

WeightTable UniformWeights(std::size_t count);

}  // namespace epialign

#endif  // EPIALIGN_WEIGHTING_HPP_
