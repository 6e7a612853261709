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

// Random problem instances shared by the unit and acceptance tests.

#ifndef EPIALIGN_TESTS_FIXTURES_HPP_
#define EPIALIGN_TESTS_FIXTURES_HPP_

#include <random>
#include <string>
#include <vector>

#include "aligner.hpp"
#include "geometry.hpp"
#include "oracles.hpp"
#include "pairing.hpp"

namespace fixtures {

struct GradientProblem {
  epialign::CameraRig rig;
  epialign::MatchSet matches;
  std::vector<double> weights;
  Eigen::VectorXd params;
  epialign::ParameterLayout layout;
};

// Cameras on a shell looking roughly at the origin, noisy correspondences of
// random scene points spread over random pairs, random positive weights and a
// random residual parameter vector near identity.
inline GradientProblem RandomGradientProblem(std::uint64_t seed,
                                             std::size_t cameras = 5,
                                             std::size_t correspondences = 50,
                                             bool optimize_focal = false) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GradientProblem problem;
  for (std::size_t c = 0; c < cameras; ++c) {
    Eigen::Vector3d center(n(rng), n(rng), n(rng));
    center = 4.0 * center.normalized();
    const Eigen::Vector3d target(0.3 * n(rng), 0.3 * n(rng), 0.3 * n(rng));
    const Eigen::Vector3d z = (target - center).normalized();
    Eigen::Vector3d x = z.cross(Eigen::Vector3d(n(rng), n(rng), n(rng))).normalized();
    const Eigen::Vector3d y = z.cross(x);
    Eigen::Matrix3d R;
    R.row(0) = x;
    R.row(1) = y;
    R.row(2) = z;
    epialign::Frame frame;
    frame.id = "cam" + std::to_string(c);
    frame.intrinsics.width = 640;
    frame.intrinsics.height = 480;
    frame.intrinsics.fx = 400.0 + 200.0 * u(rng);
    frame.intrinsics.fy = frame.intrinsics.fx * (0.95 + 0.1 * u(rng));
    frame.intrinsics.cx = 300.0 + 40.0 * u(rng);
    frame.intrinsics.cy = 220.0 + 40.0 * u(rng);
    frame.pose = epialign::CameraPose::FromCenter(R, center);
    problem.rig.frames.push_back(frame);
  }
  // Pairs with at least one correspondence each, then the remainder at random.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::uint32_t i = 0; i < cameras; ++i) {
    for (std::uint32_t j = i + 1; j < cameras; ++j) pairs.emplace_back(i, j);
  }
  std::shuffle(pairs.begin(), pairs.end(), rng);
  pairs.resize(std::min<std::size_t>(pairs.size(), std::max<std::size_t>(1, correspondences / 5)));
  std::sort(pairs.begin(), pairs.end());
  for (const auto& [i, j] : pairs) {
    epialign::PairMatches pm;
    pm.frame_i = i;
    pm.frame_j = j;
    problem.matches.pairs.push_back(pm);
  }
  for (std::size_t k = 0; k < correspondences; ++k) {
    epialign::PairMatches& pm =
        problem.matches.pairs[k < pairs.size() ? k : rng() % pairs.size()];
    const Eigen::Vector3d X(0.8 * n(rng), 0.8 * n(rng), 0.8 * n(rng));
    epialign::Correspondence c;
    c.x = epialign::Project(X, problem.rig.frames[pm.frame_i].intrinsics,
                            problem.rig.frames[pm.frame_i].pose) +
          Eigen::Vector2d(3.0 * n(rng), 3.0 * n(rng));
    c.x_prime = epialign::Project(X, problem.rig.frames[pm.frame_j].intrinsics,
                                  problem.rig.frames[pm.frame_j].pose) +
                Eigen::Vector2d(3.0 * n(rng), 3.0 * n(rng));
    pm.correspondences.push_back(c);
  }
  for (std::size_t k = 0; k < correspondences; ++k) {
    problem.weights.push_back(0.1 + u(rng));
  }
  problem.layout.frame_count = cameras;
  problem.layout.optimize_focal = optimize_focal;
  problem.layout.gauge_frame = 0;
  problem.params = problem.layout.Identity();
  for (std::size_t c = 0; c < cameras; ++c) {
    const std::size_t o = problem.layout.offset(c);
    for (std::size_t k = 0; k < 9; ++k) problem.params[o + k] += 0.02 * n(rng);
    if (optimize_focal) problem.params[o + 9] = 0.02 * n(rng);
  }
  return problem;
}

// Largest per-component relative error between analytic and reference
// gradients over components whose magnitude exceeds `floor`.
inline double MaxRelativeError(const Eigen::VectorXd& analytic,
                               const Eigen::VectorXd& reference,
                               double floor = 1e-8) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < analytic.size(); ++k) {
    const double scale = std::max(std::abs(analytic[k]), std::abs(reference[k]));
    if (scale <= floor) continue;
    worst = std::max(worst, std::abs(analytic[k] - reference[k]) / scale);
  }
  return worst;
}

}  // namespace fixtures

#endif  // EPIALIGN_TESTS_FIXTURES_HPP_
