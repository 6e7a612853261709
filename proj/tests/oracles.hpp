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

// Reference implementations used only by tests. They follow different
// derivations than the library so agreement is meaningful.

#ifndef EPIALIGN_TESTS_ORACLES_HPP_
#define EPIALIGN_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "aligner.hpp"
#include "geometry.hpp"
#include "metrics.hpp"
#include "pairing.hpp"
#include "weighting.hpp"

namespace oracle {

using LD = long double;
using Mat3L = Eigen::Matrix<LD, 3, 3>;
using Vec3L = Eigen::Matrix<LD, 3, 1>;
using Mat34L = Eigen::Matrix<LD, 3, 4>;
using Mat4L = Eigen::Matrix<LD, 4, 4>;

inline Mat3L GramSchmidt(const Eigen::Matrix<LD, 6, 1>& dr) {
  Vec3L a1 = dr.head<3>(), a2 = dr.tail<3>();
  Vec3L b1 = a1 / a1.norm();
  Vec3L b2 = a2 - b1.dot(a2) * b1;
  b2 /= b2.norm();
  Mat3L R;
  R << b1, b2, b1.cross(b2);
  return R;
}

struct CameraL {
  Mat3L K;
  Mat3L R;
  Vec3L t;
};

// Camera n of base + params, following the residual parameterization but in
// long double.
inline CameraL PerturbedCamera(const epialign::CameraRig& base,
                               const std::vector<LD>& params,
                               const epialign::ParameterLayout& layout,
                               std::size_t n) {
  const epialign::Frame& f = base.frames[n];
  CameraL cam;
  LD scale = 1;
  cam.R = f.pose.R.cast<LD>();
  cam.t = f.pose.t.cast<LD>();
  if (n != layout.gauge_frame) {
    const std::size_t o = layout.offset(n);
    Eigen::Matrix<LD, 6, 1> dr;
    for (int k = 0; k < 6; ++k) dr[k] = params[o + k];
    const Mat3L D = GramSchmidt(dr);
    cam.R = D * cam.R;
    cam.t = D * cam.t;
    for (int k = 0; k < 3; ++k) cam.t[k] += params[o + 6 + k];
    if (layout.optimize_focal) scale = std::exp(params[o + 9]);
  }
  cam.K << scale * LD(f.intrinsics.fx), 0, LD(f.intrinsics.cx), 0,
      scale * LD(f.intrinsics.fy), LD(f.intrinsics.cy), 0, 0, 1;
  return cam;
}

inline Mat3L SkewL(const Vec3L& v) {
  Mat3L S;
  S << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return S;
}

// F from projection matrices: F = [e']x P' P^+, with e' = P' C and C the
// homogeneous center of P. Unit Frobenius norm.
inline Mat3L FundamentalFromProjections(const CameraL& a, const CameraL& b) {
  Mat34L Pa, Pb;
  Pa << a.K * a.R, a.K * a.t;
  Pb << b.K * b.R, b.K * b.t;
  Eigen::Matrix<LD, 4, 1> C;
  C << -a.R.transpose() * a.t, 1;
  const Vec3L e = Pb * C;
  const Eigen::Matrix<LD, 4, 3> pinv =
      Pa.transpose() * (Pa * Pa.transpose()).inverse();
  Mat3L F = SkewL(e) * Pb * pinv;
  return F / F.norm();
}

struct LossL {
  LD loss = 0;
  std::vector<LD> residuals;
};

inline LossL WeightedLoss(const epialign::CameraRig& base,
                          const epialign::MatchSet& matches,
                          const std::vector<double>& weights,
                          const std::vector<LD>& params,
                          const epialign::ParameterLayout& layout,
                          epialign::ResidualMode mode) {
  LossL out;
  LD num = 0, den = 0;
  std::size_t flat = 0;
  for (const epialign::PairMatches& pair : matches.pairs) {
    const CameraL a = PerturbedCamera(base, params, layout, pair.frame_i);
    const CameraL b = PerturbedCamera(base, params, layout, pair.frame_j);
    const Mat3L F = FundamentalFromProjections(a, b);
    for (const epialign::Correspondence& c : pair.correspondences) {
      const Vec3L x(c.x.x(), c.x.y(), 1), xp(c.x_prime.x(), c.x_prime.y(), 1);
      const Vec3L line = F * x;
      const LD normal = std::hypot(line[0], line[1]);
      LD e = std::abs(xp.dot(line));
      if (mode == epialign::ResidualMode::kGeometric) {
        if (normal < 1e-12L) {
          out.residuals.push_back(std::numeric_limits<LD>::quiet_NaN());
          ++flat;
          continue;
        }
        e /= normal;
      }
      out.residuals.push_back(e);
      num += weights[flat] * e;
      den += weights[flat];
      ++flat;
    }
  }
  out.loss = num / den;
  return out;
}

// Central differences of WeightedLoss at double-valued params.
inline Eigen::VectorXd FiniteDifferenceGradient(
    const epialign::CameraRig& base, const epialign::MatchSet& matches,
    const std::vector<double>& weights, const Eigen::VectorXd& params,
    const epialign::ParameterLayout& layout, epialign::ResidualMode mode,
    double step = 1e-6) {
  std::vector<LD> p(params.data(), params.data() + params.size());
  Eigen::VectorXd g(params.size());
  for (Eigen::Index k = 0; k < params.size(); ++k) {
    const LD saved = p[k];
    p[k] = saved + step;
    const LD plus = WeightedLoss(base, matches, weights, p, layout, mode).loss;
    p[k] = saved - step;
    const LD minus = WeightedLoss(base, matches, weights, p, layout, mode).loss;
    p[k] = saved;
    g[k] = static_cast<double>((plus - minus) / (2 * LD(step)));
  }
  return g;
}

// Relative pose blocks by explicit 4x4 inversion and multiplication.
inline Eigen::Matrix4d RelativeHomogeneous(const epialign::CameraPose& pi,
                                           const epialign::CameraPose& pj) {
  Eigen::Matrix4d Ei = Eigen::Matrix4d::Identity(), Ej = Eigen::Matrix4d::Identity();
  Ei.topLeftCorner<3, 3>() = pi.R;
  Ei.topRightCorner<3, 1>() = pi.t;
  Ej.topLeftCorner<3, 3>() = pj.R;
  Ej.topRightCorner<3, 1>() = pj.t;
  return Ei.inverse() * Ej;
}

inline double BruteForceMeanNearest(const std::vector<Eigen::Vector3d>& from,
                                    const std::vector<Eigen::Vector3d>& to) {
  long double sum = 0;
  for (const Eigen::Vector3d& p : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const Eigen::Vector3d& q : to) best = std::min(best, (p - q).squaredNorm());
    sum += std::sqrt(best);
  }
  return static_cast<double>(sum / from.size());
}

// Horn's closed form with unit quaternions; scale by least squares after
// rotation.
inline epialign::Similarity3 HornSimilarity(const std::vector<Eigen::Vector3d>& src,
                                            const std::vector<Eigen::Vector3d>& dst) {
  const std::size_t n = src.size();
  Eigen::Vector3d ms = Eigen::Vector3d::Zero(), md = Eigen::Vector3d::Zero();
  for (std::size_t k = 0; k < n; ++k) {
    ms += src[k];
    md += dst[k];
  }
  ms /= double(n);
  md /= double(n);
  Eigen::Matrix3d S = Eigen::Matrix3d::Zero();
  double ss = 0;
  for (std::size_t k = 0; k < n; ++k) {
    S += (src[k] - ms) * (dst[k] - md).transpose();
    ss += (src[k] - ms).squaredNorm();
  }
  const double Sxx = S(0, 0), Sxy = S(0, 1), Sxz = S(0, 2), Syx = S(1, 0), Syy = S(1, 1),
               Syz = S(1, 2), Szx = S(2, 0), Szy = S(2, 1), Szz = S(2, 2);
  Eigen::Matrix4d N;
  N << Sxx + Syy + Szz, Syz - Szy, Szx - Sxz, Sxy - Syx,
      Syz - Szy, Sxx - Syy - Szz, Sxy + Syx, Szx + Sxz,
      Szx - Sxz, Sxy + Syx, -Sxx + Syy - Szz, Syz + Szy,
      Sxy - Syx, Szx + Sxz, Syz + Szy, -Sxx - Syy + Szz;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(N);
  const Eigen::Vector4d q = eig.eigenvectors().col(3);
  const Eigen::Quaterniond quat(q[0], q[1], q[2], q[3]);
  epialign::Similarity3 sim;
  sim.rotation = quat.normalized().toRotationMatrix();
  double num = 0;
  for (std::size_t k = 0; k < n; ++k) {
    num += (dst[k] - md).dot(sim.rotation * (src[k] - ms));
  }
  sim.scale = num / ss;
  sim.translation = md - sim.scale * sim.rotation * ms;
  return sim;
}

// (1/T) * integral over [0, T] of the fraction of errors below tau, by the
// midpoint rule.
inline double NumericAuc(const std::vector<double>& errors, double threshold,
                         int steps = 200000) {
  long double area = 0;
  for (int s = 0; s < steps; ++s) {
    const double tau = (s + 0.5) * threshold / steps;
    std::size_t below = 0;
    for (double e : errors) below += e < tau;
    area += static_cast<long double>(below) / errors.size();
  }
  return static_cast<double>(area / steps);
}

// Quaternion (w, x, y, z) to rotation matrix, written out term by term.
inline Eigen::Matrix3d QuaternionMatrix(double w, double x, double y, double z) {
  Eigen::Matrix3d R;
  R << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return R;
}

inline Eigen::Matrix3d RandomRotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  return q.normalized().toRotationMatrix();
}

}  // namespace oracle

#endif  // EPIALIGN_TESTS_ORACLES_HPP_
