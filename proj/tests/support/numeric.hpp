#pragma once

// Numerical oracles and geometry samplers shared by unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "lockbox/learning/attention.hpp"
#include "lockbox/learning/qnetwork.hpp"
#include "lockbox/sim/control.hpp"
#include "lockbox/sim/se3.hpp"

namespace lockbox::testing {

// Gaussian elimination with partial pivoting on the normal equations; kept
// independent of Eigen's decompositions.
inline learning::FeatureVec dense_ridge_oracle(const std::vector<learning::TrialSample>& samples,
                                               double lambda) {
  double a[5][6] = {};
  for (int i = 0; i < 5; ++i) a[i][i] = lambda;
  for (const auto& s : samples) {
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) a[i][j] += s.features[i] * s.features[j];
      a[i][5] += s.label * s.features[i];
    }
  }
  for (int c = 0; c < 5; ++c) {
    int p = c;
    for (int r = c + 1; r < 5; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    }
    std::swap(a[c], a[p]);
    for (int r = 0; r < 5; ++r) {
      if (r == c) continue;
      const double m = a[r][c] / a[c][c];
      for (int k = c; k < 6; ++k) a[r][k] -= m * a[c][k];
    }
  }
  learning::FeatureVec w;
  for (int i = 0; i < 5; ++i) w[i] = a[i][5] / a[i][i];
  return w;
}

inline Eigen::VectorXd random_input(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd x(static_cast<Eigen::Index>(2 * n));
  for (auto& v : x) v = u(rng);
  return x;
}

// |analytic - central difference| / max norm over all parameters.
inline double relative_gradient_error(const learning::QNetwork& net,
                                      const std::vector<learning::QSample>& batch) {
  Eigen::VectorXd analytic;
  net.loss_and_gradient(batch, analytic);
  const Eigen::VectorXd p = net.parameters();
  Eigen::VectorXd numeric(p.size());
  learning::QNetwork probe = net;
  const double h = 1e-6;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    Eigen::VectorXd q = p;
    q[i] += h;
    probe.set_parameters(q);
    const double up = probe.loss(batch);
    q[i] -= 2 * h;
    probe.set_parameters(q);
    const double down = probe.loss(batch);
    numeric[i] = (up - down) / (2 * h);
  }
  const double scale = std::max({analytic.norm(), numeric.norm(), 1e-12});
  return (analytic - numeric).norm() / scale;
}

inline sim::RigidPose random_pose(std::mt19937_64& rng, double max_angle = 3.0) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, max_angle);
  const Eigen::Vector3d axis = Eigen::Vector3d(n(rng), n(rng), n(rng)).normalized();
  return {sim::so3_exp(axis * angle(rng)), Eigen::Vector3d(n(rng), n(rng), n(rng)) * 0.3};
}

inline double pose_error(const sim::RigidPose& a, const sim::RigidPose& b) {
  return std::max((a.rotation - b.rotation).cwiseAbs().maxCoeff(),
                  (a.translation - b.translation).cwiseAbs().maxCoeff());
}

inline sim::EETrajectory line(const Eigen::Vector3d& from, const Eigen::Vector3d& to,
                              int samples) {
  sim::EETrajectory t;
  for (int i = 0; i < samples; ++i) {
    const double s = static_cast<double>(i) / (samples - 1);
    t.push(s, from + s * (to - from));
  }
  return t;
}

inline sim::EETrajectory arc(double radius, double sweep, int samples) {
  sim::EETrajectory t;
  for (int i = 0; i < samples; ++i) {
    const double a = sweep * i / (samples - 1);
    t.push(a, {radius * std::cos(a), radius * std::sin(a), 0.0});
  }
  return t;
}

}  // namespace lockbox::testing
