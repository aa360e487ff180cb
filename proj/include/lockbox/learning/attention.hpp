#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <string>

#include <Eigen/Core>

#include "lockbox/core/lockbox.hpp"

namespace lockbox::learning {

// (|dx|, |dy|, |dz|, dk, 1) between the last attempted joint and a candidate.
using FeatureVec = Eigen::Matrix<double, 5, 1>;

// dk is signed: k_last - k_candidate.
FeatureVec attention_features(const Eigen::Vector3d& last_position, int last_kind,
                              const Eigen::Vector3d& candidate_position, int candidate_kind);

// Same, from a spec's handle positions and declared joint kinds. Throws
// std::invalid_argument for unknown ids.
FeatureVec attention_features(const LockboxSpec& spec, const std::string& last,
                              const std::string& candidate);

struct TrialSample {
  FeatureVec features = FeatureVec::Zero();
  int label = 1;  // +1 moved, -1 did not
};

// Closed-form ridge regression (X^T X + lambda I) w = X^T y; the bias column
// is regularized like the others. Throws std::invalid_argument when empty or
// when a label is not +-1.
FeatureVec ridge_fit(std::span<const TrialSample> samples, double lambda);

// Online ridge model over a sliding window of the most recent trials.
class AttentionModel {
 public:
  explicit AttentionModel(double lambda = 1.0, std::size_t window = 5);

  // Pushes the sample (evicting the oldest beyond the window) and refits.
  void update(const TrialSample& sample);
  double score(const FeatureVec& features) const { return weights_.dot(features); }

  const FeatureVec& weights() const { return weights_; }
  const std::deque<TrialSample>& window() const { return window_; }
  bool fitted() const { return !window_.empty(); }
  double lambda() const { return lambda_; }

 private:
  double lambda_;
  std::size_t capacity_;
  std::deque<TrialSample> window_;
  FeatureVec weights_ = FeatureVec::Zero();
};

}  // namespace lockbox::learning
