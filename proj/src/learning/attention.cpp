#include "lockbox/learning/attention.hpp"

#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/QR>

namespace lockbox::learning {

FeatureVec attention_features(const Eigen::Vector3d& last_position, int last_kind,
                              const Eigen::Vector3d& candidate_position, int candidate_kind) {
  FeatureVec f;
  f.head<3>() = (last_position - candidate_position).cwiseAbs();
  f[3] = static_cast<double>(last_kind - candidate_kind);
  f[4] = 1.0;
  return f;
}

FeatureVec attention_features(const LockboxSpec& spec, const std::string& last,
                              const std::string& candidate) {
  const auto& a = spec.joints[spec.index_of(last)];
  const auto& b = spec.joints[spec.index_of(candidate)];
  return attention_features(a.handle_position, kind_code(a.kind), b.handle_position,
                            kind_code(b.kind));
}

FeatureVec ridge_fit(std::span<const TrialSample> samples, double lambda) {
  if (samples.empty()) throw std::invalid_argument("ridge_fit needs at least one sample");
  if (!(lambda >= 0.0)) throw std::invalid_argument("ridge lambda must be non-negative");
  Eigen::Matrix<double, 5, 5> gram = lambda * Eigen::Matrix<double, 5, 5>::Identity();
  FeatureVec rhs = FeatureVec::Zero();
  for (const auto& s : samples) {
    if (s.label != 1 && s.label != -1) throw std::invalid_argument("labels must be +1 or -1");
    gram += s.features * s.features.transpose();
    rhs += static_cast<double>(s.label) * s.features;
  }
  if (lambda > 0.0) return gram.llt().solve(rhs);
  // unregularized: least-norm solution of the normal equations
  return gram.completeOrthogonalDecomposition().solve(rhs);
}

AttentionModel::AttentionModel(double lambda, std::size_t window)
    : lambda_(lambda), capacity_(window) {
  if (!(lambda > 0.0)) throw std::invalid_argument("attention lambda must be positive");
  if (window == 0) throw std::invalid_argument("attention window must be positive");
}

void AttentionModel::update(const TrialSample& sample) {
  window_.push_back(sample);
  if (window_.size() > capacity_) window_.pop_front();
  const std::vector<TrialSample> rows(window_.begin(), window_.end());
  weights_ = ridge_fit(rows, lambda_);
}

}  // namespace lockbox::learning
