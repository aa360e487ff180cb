#pragma once

#include <cstddef>
#include <random>
#include <span>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace lockbox::learning {

// One regression row for the Q head: only output `action` is trained
// towards `target`.
struct QSample {
  Eigen::VectorXd input;
  std::size_t action = 0;
  double target = 0.0;
};

// Fully connected 2N -> hidden -> N network with a ReLU hidden layer.
class QNetwork {
 public:
  // All weights and biases zero.
  explicit QNetwork(std::size_t n_joints, std::size_t hidden = 64);

  // He-uniform weights, zero biases.
  void randomize(std::mt19937_64& rng);

  std::size_t joints() const { return static_cast<std::size_t>(w2_.rows()); }
  std::size_t input_size() const { return static_cast<std::size_t>(w1_.cols()); }
  std::size_t hidden() const { return static_cast<std::size_t>(w1_.rows()); }

  // Throws std::invalid_argument on a wrong input length.
  Eigen::VectorXd forward(const Eigen::VectorXd& input) const;
  // Column-wise forward pass of a batch (input_size x B).
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs) const;

  // 0.5 * mean squared error between Q(input, action) and target.
  double loss(std::span<const QSample> batch) const;
  // Same loss; fills `gradient` in parameters() order.
  double loss_and_gradient(std::span<const QSample> batch, Eigen::VectorXd& gradient) const;

  // Flattened W1, b1, W2, b2 (matrices row-major).
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& flat);
  std::size_t parameter_count() const;

  const Eigen::MatrixXd& w1() const { return w1_; }
  const Eigen::VectorXd& b1() const { return b1_; }
  const Eigen::MatrixXd& w2() const { return w2_; }
  const Eigen::VectorXd& b2() const { return b2_; }
  Eigen::VectorXd& b2() { return b2_; }

 private:
  void check_batch(std::span<const QSample> batch) const;

  Eigen::MatrixXd w1_;
  Eigen::VectorXd b1_;
  Eigen::MatrixXd w2_;
  Eigen::VectorXd b2_;
};

// Adam over the flattened parameter vector.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(double learning_rate = 1e-3, double beta1 = 0.9, double beta2 = 0.999,
                         double epsilon = 1e-8);
  void step(QNetwork& net, const Eigen::VectorXd& gradient);
  double learning_rate() const { return lr_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  Eigen::VectorXd m_, v_;
};

// Weight manifest: {"format", "n_joints", "hidden", "layers": [{"shape": [rows, cols],
// "weights": row-major values, "bias": values}, ...]}.
nlohmann::json to_json(const QNetwork& net);
// Throws std::invalid_argument on a malformed manifest.
QNetwork qnetwork_from_json(const nlohmann::json& doc);

}  // namespace lockbox::learning
