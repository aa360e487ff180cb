#include "lockbox/learning/qnetwork.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lockbox::learning {

namespace {

constexpr const char* kFormat = "lockbox-qnet-v1";

void append(Eigen::VectorXd& flat, std::size_t& at, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) flat[static_cast<Eigen::Index>(at++)] = m(r, c);
  }
}

void extract(const Eigen::VectorXd& flat, std::size_t& at, Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = flat[static_cast<Eigen::Index>(at++)];
  }
}

}  // namespace

QNetwork::QNetwork(std::size_t n_joints, std::size_t hidden) {
  if (n_joints == 0 || hidden == 0) throw std::invalid_argument("network sizes must be positive");
  const auto n = static_cast<Eigen::Index>(n_joints);
  const auto h = static_cast<Eigen::Index>(hidden);
  w1_ = Eigen::MatrixXd::Zero(h, 2 * n);
  b1_ = Eigen::VectorXd::Zero(h);
  w2_ = Eigen::MatrixXd::Zero(n, h);
  b2_ = Eigen::VectorXd::Zero(n);
}

void QNetwork::randomize(std::mt19937_64& rng) {
  auto fill = [&](Eigen::MatrixXd& m) {
    const double bound = std::sqrt(6.0 / static_cast<double>(m.cols()));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = u(rng);
    }
  };
  fill(w1_);
  fill(w2_);
  b1_.setZero();
  b2_.setZero();
}

Eigen::VectorXd QNetwork::forward(const Eigen::VectorXd& input) const {
  if (static_cast<std::size_t>(input.size()) != input_size()) {
    throw std::invalid_argument("network input has length " + std::to_string(input.size()) +
                                ", expected " + std::to_string(input_size()));
  }
  const Eigen::VectorXd h = (w1_ * input + b1_).cwiseMax(0.0);
  return w2_ * h + b2_;
}

Eigen::MatrixXd QNetwork::forward_batch(const Eigen::MatrixXd& inputs) const {
  if (static_cast<std::size_t>(inputs.rows()) != input_size()) {
    throw std::invalid_argument("network batch has the wrong input length");
  }
  const Eigen::MatrixXd h = ((w1_ * inputs).colwise() + b1_).cwiseMax(0.0);
  return (w2_ * h).colwise() + b2_;
}

void QNetwork::check_batch(std::span<const QSample> batch) const {
  if (batch.empty()) throw std::invalid_argument("empty training batch");
  for (const auto& s : batch) {
    if (static_cast<std::size_t>(s.input.size()) != input_size()) {
      throw std::invalid_argument("training sample has the wrong input length");
    }
    if (s.action >= joints()) throw std::invalid_argument("training action out of range");
  }
}

double QNetwork::loss(std::span<const QSample> batch) const {
  check_batch(batch);
  double total = 0.0;
  for (const auto& s : batch) {
    const double e = forward(s.input)[static_cast<Eigen::Index>(s.action)] - s.target;
    total += 0.5 * e * e;
  }
  return total / static_cast<double>(batch.size());
}

double QNetwork::loss_and_gradient(std::span<const QSample> batch,
                                   Eigen::VectorXd& gradient) const {
  check_batch(batch);
  const auto count = static_cast<Eigen::Index>(batch.size());
  Eigen::MatrixXd x(static_cast<Eigen::Index>(input_size()), count);
  for (Eigen::Index i = 0; i < count; ++i) x.col(i) = batch[static_cast<std::size_t>(i)].input;
  const Eigen::MatrixXd z = (w1_ * x).colwise() + b1_;
  const Eigen::MatrixXd h = z.cwiseMax(0.0);
  const Eigen::MatrixXd q = (w2_ * h).colwise() + b2_;

  // dL/dq is nonzero only at the trained action of each column
  Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(q.rows(), count);
  double total = 0.0;
  const double inv = 1.0 / static_cast<double>(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto& s = batch[static_cast<std::size_t>(i)];
    const auto a = static_cast<Eigen::Index>(s.action);
    const double e = q(a, i) - s.target;
    total += 0.5 * e * e;
    dq(a, i) = e * inv;
  }
  const Eigen::MatrixXd dw2 = dq * h.transpose();
  const Eigen::VectorXd db2 = dq.rowwise().sum();
  const Eigen::MatrixXd dz = (w2_.transpose() * dq).cwiseProduct((z.array() > 0.0).cast<double>().matrix());
  const Eigen::MatrixXd dw1 = dz * x.transpose();
  const Eigen::VectorXd db1 = dz.rowwise().sum();

  gradient.resize(static_cast<Eigen::Index>(parameter_count()));
  std::size_t at = 0;
  append(gradient, at, dw1);
  append(gradient, at, db1);
  append(gradient, at, dw2);
  append(gradient, at, db2);
  return total * inv;
}

std::size_t QNetwork::parameter_count() const {
  return static_cast<std::size_t>(w1_.size() + b1_.size() + w2_.size() + b2_.size());
}

Eigen::VectorXd QNetwork::parameters() const {
  Eigen::VectorXd flat(static_cast<Eigen::Index>(parameter_count()));
  std::size_t at = 0;
  append(flat, at, w1_);
  append(flat, at, b1_);
  append(flat, at, w2_);
  append(flat, at, b2_);
  return flat;
}

void QNetwork::set_parameters(const Eigen::VectorXd& flat) {
  if (static_cast<std::size_t>(flat.size()) != parameter_count()) {
    throw std::invalid_argument("parameter vector has the wrong length");
  }
  std::size_t at = 0;
  Eigen::MatrixXd b1 = b1_;
  Eigen::MatrixXd b2 = b2_;
  extract(flat, at, w1_);
  extract(flat, at, b1);
  extract(flat, at, w2_);
  extract(flat, at, b2);
  b1_ = b1;
  b2_ = b2;
}

AdamOptimizer::AdamOptimizer(double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
}

void AdamOptimizer::step(QNetwork& net, const Eigen::VectorXd& gradient) {
  if (m_.size() != gradient.size()) {
    m_ = Eigen::VectorXd::Zero(gradient.size());
    v_ = Eigen::VectorXd::Zero(gradient.size());
    t_ = 0;
  }
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * gradient;
  v_ = beta2_ * v_ + (1.0 - beta2_) * gradient.cwiseAbs2();
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  const Eigen::VectorXd update =
      (lr_ / c1) * m_.array() / ((v_.array() / c2).sqrt() + eps_);
  net.set_parameters(net.parameters() - update);
}

nlohmann::json to_json(const QNetwork& net) {
  auto layer = [](const Eigen::MatrixXd& w, const Eigen::VectorXd& b) {
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(w.size()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) values.push_back(w(r, c));
    }
    return nlohmann::json{{"shape", {w.rows(), w.cols()}},
                          {"weights", values},
                          {"bias", std::vector<double>(b.data(), b.data() + b.size())}};
  };
  return {{"format", kFormat},
          {"n_joints", net.joints()},
          {"hidden", net.hidden()},
          {"layers", {layer(net.w1(), net.b1()), layer(net.w2(), net.b2())}}};
}

QNetwork qnetwork_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format").get<std::string>() != kFormat) {
      throw std::invalid_argument("unknown network manifest format");
    }
    QNetwork net(doc.at("n_joints").get<std::size_t>(), doc.at("hidden").get<std::size_t>());
    const auto& layers = doc.at("layers");
    if (layers.size() != 2) throw std::invalid_argument("network manifest needs two layers");
    Eigen::VectorXd flat(static_cast<Eigen::Index>(net.parameter_count()));
    Eigen::Index at = 0;
    const std::size_t rows[2] = {net.hidden(), net.joints()};
    const std::size_t cols[2] = {net.input_size(), net.hidden()};
    for (std::size_t l = 0; l < 2; ++l) {
      const auto shape = layers[l].at("shape").get<std::vector<std::size_t>>();
      const auto w = layers[l].at("weights").get<std::vector<double>>();
      const auto b = layers[l].at("bias").get<std::vector<double>>();
      if (shape != std::vector<std::size_t>{rows[l], cols[l]} || w.size() != rows[l] * cols[l] ||
          b.size() != rows[l]) {
        throw std::invalid_argument("network manifest layer " + std::to_string(l) +
                                    " has inconsistent shape");
      }
      for (double v : w) flat[at++] = v;
      for (double v : b) flat[at++] = v;
    }
    net.set_parameters(flat);
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed network manifest: ") + e.what());
  }
}

}  // namespace lockbox::learning
