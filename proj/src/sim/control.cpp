#include "lockbox/sim/control.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace lockbox::sim {

RigidPose wrench_gated_interpolate(const RigidPose& prev, const RigidPose& goal,
                                   const Wrench& observed, const Vector6d& twist_limit,
                                   const Vector6d& wrench_limit, double dt) {
  if ((twist_limit.array() <= 0.0).any() || (wrench_limit.array() <= 0.0).any()) {
    throw std::invalid_argument("twist and wrench limits must be positive");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("control period must be positive");
  const Vector6d step_limit = twist_limit * dt;
  const Twist delta = se3_log(prev, goal).cwiseMax(-step_limit).cwiseMin(step_limit);
  const Vector6d margin = wrench_limit - observed.cwiseAbs();
  Twist gated;
  for (int i = 0; i < 6; ++i) {
    const double smooth = std::tanh(std::abs(margin[i]));
    if (margin[i] > 0.0) {
      gated[i] = smooth * delta[i];
    } else {
      const double sign = observed[i] > 0.0 ? 1.0 : (observed[i] < 0.0 ? -1.0 : 0.0);
      gated[i] = sign * smooth * step_limit[i];
    }
  }
  return se3_exp(prev, gated);
}

EETrajectory EETrajectory::reversed() const {
  EETrajectory out;
  const double end = stamps.empty() ? 0.0 : stamps.back();
  for (std::size_t i = positions.size(); i-- > 0;) out.push(end - stamps[i], positions[i]);
  return out;
}

GatedController::GatedController(JointMechanism& mech, bool locked, const ControlParams& params,
                                 std::vector<TraceSample>* trace)
    : mech_(mech), locked_(locked), params_(params), trace_(trace) {
  if (trace_ != nullptr && !trace_->empty()) time_ = trace_->back().t;
  reset();
}

void GatedController::reset() {
  commanded_ = mech_.ee_pose();
  last_ = StepResult{mech_.q, commanded_, Wrench::Zero()};
}

const StepResult& GatedController::tick(const RigidPose& goal) {
  commanded_ = wrench_gated_interpolate(commanded_, goal, last_.wrench, params_.twist_limit,
                                        params_.wrench_limit, params_.dt);
  last_ = simulate_step(mech_, locked_, commanded_);
  time_ += params_.dt;
  ++ticks_;
  const double excess = (last_.wrench.cwiseAbs() - params_.wrench_limit).maxCoeff();
  worst_excess_ = std::max(worst_excess_, excess);
  if (trace_ != nullptr) trace_->push_back({time_, last_.achieved.translation, last_.wrench});
  return last_;
}

WiggleResult wiggle(JointMechanism& mech, bool locked, const ControlParams& params,
                    std::vector<TraceSample>* trace) {
  if (!(params.wiggle_amplitude > 0.0)) throw std::invalid_argument("wiggle amplitude must be > 0");
  const double q0 = mech.q;
  GatedController ctl(mech, locked, params, trace);
  const RigidPose start = ctl.commanded();
  const double min_speed = params.twist_limit.tail<3>().minCoeff() * params.dt;
  const int leg_ticks = 2 * static_cast<int>(std::ceil(params.wiggle_amplitude / min_speed)) + 10;

  WiggleResult result;
  for (int axis = 0; axis < 3; ++axis) {
    for (double sign : {1.0, -1.0}) {
      ctl.reset();
      const RigidPose goal =
          start * RigidPose::from_translation(sign * params.wiggle_amplitude *
                                              Eigen::Vector3d::Unit(axis));
      for (int i = 0; i < leg_ticks; ++i) {
        ctl.tick(goal);
        if (se3_log(ctl.commanded(), goal).norm() < 1e-9) break;
      }
      const Eigen::Vector3d moved = ctl.last().achieved.translation - start.translation;
      if (moved.norm() > result.best_displacement.norm()) result.best_displacement = moved;
      for (int i = 0; i < leg_ticks; ++i) ctl.tick(start);
      mech.q = q0;
      ++result.probes;
    }
  }
  ctl.reset();
  result.movable = result.best_displacement.norm() > params.move_threshold;
  return result;
}

namespace {

// Shared termination logic of the follow and replay loops.
class ProgressMonitor {
 public:
  ProgressMonitor(const ControlParams& params, const Eigen::Vector3d& start)
      : params_(params), start_(start) {}

  enum class Verdict { running, arrived, stalled };

  Verdict update(const StepResult& step) {
    const Eigen::Vector3d& p = step.achieved.translation;
    window_.push_back(p);
    if (static_cast<int>(window_.size()) > params_.progress_window + 1) window_.pop_front();
    if (static_cast<int>(window_.size()) <= params_.progress_window) return Verdict::running;
    const double progress = (window_.back() - window_.front()).norm();
    const bool at_limit =
        (step.wrench.cwiseAbs().array() >= params_.limit_fraction * params_.wrench_limit.array())
            .any();
    if (progress >= params_.progress_epsilon || !at_limit) return Verdict::running;
    return (p - start_).norm() >= params_.move_threshold ? Verdict::arrived : Verdict::stalled;
  }

 private:
  const ControlParams& params_;
  Eigen::Vector3d start_;
  std::deque<Eigen::Vector3d> window_;
};

bool lost_contact(const StepResult& step, const RigidPose& commanded, double tolerance) {
  return (commanded.translation - step.achieved.translation).norm() > tolerance;
}

constexpr double kSampleSpacing = 1e-4;

}  // namespace

FollowResult follow_admissible_direction(JointMechanism& mech, bool locked,
                                         const Eigen::Vector3d& initial_displacement,
                                         const ControlParams& params, std::mt19937_64& rng,
                                         std::vector<TraceSample>* trace) {
  FollowResult result;
  if (initial_displacement.norm() < 1e-12) {
    result.failure = "no initial direction";
    return result;
  }
  GatedController ctl(mech, locked, params, trace);
  std::normal_distribution<double> noise(0.0, 1.0);
  Eigen::Vector3d direction = initial_displacement.normalized();
  const Eigen::Vector3d start = ctl.last().achieved.translation;
  result.trajectory.push(ctl.time(), start);
  ProgressMonitor monitor(params, start);
  Eigen::Vector3d previous = start;
  Eigen::Vector3d since_update = Eigen::Vector3d::Zero();

  for (int it = 0; it < params.max_iters; ++it) {
    const RigidPose& achieved = ctl.last().achieved;
    const RigidPose goal{achieved.rotation, achieved.translation + params.lookahead * direction};
    const StepResult& step = ctl.tick(goal);
    result.iterations = it + 1;
    result.worst_excess = ctl.worst_excess();
    if (lost_contact(step, ctl.commanded(), params.grasp_tolerance)) {
      result.failure = "contact lost";
      return result;
    }
    const Eigen::Vector3d& p = step.achieved.translation;
    since_update += p - previous;
    previous = p;
    if (since_update.norm() >= params.direction_update) {
      Eigen::Vector3d observed = since_update;
      if (params.direction_noise > 0.0) {
        for (int i = 0; i < 3; ++i) observed[i] += params.direction_noise * noise(rng);
      }
      if (observed.norm() > 1e-12) direction = observed.normalized();
      since_update.setZero();
    }
    if ((p - result.trajectory.positions.back()).norm() >= kSampleSpacing) {
      result.trajectory.push(ctl.time(), p);
    }
    switch (monitor.update(step)) {
      case ProgressMonitor::Verdict::arrived:
        result.success = true;
        return result;
      case ProgressMonitor::Verdict::stalled:
        result.failure = "no progress";
        return result;
      case ProgressMonitor::Verdict::running:
        break;
    }
  }
  result.failure = "max iterations";
  return result;
}

FollowResult replay_trajectory(JointMechanism& mech, bool locked, const EETrajectory& path,
                               const ControlParams& params, std::vector<TraceSample>* trace) {
  FollowResult result;
  if (path.size() < 2) {
    result.failure = "trajectory too short";
    return result;
  }
  GatedController ctl(mech, locked, params, trace);
  const Eigen::Vector3d start = ctl.last().achieved.translation;
  result.trajectory.push(ctl.time(), start);
  ProgressMonitor monitor(params, start);
  const auto& points = path.positions;
  const std::size_t last = points.size() - 1;
  Eigen::Vector3d end_direction = points[last] - points[last - 1];
  for (std::size_t i = last; end_direction.norm() < 1e-9 && i-- > 0;) {
    end_direction = points[last] - points[i];
  }
  end_direction.normalize();

  std::size_t index = 0;
  for (int it = 0; it < params.max_iters; ++it) {
    const RigidPose& achieved = ctl.last().achieved;
    while (index < last && (points[index] - achieved.translation).norm() < params.lookahead) {
      ++index;
    }
    Eigen::Vector3d target = points[index];
    if (index == last) target += params.lookahead * end_direction;
    const StepResult& step = ctl.tick(RigidPose{achieved.rotation, target});
    result.iterations = it + 1;
    result.worst_excess = ctl.worst_excess();
    if (lost_contact(step, ctl.commanded(), params.grasp_tolerance)) {
      result.failure = "contact lost";
      return result;
    }
    const Eigen::Vector3d& p = step.achieved.translation;
    if ((p - result.trajectory.positions.back()).norm() >= kSampleSpacing) {
      result.trajectory.push(ctl.time(), p);
    }
    switch (monitor.update(step)) {
      case ProgressMonitor::Verdict::arrived:
        result.success = true;
        return result;
      case ProgressMonitor::Verdict::stalled:
        result.failure = "no progress";
        return result;
      case ProgressMonitor::Verdict::running:
        break;
    }
  }
  result.failure = "max iterations";
  return result;
}

Eigen::Vector3d normalized_spectrum(const std::vector<Eigen::Vector3d>& points) {
  if (points.empty()) return Eigen::Vector3d::Zero();
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : points) cov += (p - mean) * (p - mean).transpose();
  cov /= static_cast<double>(points.size());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  Eigen::Vector3d ev = solver.eigenvalues().cwiseMax(0.0).reverse();  // descending
  const double total = ev.sum();
  if (total <= 1e-18) return Eigen::Vector3d::Zero();
  return ev / total;
}

int classify_joint_type(const EETrajectory& trajectory, double alpha) {
  const auto& points = trajectory.positions;
  if (points.size() < 3) return 0;
  std::size_t distinct = 1;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if ((points[i] - points[0]).norm() > 1e-12) ++distinct;
  }
  if (distinct < 3) return 0;
  const Eigen::Vector3d spectrum = normalized_spectrum(points);
  if (spectrum.sum() == 0.0) return 0;
  if (spectrum[0] > 1.0 - alpha) return 1;
  if (spectrum[2] < alpha && alpha < spectrum[1]) return -1;
  return 0;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceSample>& trace) {
  out << "t,x,y,z,fx,fy,fz,tx,ty,tz\n";
  for (const auto& s : trace) {
    out << s.t << ',' << s.position.x() << ',' << s.position.y() << ',' << s.position.z() << ','
        << s.wrench[3] << ',' << s.wrench[4] << ',' << s.wrench[5] << ',' << s.wrench[0] << ','
        << s.wrench[1] << ',' << s.wrench[2] << '\n';
  }
}

}  // namespace lockbox::sim
