#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "lockbox/core/lockbox.hpp"
#include "lockbox/sim/control.hpp"

namespace lockbox::planner {

struct JointFeatures {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  int kind = 0;  // 1 prismatic, -1 revolute, 0 unknown
};

// What the solver can observe and do. Joints are addressed by their index in
// joints(); every try_manipulate costs exactly one step.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual const std::vector<std::string>& joints() const = 0;
  virtual std::size_t target() const = 0;
  virtual bool try_manipulate(std::size_t joint) = 0;
  virtual bool solved() const = 0;
  virtual JointFeatures features(std::size_t joint) const = 0;
  virtual int steps() const = 0;
  // Binary joint states as observed at the ends of travel.
  virtual const LockboxState& state() const = 0;
};

// When the joint type of a symbolic joint becomes observable: as with a real
// trajectory, only after the joint has been moved once, or from the start.
enum class KindVisibility { after_first_move, always };

// Direct lockbox-core semantics; joint kinds are taken from the LockboxSpec.
class SymbolicEnvironment : public Environment {
 public:
  explicit SymbolicEnvironment(LockboxSpec spec,
                               KindVisibility kinds = KindVisibility::after_first_move);

  const std::vector<std::string>& joints() const override { return ids_; }
  std::size_t target() const override { return target_; }
  bool try_manipulate(std::size_t joint) override;
  bool solved() const override { return is_solved(spec_, state_); }
  JointFeatures features(std::size_t joint) const override;
  int steps() const override { return static_cast<int>(state_.step_count); }

  const LockboxSpec& spec() const { return spec_; }
  const LockboxState& state() const override { return state_; }

 private:
  LockboxSpec spec_;
  std::vector<std::string> ids_;
  std::size_t target_;
  LockboxState state_;
  KindVisibility kinds_;
  std::vector<bool> moved_once_;
};

// Learned manipulation model of one joint.
struct CacheEntry {
  sim::EETrajectory trajectory;  // recorded while leaving `from_state`
  int from_state = 0;
  Eigen::Vector3d direction = Eigen::Vector3d::Zero();  // initial admissible direction
  int kind = 0;                                         // classifier output
};

// Entries exist only for joints that were moved at least once.
class ManipulationCache {
 public:
  const CacheEntry* find(std::size_t joint) const;
  void store(std::size_t joint, CacheEntry entry) { entries_[joint] = std::move(entry); }
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::size_t, CacheEntry> entries_;
};

struct KinematicStats {
  int probes = 0;        // wiggle probe motions executed
  int cache_hits = 0;
  int follow_failures = 0;
  int ticks = 0;         // control cycles simulated
};

// Every joint is a simulated mechanism driven through the wrench-gated
// controller. The locking logic still comes from lockbox-core; a joint's
// binary state flips only when the controller carries it to the other end.
class KinematicEnvironment : public Environment {
 public:
  // Throws std::invalid_argument when a joint has no mechanism geometry.
  KinematicEnvironment(LockboxSpec spec, sim::ControlParams params, std::uint64_t seed,
                       bool reuse_models = true);

  const std::vector<std::string>& joints() const override { return ids_; }
  std::size_t target() const override { return target_; }
  // With model reuse, a joint moved before is driven by replaying its stored
  // trajectory (reversed for the opposite transition) without probing. Other
  // joints are wiggled, followed along the admissible direction and cached.
  // A failed replay leaves the cache entry in place.
  bool try_manipulate(std::size_t joint) override;
  bool solved() const override { return is_solved(spec_, state_); }
  // Handle position plus the joint type estimated from its trajectory; the
  // type stays 0 until the joint has been moved.
  JointFeatures features(std::size_t joint) const override;
  int steps() const override { return static_cast<int>(state_.step_count); }

  const LockboxState& state() const override { return state_; }
  const ManipulationCache& cache() const { return cache_; }
  const KinematicStats& stats() const { return stats_; }
  const sim::JointMechanism& mechanism(std::size_t joint) const { return mechanisms_[joint]; }
  // Force/position trace of every control cycle so far.
  const std::vector<sim::TraceSample>& trace() const { return trace_; }
  void record_trace(bool on) { record_trace_ = on; }

 private:
  bool explore(std::size_t joint, bool locked);
  bool replay(std::size_t joint, bool locked, const CacheEntry& entry);
  bool at_end(std::size_t joint, int state) const;

  LockboxSpec spec_;
  std::vector<std::string> ids_;
  std::size_t target_;
  LockboxState state_;
  std::vector<sim::JointMechanism> mechanisms_;
  sim::ControlParams params_;
  std::mt19937_64 rng_;
  bool reuse_models_;
  bool record_trace_ = false;
  ManipulationCache cache_;
  KinematicStats stats_;
  std::vector<sim::TraceSample> trace_;
};

}  // namespace lockbox::planner
