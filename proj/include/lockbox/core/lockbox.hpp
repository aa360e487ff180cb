#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace lockbox {

enum class JointKind { prismatic, revolute };

// Kinematic type code used by the attention features: 1 prismatic, -1 revolute.
int kind_code(JointKind kind);
std::string to_string(JointKind kind);
JointKind joint_kind_from_string(const std::string& s);

// Geometry of the physical mechanism behind a joint. Only needed by the
// kinematic simulation; symbolic configs may omit it.
struct MechanismGeometry {
  Eigen::Vector3d axis = Eigen::Vector3d::UnitX();
  double range = 0.1;    // q_max, meters or radians
  double radius = 0.15;  // lever arm from rotation center to handle (revolute)
};

struct JointSpec {
  std::string id;
  JointKind kind = JointKind::prismatic;
  Eigen::Vector3d handle_position = Eigen::Vector3d::Zero();
  int initial_state = 0;
  std::optional<MechanismGeometry> mechanism;
};

// locker must be in required_state for locked to move.
struct DependencyEdge {
  std::string locker;
  std::string locked;
  int required_state = 1;
};

struct LockboxSpec {
  std::string name;
  std::vector<JointSpec> joints;
  std::vector<DependencyEdge> edges;
  std::string target;
  int goal_state = 1;

  std::size_t size() const { return joints.size(); }
  // Throws std::invalid_argument for an unknown id.
  std::size_t index_of(const std::string& id) const;
  std::size_t target_index() const { return index_of(target); }
};

struct LockboxState {
  std::vector<std::uint8_t> bits;
  std::optional<std::size_t> last_manipulated;
  std::size_t step_count = 0;

  bool operator==(const LockboxState&) const = default;
};

struct Violation {
  std::string kind;  // "cycle", "duplicate id", "unknown endpoint", ...
  std::string detail;
};

std::vector<Violation> validate(const LockboxSpec& spec);

LockboxState initial_state(const LockboxSpec& spec);

bool is_unlocked(const LockboxSpec& spec, const LockboxState& state, std::size_t joint);
bool is_unlocked(const LockboxSpec& spec, const LockboxState& state, const std::string& joint);

struct ManipulationOutcome {
  LockboxState state;
  bool moved = false;
};

ManipulationOutcome manipulate(const LockboxSpec& spec, const LockboxState& state,
                               std::size_t joint);
ManipulationOutcome manipulate(const LockboxSpec& spec, const LockboxState& state,
                               const std::string& joint);

bool is_solved(const LockboxSpec& spec, const LockboxState& state);

// Compiled form of the dependency graph over bitmask states. Joint j is
// unlocked in mask s iff (s & lock_mask[j]) == lock_value[j].
class LockTable {
 public:
  static constexpr std::size_t kMaxJoints = 24;

  explicit LockTable(const LockboxSpec& spec);

  std::size_t size() const { return lock_mask_.size(); }
  bool unlocked(std::uint32_t mask, std::size_t joint) const {
    return (mask & lock_mask_[joint]) == lock_value_[joint];
  }
  bool solved(std::uint32_t mask) const {
    return ((mask >> target_) & 1U) == static_cast<std::uint32_t>(goal_);
  }
  std::size_t target() const { return target_; }
  int goal() const { return goal_; }

 private:
  std::vector<std::uint32_t> lock_mask_;
  std::vector<std::uint32_t> lock_value_;
  std::size_t target_ = 0;
  int goal_ = 1;
};

std::uint32_t to_mask(const LockboxState& state);

inline constexpr int kUnsolvable = -1;

// Minimal number of successful toggles to reach a solved state from every
// mask. Toggle edges are symmetric (a joint's lock status does not depend on
// its own bit), so one multi-source BFS from all solved states covers every
// query.
class DistanceTable {
 public:
  explicit DistanceTable(const LockboxSpec& spec);

  // kUnsolvable when no path exists.
  int at(std::uint32_t mask) const { return dist_[mask]; }
  int at(const LockboxState& state) const { return dist_[to_mask(state)]; }

 private:
  std::vector<int> dist_;
};

// Shortest number of successful toggles to a solved state; nullopt when
// unsolvable. Runs a forward BFS from the given state.
std::optional<int> min_remaining_steps(const LockboxSpec& spec, const LockboxState& state);

}  // namespace lockbox
