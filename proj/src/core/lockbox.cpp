#include "lockbox/core/lockbox.hpp"

#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>

namespace lockbox {

int kind_code(JointKind kind) { return kind == JointKind::prismatic ? 1 : -1; }

std::string to_string(JointKind kind) {
  return kind == JointKind::prismatic ? "prismatic" : "revolute";
}

JointKind joint_kind_from_string(const std::string& s) {
  if (s == "prismatic") return JointKind::prismatic;
  if (s == "revolute") return JointKind::revolute;
  throw std::invalid_argument("unknown joint kind '" + s + "'");
}

std::size_t LockboxSpec::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < joints.size(); ++i) {
    if (joints[i].id == id) return i;
  }
  throw std::invalid_argument("unknown joint id '" + id + "'");
}

namespace {

bool has_cycle(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& arcs) {
  std::vector<std::vector<std::size_t>> out(n);
  std::vector<int> indegree(n, 0);
  for (auto [from, to] : arcs) {
    out[from].push_back(to);
    ++indegree[to];
  }
  std::deque<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push_back(i);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    auto v = ready.front();
    ready.pop_front();
    ++visited;
    for (auto w : out[v]) {
      if (--indegree[w] == 0) ready.push_back(w);
    }
  }
  return visited != n;
}

bool is_bit(int v) { return v == 0 || v == 1; }

}  // namespace

std::vector<Violation> validate(const LockboxSpec& spec) {
  std::vector<Violation> violations;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < spec.joints.size(); ++i) {
    const auto& joint = spec.joints[i];
    if (joint.id.empty()) violations.push_back({"empty id", "joint #" + std::to_string(i)});
    if (!index.emplace(joint.id, i).second) violations.push_back({"duplicate id", joint.id});
    if (!joint.handle_position.allFinite()) {
      violations.push_back({"non-finite position", joint.id});
    }
    if (!is_bit(joint.initial_state)) violations.push_back({"invalid state", joint.id});
  }
  if (spec.joints.size() > LockTable::kMaxJoints) {
    violations.push_back({"too many joints", std::to_string(spec.joints.size())});
  }
  if (index.find(spec.target) == index.end()) {
    violations.push_back({"unknown target", spec.target});
  }
  if (!is_bit(spec.goal_state)) violations.push_back({"invalid goal state", spec.target});

  std::vector<std::pair<std::size_t, std::size_t>> arcs;
  std::map<std::pair<std::string, std::string>, int> seen;
  for (const auto& edge : spec.edges) {
    const auto label = edge.locker + "->" + edge.locked;
    auto locker = index.find(edge.locker);
    auto locked = index.find(edge.locked);
    if (locker == index.end() || locked == index.end()) {
      violations.push_back({"unknown endpoint", label});
      continue;
    }
    if (edge.locker == edge.locked) {
      violations.push_back({"self loop", label});
      continue;
    }
    if (!is_bit(edge.required_state)) violations.push_back({"invalid required state", label});
    auto [it, inserted] = seen.emplace(std::pair{edge.locker, edge.locked}, edge.required_state);
    if (!inserted && it->second != edge.required_state) {
      violations.push_back({"conflicting edge", label});
    }
    arcs.emplace_back(locker->second, locked->second);
  }
  if (index.size() == spec.joints.size() && has_cycle(spec.joints.size(), arcs)) {
    violations.push_back({"cycle", "dependency graph is not acyclic"});
  }
  return violations;
}

LockboxState initial_state(const LockboxSpec& spec) {
  LockboxState state;
  state.bits.reserve(spec.size());
  for (const auto& joint : spec.joints) {
    state.bits.push_back(static_cast<std::uint8_t>(joint.initial_state));
  }
  return state;
}

namespace {

void check_state(const LockboxSpec& spec, const LockboxState& state) {
  if (state.bits.size() != spec.size()) {
    throw std::invalid_argument("state has " + std::to_string(state.bits.size()) +
                                " bits, spec has " + std::to_string(spec.size()) + " joints");
  }
}

void check_joint(const LockboxSpec& spec, std::size_t joint) {
  if (joint >= spec.size()) {
    throw std::invalid_argument("joint index " + std::to_string(joint) + " out of range");
  }
}

}  // namespace

bool is_unlocked(const LockboxSpec& spec, const LockboxState& state, std::size_t joint) {
  check_state(spec, state);
  check_joint(spec, joint);
  const auto& id = spec.joints[joint].id;
  for (const auto& edge : spec.edges) {
    if (edge.locked != id) continue;
    if (state.bits[spec.index_of(edge.locker)] != edge.required_state) return false;
  }
  return true;
}

bool is_unlocked(const LockboxSpec& spec, const LockboxState& state, const std::string& joint) {
  return is_unlocked(spec, state, spec.index_of(joint));
}

ManipulationOutcome manipulate(const LockboxSpec& spec, const LockboxState& state,
                               std::size_t joint) {
  ManipulationOutcome out{state, false};
  if (is_unlocked(spec, state, joint)) {
    out.state.bits[joint] ^= 1U;
    out.moved = true;
  }
  out.state.last_manipulated = joint;
  ++out.state.step_count;
  return out;
}

ManipulationOutcome manipulate(const LockboxSpec& spec, const LockboxState& state,
                               const std::string& joint) {
  return manipulate(spec, state, spec.index_of(joint));
}

bool is_solved(const LockboxSpec& spec, const LockboxState& state) {
  check_state(spec, state);
  return state.bits[spec.target_index()] == spec.goal_state;
}

LockTable::LockTable(const LockboxSpec& spec)
    : lock_mask_(spec.size(), 0U), lock_value_(spec.size(), 0U) {
  if (spec.size() > kMaxJoints) {
    throw std::invalid_argument("lock table supports at most " + std::to_string(kMaxJoints) +
                                " joints");
  }
  for (const auto& edge : spec.edges) {
    const auto locker = spec.index_of(edge.locker);
    const auto locked = spec.index_of(edge.locked);
    lock_mask_[locked] |= 1U << locker;
    if (edge.required_state == 1) lock_value_[locked] |= 1U << locker;
  }
  target_ = spec.target_index();
  goal_ = spec.goal_state;
}

std::uint32_t to_mask(const LockboxState& state) {
  std::uint32_t mask = 0;
  for (std::size_t i = 0; i < state.bits.size(); ++i) {
    if (state.bits[i] != 0) mask |= 1U << i;
  }
  return mask;
}

DistanceTable::DistanceTable(const LockboxSpec& spec) {
  const LockTable table(spec);
  const std::size_t n = table.size();
  const std::uint32_t count = 1U << n;
  dist_.assign(count, kUnsolvable);
  std::vector<std::uint32_t> frontier;
  for (std::uint32_t s = 0; s < count; ++s) {
    if (table.solved(s)) {
      dist_[s] = 0;
      frontier.push_back(s);
    }
  }
  std::vector<std::uint32_t> next;
  int depth = 0;
  while (!frontier.empty()) {
    ++depth;
    next.clear();
    for (auto s : frontier) {
      for (std::size_t j = 0; j < n; ++j) {
        if (!table.unlocked(s, j)) continue;
        const auto t = s ^ (1U << j);
        if (dist_[t] == kUnsolvable) {
          dist_[t] = depth;
          next.push_back(t);
        }
      }
    }
    frontier.swap(next);
  }
}

std::optional<int> min_remaining_steps(const LockboxSpec& spec, const LockboxState& state) {
  check_state(spec, state);
  const LockTable table(spec);
  const std::size_t n = table.size();
  const auto start = to_mask(state);
  if (table.solved(start)) return 0;
  std::vector<int> dist(std::size_t{1} << n, kUnsolvable);
  std::deque<std::uint32_t> queue{start};
  dist[start] = 0;
  while (!queue.empty()) {
    const auto s = queue.front();
    queue.pop_front();
    for (std::size_t j = 0; j < n; ++j) {
      if (!table.unlocked(s, j)) continue;
      const auto t = s ^ (1U << j);
      if (dist[t] != kUnsolvable) continue;
      dist[t] = dist[s] + 1;
      if (table.solved(t)) return dist[t];
      queue.push_back(t);
    }
  }
  return std::nullopt;
}

}  // namespace lockbox
