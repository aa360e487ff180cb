#include "lockbox/core/generator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

namespace lockbox {

DependencyMix default_mix(std::size_t n_joints) {
  DependencyMix mix;
  // a 3-joint DAG holds at most 3 edges: one bistable pair plus one single lock
  if (n_joints <= 3) return {1, 0, n_joints == 3 ? 1 : 0};
  mix.one_to_one = std::max(1, static_cast<int>(n_joints - 2) / 2);
  mix.many_to_one = n_joints >= 6 ? 2 : 1;
  mix.bistable = 1;
  return mix;
}

namespace {

std::string default_label(std::size_t i) {
  if (i < 26) return std::string(1, static_cast<char>('A' + i));
  return "J" + std::to_string(i + 1);
}

double distance(const JointSpec& a, const JointSpec& b) {
  return (a.handle_position - b.handle_position).norm();
}

bool extreme(double preference) { return std::abs(preference) >= 1.0 - 1e-12; }

}  // namespace

std::vector<std::size_t> locker_candidates(std::span<const JointSpec> joints, std::size_t locked,
                                           double distance_preference) {
  std::vector<std::size_t> others;
  for (std::size_t i = 0; i < joints.size(); ++i) {
    if (i != locked) others.push_back(i);
  }
  std::stable_sort(others.begin(), others.end(), [&](std::size_t a, std::size_t b) {
    return distance(joints[a], joints[locked]) < distance(joints[b], joints[locked]);
  });
  if (!extreme(distance_preference)) return others;
  const std::size_t keep = std::min(others.size(), (joints.size() + 1) / 2);
  if (distance_preference < 0) {
    others.resize(keep);
  } else {
    others.erase(others.begin(), others.end() - static_cast<std::ptrdiff_t>(keep));
  }
  return others;
}

namespace {

class EdgeSampler {
 public:
  EdgeSampler(const std::vector<JointSpec>& joints, double preference, std::mt19937_64& rng)
      : joints_(joints), preference_(preference), rng_(rng), reach_(joints.size()) {
    for (std::size_t i = 0; i < joints.size(); ++i) reach_[i].insert(i);
    for (const auto& a : joints) {
      for (const auto& b : joints) max_distance_ = std::max(max_distance_, distance(a, b));
    }
    if (max_distance_ <= 0.0) max_distance_ = 1.0;
  }

  std::size_t uniform(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
  }
  int coin() { return static_cast<int>(uniform(2)); }

  // Weighted draw of a locker for `locked`, excluding `exclude`.
  std::optional<std::size_t> draw_locker(std::size_t locked, const std::set<std::size_t>& exclude) {
    std::vector<std::size_t> pool;
    std::vector<double> weights;
    for (auto c : locker_candidates(joints_, locked, preference_)) {
      if (exclude.count(c) != 0 || !can_add(c, locked)) continue;
      pool.push_back(c);
      const double d = distance(joints_[c], joints_[locked]) / max_distance_;
      weights.push_back(extreme(preference_) ? 1.0 : std::exp(4.0 * preference_ * d));
    }
    if (pool.empty()) return std::nullopt;
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    return pool[pick(rng_)];
  }

  bool can_add(std::size_t locker, std::size_t locked) const {
    if (locker == locked) return false;
    if (used_.count({locker, locked}) != 0) return false;
    // locked must not already reach locker
    return reach_[locked].count(locker) == 0;
  }

  void add(std::size_t locker, std::size_t locked, int required) {
    used_.insert({locker, locked});
    edges_.push_back({joints_[locker].id, joints_[locked].id, required});
    // everything that reaches locker now reaches everything locked reaches
    for (std::size_t i = 0; i < reach_.size(); ++i) {
      if (reach_[i].count(locker) != 0) reach_[i].insert(reach_[locked].begin(), reach_[locked].end());
    }
  }

  bool one_to_one() {
    for (int tries = 0; tries < 20; ++tries) {
      const auto locked = uniform(joints_.size());
      if (auto locker = draw_locker(locked, {})) {
        add(*locker, locked, coin());
        return true;
      }
    }
    return false;
  }

  bool many_to_one() {
    for (int tries = 0; tries < 20; ++tries) {
      const auto locked = uniform(joints_.size());
      const std::size_t fan_in = joints_.size() >= 5 ? 2 + uniform(2) : 2;
      std::set<std::size_t> chosen;
      for (std::size_t k = 0; k < fan_in; ++k) {
        auto locker = draw_locker(locked, chosen);
        if (!locker) break;
        chosen.insert(*locker);
      }
      if (chosen.size() < 2) continue;
      for (auto locker : chosen) {
        if (!can_add(locker, locked)) return false;
        add(locker, locked, coin());
      }
      return true;
    }
    return false;
  }

  bool bistable() {
    for (int tries = 0; tries < 20; ++tries) {
      const auto first = uniform(joints_.size());
      auto locker = draw_locker(first, {});
      if (!locker) continue;
      std::vector<std::size_t> second_pool;
      for (std::size_t j = 0; j < joints_.size(); ++j) {
        if (j == first || j == *locker || !can_add(*locker, j)) continue;
        const auto cand = locker_candidates(joints_, j, preference_);
        if (std::find(cand.begin(), cand.end(), *locker) != cand.end()) second_pool.push_back(j);
      }
      if (second_pool.empty()) continue;
      const auto second = second_pool[uniform(second_pool.size())];
      const int state = coin();
      add(*locker, first, state);
      if (!can_add(*locker, second)) return false;
      add(*locker, second, 1 - state);
      return true;
    }
    return false;
  }

  std::vector<DependencyEdge> take_edges() { return std::move(edges_); }

 private:
  const std::vector<JointSpec>& joints_;
  double preference_;
  std::mt19937_64& rng_;
  std::vector<std::set<std::size_t>> reach_;
  std::set<std::pair<std::size_t, std::size_t>> used_;
  std::vector<DependencyEdge> edges_;
  double max_distance_ = 0.0;
};

std::vector<JointSpec> sample_joints(const GeneratorParams& params, std::mt19937_64& rng) {
  if (!params.base_joints.empty()) return params.base_joints;
  std::vector<JointSpec> joints(params.n_joints);
  for (std::size_t i = 0; i < joints.size(); ++i) {
    auto& joint = joints[i];
    joint.id = default_label(i);
    for (int axis = 0; axis < 3; ++axis) {
      std::uniform_real_distribution<double> coord(params.workspace.lo[axis],
                                                   params.workspace.hi[axis]);
      joint.handle_position[axis] = coord(rng);
    }
    joint.kind = std::bernoulli_distribution(0.5)(rng) ? JointKind::prismatic : JointKind::revolute;
  }
  return joints;
}

}  // namespace

LockboxSpec generate_random(const GeneratorParams& params) {
  if (params.n_joints < 2) throw std::invalid_argument("generator needs at least 2 joints");
  if (!params.base_joints.empty() && params.base_joints.size() != params.n_joints) {
    throw std::invalid_argument("base_joints size does not match n_joints");
  }
  if (params.n_joints > LockTable::kMaxJoints) {
    throw std::invalid_argument("generator supports at most " +
                                std::to_string(LockTable::kMaxJoints) + " joints");
  }
  std::mt19937_64 rng(params.seed);
  for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
    LockboxSpec spec;
    spec.name = params.name;
    spec.joints = sample_joints(params, rng);

    EdgeSampler sampler(spec.joints, params.distance_preference, rng);
    bool ok = true;
    for (int i = 0; ok && i < params.dependency_mix.bistable; ++i) ok = sampler.bistable();
    for (int i = 0; ok && i < params.dependency_mix.many_to_one; ++i) ok = sampler.many_to_one();
    for (int i = 0; ok && i < params.dependency_mix.one_to_one; ++i) ok = sampler.one_to_one();
    if (!ok) continue;
    spec.edges = sampler.take_edges();

    const auto start = initial_state(spec);
    if (params.target) {
      spec.target = *params.target;
    } else {
      // deepest solvable joint, lowest index on ties
      int best = -1;
      for (const auto& joint : spec.joints) {
        spec.target = joint.id;
        spec.goal_state = 1 - joint.initial_state;
        const auto steps = min_remaining_steps(spec, start);
        if (steps && *steps > best) best = *steps;
      }
      for (const auto& joint : spec.joints) {
        spec.target = joint.id;
        spec.goal_state = 1 - joint.initial_state;
        const auto steps = min_remaining_steps(spec, start);
        if (steps && *steps == best) break;
      }
    }
    spec.goal_state = 1 - spec.joints[spec.index_of(spec.target)].initial_state;

    if (!validate(spec).empty()) continue;
    const auto steps = min_remaining_steps(spec, start);
    if (!steps || *steps < params.min_solution_steps) continue;
    return spec;
  }
  throw GenerationError("no solvable lockbox after " + std::to_string(params.max_attempts) +
                        " attempts (seed " + std::to_string(params.seed) + ")");
}

LockboxSpec relabel(const LockboxSpec& spec, std::span<const std::size_t> permutation) {
  const std::size_t n = spec.size();
  if (permutation.size() != n) throw std::invalid_argument("permutation size mismatch");
  std::vector<bool> seen(n, false);
  for (auto p : permutation) {
    if (p >= n || seen[p]) throw std::invalid_argument("not a permutation");
    seen[p] = true;
  }
  const auto target = spec.target_index();
  if (permutation[target] != target) throw std::invalid_argument("target must stay fixed");

  std::map<std::string, std::string> rename;
  LockboxSpec out = spec;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& moved = spec.joints[permutation[k]];
    rename[moved.id] = spec.joints[k].id;
    out.joints[k] = moved;
    out.joints[k].id = spec.joints[k].id;
  }
  for (auto& edge : out.edges) {
    edge.locker = rename.at(edge.locker);
    edge.locked = rename.at(edge.locked);
  }
  return out;
}

LockboxSpec randomize_labels(const LockboxSpec& spec, std::uint64_t seed) {
  const auto target = spec.target_index();
  std::vector<std::size_t> movable;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (i != target) movable.push_back(i);
  }
  auto shuffled = movable;
  std::mt19937_64 rng(seed);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  std::vector<std::size_t> permutation(spec.size());
  permutation[target] = target;
  for (std::size_t k = 0; k < movable.size(); ++k) permutation[movable[k]] = shuffled[k];
  return relabel(spec, permutation);
}

LockboxSpec restrict_to(const LockboxSpec& spec, std::span<const std::string> joint_ids,
                        const std::string& target) {
  LockboxSpec out;
  out.name = spec.name + "-" + std::to_string(joint_ids.size());
  std::set<std::string> keep(joint_ids.begin(), joint_ids.end());
  for (const auto& id : joint_ids) out.joints.push_back(spec.joints[spec.index_of(id)]);
  for (const auto& edge : spec.edges) {
    if (keep.count(edge.locker) != 0 && keep.count(edge.locked) != 0) out.edges.push_back(edge);
  }
  out.target = target;
  out.goal_state = 1 - out.joints[out.index_of(target)].initial_state;
  return out;
}

}  // namespace lockbox
