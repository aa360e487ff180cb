#pragma once

// Test-only oracles. They use nothing but the per-step public semantics
// (manipulate / is_solved) so they stay independent of the BFS tables.

#include <optional>
#include <set>
#include <vector>

#include "lockbox/core/lockbox.hpp"

namespace lockbox::testing {

namespace detail {

inline bool depth_limited(const LockboxSpec& spec, const LockboxState& state, int depth,
                          std::vector<std::vector<std::uint8_t>>& path) {
  if (is_solved(spec, state)) return true;
  if (depth == 0) return false;
  for (std::size_t j = 0; j < spec.size(); ++j) {
    auto out = manipulate(spec, state, j);
    if (!out.moved) continue;
    bool revisit = false;
    for (const auto& p : path) revisit = revisit || p == out.state.bits;
    if (revisit) continue;
    path.push_back(out.state.bits);
    const bool found = depth_limited(spec, out.state, depth - 1, path);
    path.pop_back();
    if (found) return true;
  }
  return false;
}

// Fixpoint closure of the reachable bit vectors.
inline std::set<std::vector<std::uint8_t>> reachable(const LockboxSpec& spec,
                                                     const LockboxState& state) {
  std::set<std::vector<std::uint8_t>> seen{state.bits};
  bool grew = true;
  while (grew) {
    grew = false;
    for (auto bits : std::set(seen)) {
      LockboxState s = state;
      s.bits = bits;
      for (std::size_t j = 0; j < spec.size(); ++j) {
        auto out = manipulate(spec, s, j);
        if (out.moved && seen.insert(out.state.bits).second) grew = true;
      }
    }
  }
  return seen;
}

}  // namespace detail

// Iterative deepening over simple paths of successful toggles, bounded by the
// size of the reachable set.
inline std::optional<int> enumerate_min_steps(const LockboxSpec& spec, const LockboxState& state) {
  const auto closure = detail::reachable(spec, state);
  bool any_solved = false;
  for (const auto& bits : closure) {
    LockboxState s = state;
    s.bits = bits;
    any_solved = any_solved || is_solved(spec, s);
  }
  if (!any_solved) return std::nullopt;
  const int bound = static_cast<int>(closure.size()) - 1;
  for (int depth = 0; depth <= bound; ++depth) {
    std::vector<std::vector<std::uint8_t>> path{state.bits};
    if (detail::depth_limited(spec, state, depth, path)) return depth;
  }
  return std::nullopt;
}

}  // namespace lockbox::testing
