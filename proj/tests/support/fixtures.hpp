#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lockbox/core/lockbox.hpp"

namespace lockbox::testing {

inline JointSpec joint(const std::string& id, double x = 0.0, double y = 0.0, double z = 0.0,
                       JointKind kind = JointKind::prismatic) {
  JointSpec j;
  j.id = id;
  j.kind = kind;
  j.handle_position = {x, y, z};
  return j;
}

// One-to-one: A locks B in state 1. Target B.
inline LockboxSpec one_to_one() {
  return {"fig-one-to-one", {joint("A"), joint("B", 0.1)}, {{"A", "B", 1}}, "B", 1};
}

// Many-to-one: D needs (A, B, C) = (0, 1, 1). Target D.
inline LockboxSpec many_to_one() {
  return {"fig-many-to-one",
          {joint("A"), joint("B", 0.1), joint("C", 0.2), joint("D", 0.3)},
          {{"A", "D", 0}, {"B", "D", 1}, {"C", "D", 1}},
          "D",
          1};
}

// Bistable: A unlocks B in state 0 and C in state 1. Target C.
inline LockboxSpec bistable() {
  return {"fig-bistable",
          {joint("A"), joint("B", 0.1), joint("C", 0.2)},
          {{"A", "B", 0}, {"A", "C", 1}},
          "C",
          1};
}

inline LockboxState state_of(const LockboxSpec& spec, const std::vector<int>& bits) {
  auto s = initial_state(spec);
  for (std::size_t i = 0; i < bits.size(); ++i) s.bits[i] = static_cast<std::uint8_t>(bits[i]);
  return s;
}

}  // namespace lockbox::testing
