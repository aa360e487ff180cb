#pragma once

#include <cstdint>

namespace lockbox {

// SplitMix64 finalizer. Used as the mixing step of the seed-derivation scheme.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream seed for (master, cell, trial):
//   s = splitmix64(splitmix64(splitmix64(master) ^ cell) ^ trial)
// Any reimplementation of this formula reproduces every trial stream.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell, std::uint64_t trial) {
  return splitmix64(splitmix64(splitmix64(master) ^ cell) ^ trial);
}

}  // namespace lockbox
