#pragma once

#include <cstdint>
#include <random>

namespace bbp {

struct RngSeed {
  std::uint64_t value = 0;

  friend bool operator==(RngSeed, RngSeed) = default;
};

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Per-trial seed derivation: splitmix64 mix of the master seed and the trial
// index, so trials can run in any order (or concurrently) with unchanged
// results.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t trial_index) {
  return splitmix64(master ^ splitmix64(trial_index));
}

inline Rng make_rng(RngSeed seed) { return Rng(seed.value); }

inline Rng make_trial_rng(RngSeed master, std::uint64_t trial_index) {
  return Rng(mix_seed(master.value, trial_index));
}

// Maps a raw 64-bit draw onto [0, n) by multiply-high; fixed mapping keeps
// sequences reproducible for a given build.
inline std::uint64_t bounded_draw(Rng& rng, std::uint64_t n) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(rng()) * n) >> 64);
}

}  // namespace bbp
