#pragma once

#include "bbp/policy.hpp"

#include <span>
#include <vector>

namespace bbp {

// One simulated block: a state held constant for L uses, the probes sent and
// the binary outputs observed.
struct BlockTrajectory {
  BeamIndex state;
  std::vector<InputMask> inputs;
  std::vector<std::int32_t> outputs;
};

inline BeamIndex sample_state(const BlockConfig& cfg, Rng& rng) {
  return BeamIndex{static_cast<std::int32_t>(
      1 + bounded_draw(rng, static_cast<std::uint64_t>(cfg.m)))};
}

// Inner product of one-hot state and binary input: 1 iff the probe covers the
// state.
inline std::int32_t channel_output(BeamIndex state, const InputMask& input) {
  return input.contains(state) ? 1 : 0;
}

// Runs one block. At use j the policy sees exactly y_1..y_{j-1}: the one-unit
// delayed, noiseless feedback is realized by handing it only the prefix of
// outputs recorded so far.
inline BlockTrajectory run_block(const BlockConfig& cfg, const Policy& policy, BeamIndex state,
                                 Rng& rng) {
  BlockTrajectory trajectory{state, {}, {}};
  trajectory.inputs.reserve(static_cast<std::size_t>(cfg.l));
  trajectory.outputs.reserve(static_cast<std::size_t>(cfg.l));

  AmbiguitySet ambiguity = init_ambiguity(cfg);
  for (std::int32_t j = 1; j <= cfg.l; ++j) {
    InputMask probe = policy.next_probe(cfg, j, trajectory.outputs, ambiguity, rng);
    if (probe.weight() > cfg.b_peak)
      throw ConstraintError("policy emitted a probe heavier than b_peak");
    const std::int32_t y = channel_output(state, probe);
    trajectory.inputs.push_back(std::move(probe));
    trajectory.outputs.push_back(y);
    // The true state stays consistent, so this never empties on a real run.
    ambiguity = update_ambiguity(ambiguity, trajectory.inputs.back(), y);
  }
  return trajectory;
}

// Drives a policy against an arbitrary feedback script instead of the
// channel. Stops early (completed = false) once the script becomes
// inconsistent with the probe log; probes emitted up to that point stand.
struct ScriptedDrive {
  std::vector<InputMask> inputs;
  bool completed = true;
};

inline ScriptedDrive drive_policy_scripted(const BlockConfig& cfg, const Policy& policy,
                                           std::span<const std::int32_t> script, Rng& rng) {
  ScriptedDrive drive;
  AmbiguitySet ambiguity = init_ambiguity(cfg);
  const std::int32_t steps = std::min<std::int32_t>(cfg.l, static_cast<std::int32_t>(script.size()));
  for (std::int32_t j = 1; j <= steps; ++j) {
    const auto prefix = script.subspan(0, static_cast<std::size_t>(j - 1));
    drive.inputs.push_back(policy.next_probe(cfg, j, prefix, ambiguity, rng));
    auto next = try_update_ambiguity(ambiguity, drive.inputs.back(),
                                     script[static_cast<std::size_t>(j - 1)]);
    if (!next) {
      drive.completed = false;
      return drive;
    }
    ambiguity = *std::move(next);
  }
  return drive;
}

}  // namespace bbp
