#pragma once

#include "bbp/core.hpp"

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace bbp {

namespace detail {

// Shrinks `members` by one (probe, feedback) observation. May return an empty
// vector; callers that promise nonemptiness check it themselves.
inline std::vector<std::int32_t> refine_members(const std::vector<std::int32_t>& members,
                                                const InputMask& probe, std::int32_t y) {
  std::vector<std::int32_t> next;
  next.reserve(members.size());
  for (std::int32_t s : members) {
    if ((probe.contains(s) ? 1 : 0) == y) next.push_back(s);
  }
  return next;
}

}  // namespace detail

// The set of directions consistent with every (probe, feedback) pair seen so
// far in the block. Nonempty by construction; it can only shrink.
class AmbiguitySet {
 public:
  static AmbiguitySet full(const BlockConfig& cfg) {
    std::vector<std::int32_t> members(static_cast<std::size_t>(cfg.m));
    for (std::int32_t i = 0; i < cfg.m; ++i) members[static_cast<std::size_t>(i)] = i + 1;
    return AmbiguitySet(std::move(members));
  }

  static AmbiguitySet of(std::vector<std::int32_t> members) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    if (members.empty()) throw InvariantError("ambiguity set must be nonempty");
    return AmbiguitySet(std::move(members));
  }

  const std::vector<std::int32_t>& members() const { return members_; }
  std::int32_t size() const { return static_cast<std::int32_t>(members_.size()); }

  bool contains(std::int32_t index) const {
    return std::binary_search(members_.begin(), members_.end(), index);
  }
  bool contains(BeamIndex s) const { return contains(s.value); }

  friend bool operator==(const AmbiguitySet&, const AmbiguitySet&) = default;

 private:
  explicit AmbiguitySet(std::vector<std::int32_t> members) : members_(std::move(members)) {}

  std::vector<std::int32_t> members_;  // sorted, unique, nonempty
};

inline AmbiguitySet init_ambiguity(const BlockConfig& cfg) { return AmbiguitySet::full(cfg); }

// nullopt when (probe, y) is infeasible given `current`; used by scripted
// replays that feed a policy deliberately perturbed feedback.
inline std::optional<AmbiguitySet> try_update_ambiguity(const AmbiguitySet& current,
                                                        const InputMask& probe,
                                                        std::int32_t y) {
  auto next = detail::refine_members(current.members(), probe, y);
  if (next.empty()) return std::nullopt;
  return AmbiguitySet::of(std::move(next));
}

// y = 1 keeps the probed members, y = 0 keeps the rest.
inline AmbiguitySet update_ambiguity(const AmbiguitySet& current, const InputMask& probe,
                                     std::int32_t y) {
  auto next = try_update_ambiguity(current, probe, y);
  if (!next)
    throw InconsistentTrajectoryError(
        "inconsistent trajectory: no direction is consistent with the probe/feedback log");
  return *std::move(next);
}

// Uniform over the ambiguity set, zero elsewhere.
inline std::map<std::int32_t, Rat> posterior(const AmbiguitySet& current) {
  std::map<std::int32_t, Rat> p;
  const Rat w(1, current.size());
  for (std::int32_t s : current.members()) p.emplace(s, w);
  return p;
}

struct Estimate {
  BeamIndex s_hat;
  AmbiguitySet posterior_support;
  DistortionValue conditional_distortion;  // 2 (|B| - 1) / |B|
};

// Bayes-optimal end-of-block estimate. Under the uniform posterior and the
// one-hot Hamming loss every member of the set is risk-equivalent; the
// smallest index is picked for determinism.
inline Estimate estimate(const AmbiguitySet& current) {
  const std::int32_t b = current.size();
  return Estimate{BeamIndex{current.members().front()}, current,
                  DistortionValue(Rat(2 * (b - 1), b))};
}

}  // namespace bbp
