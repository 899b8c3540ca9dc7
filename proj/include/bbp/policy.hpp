#pragma once

#include "bbp/estimator.hpp"
#include "bbp/rng.hpp"

#include <charconv>
#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace bbp {

// Probe-size schedule: c_1 = min(M/2, B_peak), then
// c_j = min((M - sum_{k<j} c_k) / 2, B_peak). `exact` runs the recursion over
// rationals; `feasible` floors each step so the sizes are realizable.
struct ProbeSchedule {
  std::vector<Rat> exact;
  std::vector<std::int64_t> feasible;
};

inline ProbeSchedule compute_schedule(const BlockConfig& cfg) {
  ProbeSchedule schedule;
  schedule.exact.reserve(static_cast<std::size_t>(cfg.l));
  schedule.feasible.reserve(static_cast<std::size_t>(cfg.l));

  Rat remaining_exact(cfg.m);
  std::int64_t remaining_int = cfg.m;
  for (std::int32_t j = 0; j < cfg.l; ++j) {
    Rat c = remaining_exact / 2;
    if (c > cfg.b_peak) c = Rat(cfg.b_peak);
    remaining_exact -= c;
    schedule.exact.push_back(std::move(c));

    const std::int64_t ci = std::min<std::int64_t>(remaining_int / 2, cfg.b_peak);
    remaining_int -= ci;
    schedule.feasible.push_back(ci);
  }
  return schedule;
}

// First channel use with feedback 1; first_hit == 0 encodes the all-zero
// feedback class.
struct OutcomeClass {
  std::int32_t first_hit = 0;

  static OutcomeClass all_zero() { return {}; }
  static OutcomeClass hit_at(std::int32_t k) { return {k}; }
  bool is_all_zero() const { return first_hit == 0; }

  friend auto operator<=>(OutcomeClass, OutcomeClass) = default;
};

inline OutcomeClass classify(std::span<const std::int32_t> outputs) {
  for (std::size_t j = 0; j < outputs.size(); ++j) {
    if (outputs[j] == 1) return OutcomeClass::hit_at(static_cast<std::int32_t>(j) + 1);
  }
  return OutcomeClass::all_zero();
}

inline std::string to_string(OutcomeClass cls) {
  return cls.is_all_zero() ? std::string("all-zero") : "k=" + std::to_string(cls.first_hit);
}

enum class PolicyMode { canonical, seeded_random };

inline const char* to_string(PolicyMode mode) {
  return mode == PolicyMode::canonical ? "canonical" : "random";
}

namespace detail {

inline std::vector<std::int32_t> lowest_n(const std::vector<std::int32_t>& pool, std::size_t n) {
  return {pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n)};
}

inline std::vector<std::int32_t> sample_n(const std::vector<std::int32_t>& pool, std::size_t n,
                                          Rng& rng) {
  std::vector<std::int32_t> copy = pool;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(bounded_draw(rng, copy.size() - i));
    std::swap(copy[i], copy[j]);
  }
  copy.resize(n);
  return copy;
}

inline std::vector<std::int32_t> choose_n(const std::vector<std::int32_t>& pool, std::size_t n,
                                          PolicyMode mode, Rng& rng) {
  return mode == PolicyMode::canonical ? lowest_n(pool, n) : sample_n(pool, n, rng);
}

}  // namespace detail

// An adaptive transmission strategy. next_probe must be a function of
// (cfg, use index, feedback prefix, ambiguity set) alone, plus `rng` draws in
// seeded_random mode. All per-trajectory state lives in the runner, so one
// policy value serves any number of concurrent trajectories.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string name() const = 0;
  virtual PolicyMode mode() const = 0;
  virtual InputMask next_probe(const BlockConfig& cfg, std::int32_t use_index,
                               std::span<const std::int32_t> feedback,
                               const AmbiguitySet& ambiguity, Rng& rng) const = 0;
};

// Pre-hit: probe c~_j fresh directions from the ambiguity set (which, before
// the first hit, is exactly the never-probed set). Post-hit: probe a balanced
// half, ceil(|B|/2), of the current set. Canonical mode takes the
// lowest-indexed members; seeded_random draws uniformly without replacement.
class OptimalPolicy final : public Policy {
 public:
  OptimalPolicy(const BlockConfig& cfg, ProbeSchedule schedule, PolicyMode mode)
      : schedule_(std::move(schedule)), mode_(mode) {
    if (schedule_.feasible.size() != static_cast<std::size_t>(cfg.l))
      throw InvariantError("schedule length does not match L");
  }

  std::string name() const override { return "optimal"; }
  PolicyMode mode() const override { return mode_; }

  InputMask next_probe(const BlockConfig& cfg, std::int32_t use_index,
                       std::span<const std::int32_t> feedback, const AmbiguitySet& ambiguity,
                       Rng& rng) const override {
    const bool hit = std::find(feedback.begin(), feedback.end(), 1) != feedback.end();
    const auto& pool = ambiguity.members();
    std::size_t n;
    if (!hit) {
      const std::int64_t c = schedule_.feasible[static_cast<std::size_t>(use_index - 1)];
      n = std::min<std::size_t>(static_cast<std::size_t>(c), pool.size());
    } else {
      n = (pool.size() + 1) / 2;
    }
    return InputMask::of(cfg, detail::choose_n(pool, n, mode_, rng));
  }

 private:
  ProbeSchedule schedule_;
  PolicyMode mode_;
};

// Beam sweeping: weight-1 probe of direction j at use j, nothing after the
// first hit (the hit already pins the direction down).
class SweepPolicy final : public Policy {
 public:
  std::string name() const override { return "sweep"; }
  PolicyMode mode() const override { return PolicyMode::canonical; }

  InputMask next_probe(const BlockConfig& cfg, std::int32_t use_index,
                       std::span<const std::int32_t> feedback, const AmbiguitySet&,
                       Rng&) const override {
    const bool hit = std::find(feedback.begin(), feedback.end(), 1) != feedback.end();
    if (hit || use_index > cfg.m) return InputMask::empty();
    return InputMask::of(cfg, {use_index});
  }
};

// Non-adaptive control baseline: a fresh uniformly random fixed-weight mask
// every use, feedback ignored.
class RandomPolicy final : public Policy {
 public:
  RandomPolicy(const BlockConfig& cfg, std::int32_t weight) : weight_(weight) {
    if (weight < 1 || weight > cfg.b_peak)
      throw ConstraintError("random policy weight must be in [1..b_peak]");
  }

  std::string name() const override { return "random:" + std::to_string(weight_); }
  PolicyMode mode() const override { return PolicyMode::seeded_random; }

  InputMask next_probe(const BlockConfig& cfg, std::int32_t, std::span<const std::int32_t>,
                       const AmbiguitySet&, Rng& rng) const override {
    std::vector<std::int32_t> pool(static_cast<std::size_t>(cfg.m));
    for (std::int32_t i = 0; i < cfg.m; ++i) pool[static_cast<std::size_t>(i)] = i + 1;
    return InputMask::of(cfg, detail::sample_n(pool, static_cast<std::size_t>(weight_), rng));
  }

 private:
  std::int32_t weight_;
};

inline std::unique_ptr<Policy> optimal_policy(const BlockConfig& cfg,
                                              const ProbeSchedule& schedule, PolicyMode mode) {
  return std::make_unique<OptimalPolicy>(cfg, schedule, mode);
}

inline std::unique_ptr<Policy> sweep_policy(const BlockConfig&) {
  return std::make_unique<SweepPolicy>();
}

inline std::unique_ptr<Policy> random_policy(const BlockConfig& cfg, std::int32_t weight) {
  return std::make_unique<RandomPolicy>(cfg, weight);
}

// Selector grammar used by the CLI: "optimal", "sweep", "random:w".
inline std::unique_ptr<Policy> make_policy(const BlockConfig& cfg, std::string_view selector,
                                           PolicyMode mode = PolicyMode::canonical) {
  if (selector == "optimal") return optimal_policy(cfg, compute_schedule(cfg), mode);
  if (selector == "sweep") return sweep_policy(cfg);
  if (selector.starts_with("random:")) {
    const std::string_view arg = selector.substr(7);
    std::int32_t weight = 0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), weight);
    if (ec != std::errc() || ptr != arg.data() + arg.size())
      throw ConfigError(ConfigErrorKind::out_of_range,
                        "bad policy weight in selector: " + std::string(selector));
    return random_policy(cfg, weight);
  }
  throw ConfigError(ConfigErrorKind::out_of_range,
                    "unknown policy selector: " + std::string(selector));
}

}  // namespace bbp
