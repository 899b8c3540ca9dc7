#pragma once

#include "bbp/rational.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bbp {

// Error taxonomy; the CLI maps these onto exit codes (2 config, 3 budget,
// 4 internal).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ConfigErrorKind {
  m_too_small,
  l_too_small,
  b_peak_too_small,
  b_peak_exceeds_m,
  out_of_range,
};

class ConfigError : public Error {
 public:
  ConfigError(ConfigErrorKind kind, const std::string& msg)
      : Error(msg), kind_(kind) {}
  ConfigErrorKind kind() const { return kind_; }

 private:
  ConfigErrorKind kind_;
};

// A probe violated the peak-weight or index-range contract.
class ConstraintError : public Error {
 public:
  using Error::Error;
};

// A (probe, feedback) log admits no consistent direction: corrupted feedback
// stream or a probe log that does not match it.
class InconsistentTrajectoryError : public Error {
 public:
  using Error::Error;
};

class BudgetError : public Error {
 public:
  BudgetError(const std::string& msg, std::uint64_t estimate, std::uint64_t budget)
      : Error(msg), estimate_(estimate), budget_(budget) {}
  std::uint64_t estimate() const { return estimate_; }
  std::uint64_t budget() const { return budget_; }

 private:
  std::uint64_t estimate_;
  std::uint64_t budget_;
};

class InvariantError : public Error {
 public:
  using Error::Error;
};

// The triple (M, L, B_peak) every computation is parameterized by:
// M quantized directions, blocks of L channel uses, peak input weight B_peak.
struct BlockConfig {
  std::int32_t m = 2;
  std::int32_t l = 1;
  std::int32_t b_peak = 1;

  friend bool operator==(const BlockConfig&, const BlockConfig&) = default;
};

inline BlockConfig validate_config(std::int64_t m, std::int64_t l, std::int64_t b_peak) {
  constexpr std::int64_t kMax = std::numeric_limits<std::int32_t>::max();
  if (m < 2) throw ConfigError(ConfigErrorKind::m_too_small, "M must be >= 2");
  if (l < 1) throw ConfigError(ConfigErrorKind::l_too_small, "L must be >= 1");
  if (b_peak < 1) throw ConfigError(ConfigErrorKind::b_peak_too_small, "b_peak must be >= 1");
  if (b_peak > m) throw ConfigError(ConfigErrorKind::b_peak_exceeds_m, "b_peak exceeds M");
  if (m > kMax || l > kMax)
    throw ConfigError(ConfigErrorKind::out_of_range, "M and L must fit in 32 bits");
  return BlockConfig{static_cast<std::int32_t>(m), static_cast<std::int32_t>(l),
                     static_cast<std::int32_t>(b_peak)};
}

// Channel state: the 1-based index of the single "1" of the one-hot state
// vector. The full vector form is recovered on demand and never stored.
struct BeamIndex {
  std::int32_t value = 1;

  friend auto operator<=>(BeamIndex, BeamIndex) = default;
};

inline BeamIndex make_beam_index(const BlockConfig& cfg, std::int64_t value) {
  if (value < 1 || value > cfg.m)
    throw ConstraintError("beam index out of range [1..M]");
  return BeamIndex{static_cast<std::int32_t>(value)};
}

// A channel input: the support of the binary input vector. Weight is capped
// by b_peak at construction; the empty probe (weight 0) is legal.
class InputMask {
 public:
  InputMask() = default;

  static InputMask of(const BlockConfig& cfg, std::vector<std::int32_t> support) {
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    if (!support.empty() && (support.front() < 1 || support.back() > cfg.m))
      throw ConstraintError("probe index out of range [1..M]");
    if (std::cmp_greater(support.size(), cfg.b_peak))
      throw ConstraintError("probe weight exceeds b_peak");
    InputMask mask;
    mask.support_ = std::move(support);
    return mask;
  }

  static InputMask empty() { return {}; }

  const std::vector<std::int32_t>& support() const { return support_; }
  std::int32_t weight() const { return static_cast<std::int32_t>(support_.size()); }

  bool contains(std::int32_t index) const {
    return std::binary_search(support_.begin(), support_.end(), index);
  }
  bool contains(BeamIndex s) const { return contains(s.value); }

  friend bool operator==(const InputMask&, const InputMask&) = default;

 private:
  std::vector<std::int32_t> support_;  // sorted, unique
};

// An exact distortion value in [0, 2]. Single realizations are 0 or 2;
// expectations land anywhere in between.
class DistortionValue {
 public:
  DistortionValue() = default;
  explicit DistortionValue(Rat value) : value_(std::move(value)) {
    if (value_ < 0 || value_ > 2)
      throw InvariantError("distortion value outside [0, 2]");
  }

  const Rat& value() const { return value_; }
  double as_double() const { return rat_to_double(value_); }
  std::string str() const { return rat_to_string(value_); }

  friend bool operator==(const DistortionValue&, const DistortionValue&) = default;
  friend bool operator<(const DistortionValue& a, const DistortionValue& b) {
    return a.value_ < b.value_;
  }
  friend bool operator<=(const DistortionValue& a, const DistortionValue& b) {
    return a.value_ <= b.value_;
  }

 private:
  Rat value_{};
};

// 0 on a correct one-hot estimate, 2 on any incorrect one (two vector
// positions differ).
inline DistortionValue hamming_distortion(BeamIndex s, BeamIndex s_hat) {
  return DistortionValue(s.value == s_hat.value ? Rat(0) : Rat(2));
}

}  // namespace bbp
