#pragma once

#include "bbp/policy.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace bbp {

namespace detail {

// Leaf cost of balanced halving: starting from a set of size b with `uses`
// channel uses left, sum [leaf size - 1]^+ over the split tree.
inline std::int64_t halving_leaf_sum(std::int64_t b, std::int32_t uses) {
  if (b <= 1) return 0;
  if (uses == 0) return b - 1;
  const std::int64_t top = (b + 1) / 2;
  return halving_leaf_sum(top, uses - 1) + halving_leaf_sum(b - top, uses - 1);
}

}  // namespace detail

// Closed-form minimum expected per-block distortion under the peak input
// weight constraint, evaluated with the exact (real-valued) schedule:
//
//   D = sum_j 2 [c_j - 2^{L-j}]^+ / M  +  2 [M - sum_j c_j - 1]^+ / M
//
// The real-valued recursion implicitly assumes fractional probe sizes;
// `feasible_value` is the exact distortion of the integer-schedule policy
// itself (c~_j fresh directions pre-hit, balanced halving post-hit), so any
// integrality gap is surfaced rather than hidden. The two coincide in dyadic
// cases.
struct DistortionFormulaReport {
  BlockConfig cfg;
  ProbeSchedule schedule;
  std::vector<Rat> terms;  // per-use contributions, length L
  Rat residual;            // unresolved-remainder term
  DistortionValue d_min;
  DistortionValue feasible_value;
  bool zero_distortion = false;
};

inline DistortionFormulaReport min_distortion(const BlockConfig& cfg) {
  DistortionFormulaReport report;
  report.cfg = cfg;
  report.schedule = compute_schedule(cfg);
  report.terms.reserve(static_cast<std::size_t>(cfg.l));

  Rat sum_c(0);
  Rat total(0);
  for (std::int32_t j = 1; j <= cfg.l; ++j) {
    const Rat& c = report.schedule.exact[static_cast<std::size_t>(j - 1)];
    sum_c += c;
    const std::int64_t e = cfg.l - j;
    // c_j <= M/2 < 2^31, so the bracket is 0 whenever the exponent is large.
    Rat term = (e >= 31) ? Rat(0) : 2 * pos_part(c - pow2_rat(e)) / cfg.m;
    total += term;
    report.terms.push_back(std::move(term));
  }
  report.residual = 2 * pos_part(Rat(cfg.m) - sum_c - 1) / cfg.m;
  total += report.residual;
  report.d_min = DistortionValue(total);
  report.zero_distortion = total == 0;

  // value of the integer policy, over split sizes alone
  std::int64_t leaf_sum = 0;
  std::int64_t sum_feasible = 0;
  for (std::int32_t j = 1; j <= cfg.l; ++j) {
    const std::int64_t c = report.schedule.feasible[static_cast<std::size_t>(j - 1)];
    leaf_sum += detail::halving_leaf_sum(c, cfg.l - j);
    sum_feasible += c;
  }
  leaf_sum += std::max<std::int64_t>(cfg.m - sum_feasible - 1, 0);
  report.feasible_value = DistortionValue(Rat(2 * leaf_sum, cfg.m));
  return report;
}

// Predicted statistics of the few-shot feedback classes under the schedule:
// the class with first hit at use k has probability c_k / M and final
// ambiguity size c_k / 2^{L-k}; the all-zero class keeps the unprobed
// remainder. Non-integer sizes flag parameter choices the integer policy
// cannot match exactly.
struct ClassPrediction {
  OutcomeClass cls;
  Rat probability;
  Rat ambiguity_size;
  bool integer_feasible = true;
};

inline std::vector<ClassPrediction> predicted_class_stats(const BlockConfig& cfg,
                                                          const ProbeSchedule& schedule) {
  std::vector<ClassPrediction> predictions;
  predictions.reserve(static_cast<std::size_t>(cfg.l) + 1);

  Rat sum_c(0);
  for (std::int32_t k = 1; k <= cfg.l; ++k) {
    const Rat& c = schedule.exact[static_cast<std::size_t>(k - 1)];
    sum_c += c;
    Rat size = c / pow2_rat(cfg.l - k);
    predictions.push_back(ClassPrediction{OutcomeClass::hit_at(k), c / cfg.m, size,
                                          rat_is_integer(size)});
  }
  Rat zero_size = Rat(cfg.m) - sum_c;
  predictions.push_back(ClassPrediction{OutcomeClass::all_zero(), 1 - sum_c / cfg.m,
                                        zero_size, rat_is_integer(zero_size)});
  return predictions;
}

// Checks the peak-cost bound on empirical first-hit statistics:
// M * P(first hit at k) <= B_peak within 3 sigma of the binomial estimate.
inline bool peak_probability_bound_check(const BlockConfig& cfg,
                                         std::span<const double> first_hit_probs,
                                         std::int64_t blocks) {
  for (double p : first_hit_probs) {
    const double c_emp = cfg.m * p;
    const double sigma =
        cfg.m * std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(blocks));
    if (c_emp > static_cast<double>(cfg.b_peak) + 3.0 * sigma + 1e-12) return false;
  }
  return true;
}

}  // namespace bbp
