#pragma once

#include "bbp/analysis.hpp"
#include "bbp/channel.hpp"

#include <boost/math/distributions/binomial.hpp>

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bbp {

// Per-block result kept by the harness: feedback class, final ambiguity size,
// and the realized distortion (0 or 2).
struct TrialOutcome {
  OutcomeClass cls;
  std::int32_t final_ambiguity_size = 0;
  std::int32_t distortion = 0;
};

struct ClassHistogramRow {
  OutcomeClass cls;
  std::int64_t count = 0;
  double probability = 0.0;
  double mean_final_size = 0.0;
};

// Clopper-Pearson interval on P(distortion = 2), scaled onto [0, 2].
struct BinomialInterval {
  double lower = 0.0;
  double upper = 0.0;
  double confidence = 0.95;
};

struct SimulationReport {
  BlockConfig cfg;
  std::string policy_name;
  PolicyMode mode = PolicyMode::canonical;
  std::int64_t blocks = 0;
  RngSeed seed;
  std::int64_t error_count = 0;  // blocks estimated wrong (distortion 2)
  double mean_distortion = 0.0;
  double std_error = 0.0;
  std::optional<BinomialInterval> exact_interval;  // reported near 0 and 2
  std::vector<ClassHistogramRow> class_histogram;
  DistortionFormulaReport theoretical;
};

// Runs `blocks` independent blocks. Trial i draws its own rng from
// mix_seed(seed, i), so outcomes do not depend on execution order.
inline std::vector<TrialOutcome> run_trials(const BlockConfig& cfg, const Policy& policy,
                                            std::int64_t blocks, RngSeed seed) {
  if (blocks < 1) throw ConfigError(ConfigErrorKind::out_of_range, "blocks must be >= 1");
  std::vector<TrialOutcome> outcomes;
  outcomes.reserve(static_cast<std::size_t>(blocks));
  for (std::int64_t i = 0; i < blocks; ++i) {
    Rng rng = make_trial_rng(seed, static_cast<std::uint64_t>(i));
    const BeamIndex state = sample_state(cfg, rng);
    const BlockTrajectory trajectory = run_block(cfg, policy, state, rng);

    AmbiguitySet ambiguity = init_ambiguity(cfg);
    for (std::int32_t j = 0; j < cfg.l; ++j)
      ambiguity = update_ambiguity(ambiguity, trajectory.inputs[static_cast<std::size_t>(j)],
                                   trajectory.outputs[static_cast<std::size_t>(j)]);
    const Estimate est = estimate(ambiguity);

    outcomes.push_back(TrialOutcome{
        classify(trajectory.outputs), ambiguity.size(),
        state.value == est.s_hat.value ? 0 : 2});
  }
  return outcomes;
}

// Empirical feedback-class histogram: hit classes k = 1..L in order, then the
// all-zero class.
inline std::vector<ClassHistogramRow> summarize_classes(const BlockConfig& cfg,
                                                        std::span<const TrialOutcome> outcomes) {
  std::vector<ClassHistogramRow> rows(static_cast<std::size_t>(cfg.l) + 1);
  std::vector<std::int64_t> size_sums(rows.size(), 0);
  for (std::int32_t k = 1; k <= cfg.l; ++k)
    rows[static_cast<std::size_t>(k - 1)].cls = OutcomeClass::hit_at(k);
  rows.back().cls = OutcomeClass::all_zero();

  for (const TrialOutcome& outcome : outcomes) {
    const std::size_t at = outcome.cls.is_all_zero()
                               ? rows.size() - 1
                               : static_cast<std::size_t>(outcome.cls.first_hit - 1);
    rows[at].count += 1;
    size_sums[at] += outcome.final_ambiguity_size;
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].probability =
        static_cast<double>(rows[i].count) / static_cast<double>(outcomes.size());
    rows[i].mean_final_size =
        rows[i].count > 0 ? static_cast<double>(size_sums[i]) / static_cast<double>(rows[i].count)
                          : 0.0;
  }
  return rows;
}

inline SimulationReport run_experiment(const BlockConfig& cfg, const Policy& policy,
                                       std::int64_t blocks, RngSeed seed) {
  const std::vector<TrialOutcome> outcomes = run_trials(cfg, policy, blocks, seed);

  SimulationReport report;
  report.cfg = cfg;
  report.policy_name = policy.name();
  report.mode = policy.mode();
  report.blocks = blocks;
  report.seed = seed;
  for (const TrialOutcome& outcome : outcomes) report.error_count += outcome.distortion == 2;

  // Per-trial values are 0/2 integers, so moments are exact integer sums and
  // the report is bit-identical for a given (cfg, policy, blocks, seed).
  const auto n = static_cast<double>(blocks);
  report.mean_distortion = 2.0 * static_cast<double>(report.error_count) / n;
  if (blocks > 1) {
    const double sum_sq = 4.0 * static_cast<double>(report.error_count);
    const double variance =
        (sum_sq - n * report.mean_distortion * report.mean_distortion) / (n - 1.0);
    report.std_error = std::sqrt(std::max(variance, 0.0) / n);
  }

  // The normal interval degenerates near the boundary; attach an exact
  // binomial one there.
  if (report.mean_distortion <= 0.1 || report.mean_distortion >= 1.9) {
    using boost::math::binomial_distribution;
    const double k = static_cast<double>(report.error_count);
    const double alpha = 0.05;
    BinomialInterval interval;
    interval.lower = 2.0 * binomial_distribution<>::find_lower_bound_on_p(n, k, alpha / 2);
    interval.upper = 2.0 * binomial_distribution<>::find_upper_bound_on_p(n, k, alpha / 2);
    interval.confidence = 1.0 - alpha;
    report.exact_interval = interval;
  }

  report.class_histogram = summarize_classes(cfg, outcomes);
  report.theoretical = min_distortion(cfg);
  return report;
}

}  // namespace bbp
