#include "bbp/channel.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <catch2/catch_amalgamated.hpp>

#include <vector>

using namespace bbp;

TEST_CASE("channel output is the state/input overlap") {
  const BlockConfig cfg = validate_config(8, 1, 4);
  CHECK(channel_output(BeamIndex{2}, InputMask::of(cfg, {1, 2})) == 1);
  CHECK(channel_output(BeamIndex{3}, InputMask::of(cfg, {1, 2})) == 0);
  CHECK(channel_output(BeamIndex{5}, InputMask::empty()) == 0);
}

TEST_CASE("state sampling is deterministic under a fixed seed") {
  const BlockConfig cfg = validate_config(16, 1, 1);
  Rng a = make_rng(RngSeed{42});
  Rng b = make_rng(RngSeed{42});
  for (int i = 0; i < 100; ++i) CHECK(sample_state(cfg, a).value == sample_state(cfg, b).value);
}

TEST_CASE("state sampling is uniform (M = 2, frequency check)") {
  const BlockConfig cfg = validate_config(2, 1, 1);
  Rng rng = make_rng(RngSeed{7});
  const int draws = 100000;
  int ones = 0;
  for (int i = 0; i < draws; ++i) ones += sample_state(cfg, rng).value == 1;
  // 3 sigma around p = 1/2
  const double sigma = std::sqrt(0.25 * draws);
  CHECK(std::abs(ones - draws / 2.0) <= 3.0 * sigma);
}

TEST_CASE("state sampling passes a chi-square uniformity test (M = 16)") {
  const BlockConfig cfg = validate_config(16, 1, 1);
  Rng rng = make_rng(RngSeed{11});
  const int draws = 100000;
  std::vector<int> counts(16, 0);
  for (int i = 0; i < draws; ++i) counts[static_cast<std::size_t>(sample_state(cfg, rng).value - 1)]++;
  const double expected = draws / 16.0;
  double statistic = 0.0;
  for (int c : counts) statistic += (c - expected) * (c - expected) / expected;
  const boost::math::chi_squared dist(15);
  CHECK(statistic < boost::math::quantile(dist, 0.999));
}

TEST_CASE("run_block traces single probes") {
  const BlockConfig cfg = validate_config(2, 1, 1);
  // fixed policy: always probe {1}
  struct Probe1 final : Policy {
    std::string name() const override { return "probe1"; }
    PolicyMode mode() const override { return PolicyMode::canonical; }
    InputMask next_probe(const BlockConfig& c, std::int32_t, std::span<const std::int32_t>,
                         const AmbiguitySet&, Rng&) const override {
      return InputMask::of(c, {1});
    }
  } policy;

  Rng rng = make_rng(RngSeed{0});
  CHECK(run_block(cfg, policy, BeamIndex{1}, rng).outputs == std::vector<std::int32_t>{1});
  CHECK(run_block(cfg, policy, BeamIndex{2}, rng).outputs == std::vector<std::int32_t>{0});
}

TEST_CASE("run_block traces the bisection policy") {
  const BlockConfig cfg = validate_config(4, 2, 2);
  const auto policy = make_policy(cfg, "optimal");
  Rng rng = make_rng(RngSeed{0});
  const BlockTrajectory t = run_block(cfg, *policy, BeamIndex{4}, rng);
  CHECK(t.inputs[0].support() == std::vector<std::int32_t>{1, 2});
  CHECK(t.inputs[1].support() == std::vector<std::int32_t>{3});
  CHECK(t.outputs == std::vector<std::int32_t>{0, 0});
}

TEST_CASE("run_block aborts on an overweight probe") {
  // policy built against a looser config emits weight-2 probes
  const BlockConfig loose = validate_config(4, 1, 2);
  const BlockConfig strict = validate_config(4, 1, 1);
  struct Probe12 final : Policy {
    std::string name() const override { return "probe12"; }
    PolicyMode mode() const override { return PolicyMode::canonical; }
    InputMask next_probe(const BlockConfig&, std::int32_t, std::span<const std::int32_t>,
                         const AmbiguitySet&, Rng&) const override {
      return InputMask::of(BlockConfig{4, 1, 2}, {1, 2});
    }
  } policy;
  Rng rng = make_rng(RngSeed{0});
  CHECK_NOTHROW(run_block(loose, policy, BeamIndex{1}, rng));
  CHECK_THROWS_AS(run_block(strict, policy, BeamIndex{1}, rng), ConstraintError);
}

TEST_CASE("feedback is noiseless and one-use delayed") {
  const BlockConfig cfg = validate_config(8, 3, 4);
  const auto policy = make_policy(cfg, "optimal");
  Rng rng = make_rng(RngSeed{5});
  const BlockTrajectory t = run_block(cfg, *policy, BeamIndex{6}, rng);
  for (std::int32_t j = 0; j < cfg.l; ++j)
    CHECK(t.outputs[static_cast<std::size_t>(j)] ==
          channel_output(t.state, t.inputs[static_cast<std::size_t>(j)]));
}

TEST_CASE("identical (cfg, policy, state, seed) give identical trajectories") {
  const BlockConfig cfg = validate_config(16, 4, 4);
  for (const char* selector : {"optimal", "sweep", "random:3"}) {
    const auto policy = make_policy(cfg, selector, PolicyMode::seeded_random);
    Rng a = make_rng(RngSeed{99});
    Rng b = make_rng(RngSeed{99});
    const BlockTrajectory ta = run_block(cfg, *policy, BeamIndex{9}, a);
    const BlockTrajectory tb = run_block(cfg, *policy, BeamIndex{9}, b);
    CHECK(ta.outputs == tb.outputs);
    CHECK(ta.inputs == tb.inputs);
  }
}

// Two trajectories under the same policy and rng stream that first diverge in
// feedback at use p must agree on all probes through use p.
TEST_CASE("probes are causal in the feedback") {
  const BlockConfig cfg = validate_config(16, 5, 8);
  for (const char* selector : {"optimal", "sweep"}) {
    for (PolicyMode mode : {PolicyMode::canonical, PolicyMode::seeded_random}) {
      const auto policy = make_policy(cfg, selector, mode);
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng a = make_rng(RngSeed{seed});
        Rng b = make_rng(RngSeed{seed});
        const BlockTrajectory ta = run_block(cfg, *policy, BeamIndex{3}, a);
        const BlockTrajectory tb = run_block(cfg, *policy, BeamIndex{12}, b);
        std::int32_t p = cfg.l;
        for (std::int32_t j = 0; j < cfg.l; ++j) {
          if (ta.outputs[static_cast<std::size_t>(j)] != tb.outputs[static_cast<std::size_t>(j)]) {
            p = j + 1;
            break;
          }
        }
        for (std::int32_t j = 1; j <= p; ++j)
          CHECK(ta.inputs[static_cast<std::size_t>(j - 1)] ==
                tb.inputs[static_cast<std::size_t>(j - 1)]);
      }
    }
  }
}

TEST_CASE("flipping suffix feedback never changes earlier probes") {
  const BlockConfig cfg = validate_config(16, 5, 8);
  const auto policy = make_policy(cfg, "optimal");
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng = make_rng(RngSeed{seed});
    Rng state_rng = make_rng(RngSeed{seed + 1000});
    const BeamIndex state = sample_state(cfg, state_rng);
    const BlockTrajectory t = run_block(cfg, *policy, state, rng);

    for (std::int32_t p = 1; p <= cfg.l; ++p) {
      std::vector<std::int32_t> script = t.outputs;
      for (std::int32_t j = p; j <= cfg.l; ++j)
        script[static_cast<std::size_t>(j - 1)] ^= 1;
      Rng replay_rng = make_rng(RngSeed{seed});
      const ScriptedDrive drive = drive_policy_scripted(cfg, *policy, script, replay_rng);
      // probes for uses 1..p are emitted before the flipped feedback can act
      REQUIRE(drive.inputs.size() >= static_cast<std::size_t>(p));
      for (std::int32_t j = 1; j <= p; ++j)
        CHECK(drive.inputs[static_cast<std::size_t>(j - 1)] ==
              t.inputs[static_cast<std::size_t>(j - 1)]);
    }
  }
}

TEST_CASE("run_block leaves the true state consistent throughout") {
  const BlockConfig cfg = validate_config(32, 6, 16);
  const auto policy = make_policy(cfg, "optimal", PolicyMode::seeded_random);
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    Rng rng = make_trial_rng(RngSeed{17}, trial);
    const BeamIndex state = sample_state(cfg, rng);
    const BlockTrajectory t = run_block(cfg, *policy, state, rng);
    AmbiguitySet ambiguity = init_ambiguity(cfg);
    for (std::int32_t j = 0; j < cfg.l; ++j) {
      ambiguity = update_ambiguity(ambiguity, t.inputs[static_cast<std::size_t>(j)],
                                   t.outputs[static_cast<std::size_t>(j)]);
      CHECK(ambiguity.contains(state));
    }
  }
}
