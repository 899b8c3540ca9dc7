#pragma once

#include "bbp/policy.hpp"

#include <bit>
#include <cstdint>
#include <optional>
#include <vector>

namespace bbp {

inline constexpr std::uint64_t kDefaultOracleBudget = 10'000'000;

namespace detail {

inline constexpr std::uint64_t kCountSaturated = UINT64_MAX;

inline std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return (a > kCountSaturated - b) ? kCountSaturated : a + b;
}

inline std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > kCountSaturated / b) return kCountSaturated;
  return a * b;
}

}  // namespace detail

// A deterministic adaptive policy as an explicit probe per feedback history.
// Node 0 is the root (empty history); the children of node i are 2i+1 on
// feedback 1 and 2i+2 on feedback 0. Depth-j nodes hold the probe for channel
// use j+1, so a depth-L tree has 2^L - 1 nodes.
class PolicyTree {
 public:
  PolicyTree(const BlockConfig& cfg, std::vector<InputMask> nodes) : cfg_(cfg) {
    if (nodes.size() != node_count_for(cfg.l))
      throw InvariantError("policy tree node count does not match depth L");
    for (const InputMask& probe : nodes) validate_probe(cfg, probe);
    nodes_ = std::move(nodes);
  }

  static std::size_t node_count_for(std::int32_t l) {
    if (l > 24)
      throw BudgetError("policy tree too deep to materialize explicitly",
                        detail::kCountSaturated, (1u << 24));
    return (std::size_t{1} << static_cast<unsigned>(l)) - 1;
  }

  static std::size_t child(std::size_t node, std::int32_t y) {
    return 2 * node + (y == 1 ? 1 : 2);
  }

  static void validate_probe(const BlockConfig& cfg, const InputMask& probe) {
    if (probe.weight() > cfg.b_peak)
      throw ConstraintError("policy tree probe heavier than b_peak");
    if (!probe.support().empty() && probe.support().back() > cfg.m)
      throw ConstraintError("policy tree probe index out of range [1..M]");
  }

  const BlockConfig& config() const { return cfg_; }
  const std::vector<InputMask>& nodes() const { return nodes_; }
  const InputMask& probe_at(std::size_t node) const { return nodes_[node]; }

 private:
  BlockConfig cfg_;
  std::vector<InputMask> nodes_;
};

// One depth-L feedback history with the states routed to it. Histories no
// state reaches have empty `members`; the reachable ones partition [1..M].
struct Leaf {
  std::vector<std::int32_t> history;
  std::vector<std::int32_t> members;
};

namespace detail {

inline void collect_leaves(const PolicyTree& tree, std::size_t node, std::int32_t depth,
                           const std::vector<std::int32_t>& members,
                           std::vector<std::int32_t>& history, std::vector<Leaf>& out) {
  if (depth == tree.config().l) {
    out.push_back(Leaf{history, members});
    return;
  }
  const InputMask& probe = tree.probe_at(node);
  std::vector<std::int32_t> in;
  std::vector<std::int32_t> rest;
  for (std::int32_t s : members) (probe.contains(s) ? in : rest).push_back(s);
  for (std::int32_t y : {1, 0}) {
    history.push_back(y);
    collect_leaves(tree, PolicyTree::child(node, y), depth + 1, y == 1 ? in : rest, history,
                   out);
    history.pop_back();
  }
}

}  // namespace detail

inline std::vector<Leaf> leaf_partition(const PolicyTree& tree) {
  std::vector<Leaf> leaves;
  std::vector<std::int32_t> members(static_cast<std::size_t>(tree.config().m));
  for (std::int32_t i = 0; i < tree.config().m; ++i)
    members[static_cast<std::size_t>(i)] = i + 1;
  std::vector<std::int32_t> history;
  detail::collect_leaves(tree, 0, 0, members, history, leaves);
  return leaves;
}

// Exact expected per-block distortion of a deterministic policy:
// sum over leaves of 2 [|B_leaf| - 1]^+ / M, where B_leaf is the set of
// states the feedback routes to that leaf.
inline DistortionValue evaluate_policy_exact(const BlockConfig& cfg, const PolicyTree& tree) {
  if (cfg.l != tree.config().l)
    throw InvariantError("config L does not match policy tree depth");
  for (const InputMask& probe : tree.nodes()) PolicyTree::validate_probe(cfg, probe);

  std::int64_t total = 0;
  for (const Leaf& leaf : leaf_partition(tree)) {
    const auto b = static_cast<std::int64_t>(leaf.members.size());
    if (b > 1) total += b - 1;
  }
  return DistortionValue(Rat(2 * total, cfg.m));
}

// Exact per-feedback-class statistics of a deterministic policy: class
// probability plus the range of final ambiguity sizes over reachable leaves.
struct ExactClassStat {
  OutcomeClass cls;
  Rat probability{0};
  std::optional<std::int32_t> min_size;
  std::optional<std::int32_t> max_size;
};

inline std::vector<ExactClassStat> exact_class_stats(const PolicyTree& tree) {
  const std::int32_t l = tree.config().l;
  std::vector<ExactClassStat> stats(static_cast<std::size_t>(l) + 1);
  for (std::int32_t k = 1; k <= l; ++k)
    stats[static_cast<std::size_t>(k - 1)].cls = OutcomeClass::hit_at(k);
  stats[static_cast<std::size_t>(l)].cls = OutcomeClass::all_zero();

  for (const Leaf& leaf : leaf_partition(tree)) {
    if (leaf.members.empty()) continue;
    const OutcomeClass cls = classify(leaf.history);
    auto& row = stats[cls.is_all_zero() ? static_cast<std::size_t>(l)
                                        : static_cast<std::size_t>(cls.first_hit - 1)];
    const auto size = static_cast<std::int32_t>(leaf.members.size());
    row.probability += Rat(size, tree.config().m);
    row.min_size = row.min_size ? std::min(*row.min_size, size) : size;
    row.max_size = row.max_size ? std::max(*row.max_size, size) : size;
  }
  return stats;
}

namespace detail {

// Counting and minimization both work on the symmetry-reduced policy space:
// with a uniform prior and permutation-symmetric loss, only |probe ∩ C|
// matters at a node whose consistent set is C (probing outside C never routes
// any state), so a policy is characterized up to relabeling by one
// intersection size per node and branches minimize independently.
class ReducedOracle {
 public:
  explicit ReducedOracle(const BlockConfig& cfg)
      : cfg_(cfg),
        count_memo_(table_size(cfg), kCountSaturated - 1),
        min_memo_(table_size(cfg), -1) {}

  std::uint64_t tree_count() { return count(cfg_.m, 0); }

  // Minimal sum of [|B_leaf| - 1]^+ over subtrees below a node with |C| = b.
  std::int64_t min_leaf_sum(std::int32_t b, std::int32_t depth) {
    if (depth == cfg_.l) return b > 1 ? b - 1 : 0;
    std::int64_t& memo = min_memo_[index(b, depth)];
    if (memo >= 0) return memo;
    std::int64_t best = -1;
    const std::int32_t t_max = std::min(b, cfg_.b_peak);
    for (std::int32_t t = 0; t <= t_max; ++t) {
      const std::int64_t v = min_leaf_sum(t, depth + 1) + min_leaf_sum(b - t, depth + 1);
      if (best < 0 || v < best) best = v;
    }
    return memo = best;
  }

  std::int32_t best_split(std::int32_t b, std::int32_t depth) {
    const std::int64_t target = min_leaf_sum(b, depth);
    const std::int32_t t_max = std::min(b, cfg_.b_peak);
    for (std::int32_t t = 0; t <= t_max; ++t) {
      if (min_leaf_sum(t, depth + 1) + min_leaf_sum(b - t, depth + 1) == target) return t;
    }
    throw InvariantError("reduced oracle lost its own minimum");
  }

 private:
  static std::size_t table_size(const BlockConfig& cfg) {
    return static_cast<std::size_t>(cfg.m + 1) * static_cast<std::size_t>(cfg.l + 1);
  }
  std::size_t index(std::int32_t b, std::int32_t depth) const {
    return static_cast<std::size_t>(depth) * static_cast<std::size_t>(cfg_.m + 1) +
           static_cast<std::size_t>(b);
  }

  std::uint64_t count(std::int32_t b, std::int32_t depth) {
    if (depth == cfg_.l) return 1;
    std::uint64_t& memo = count_memo_[index(b, depth)];
    if (memo != kCountSaturated - 1) return memo;
    std::uint64_t total = 0;
    const std::int32_t t_max = std::min(b, cfg_.b_peak);
    for (std::int32_t t = 0; t <= t_max; ++t)
      total = sat_add(total, sat_mul(count(t, depth + 1), count(b - t, depth + 1)));
    return memo = total;
  }

  BlockConfig cfg_;
  std::vector<std::uint64_t> count_memo_;
  std::vector<std::int64_t> min_memo_;
};

inline void rebuild_argmin(const BlockConfig& cfg, ReducedOracle& oracle,
                           const std::vector<std::int32_t>& members, std::size_t node,
                           std::int32_t depth, std::vector<InputMask>& nodes) {
  if (depth == cfg.l) return;
  const auto b = static_cast<std::int32_t>(members.size());
  const std::int32_t t = oracle.best_split(b, depth);
  std::vector<std::int32_t> probed(members.begin(), members.begin() + t);
  std::vector<std::int32_t> rest(members.begin() + t, members.end());
  nodes[node] = InputMask::of(cfg, probed);
  rebuild_argmin(cfg, oracle, probed, PolicyTree::child(node, 1), depth + 1, nodes);
  rebuild_argmin(cfg, oracle, rest, PolicyTree::child(node, 0), depth + 1, nodes);
}

}  // namespace detail

// Number of distinct policies in the symmetry-reduced space (one intersection
// size per feedback-history node). Saturates at UINT64_MAX.
inline std::uint64_t reduced_policy_count(const BlockConfig& cfg) {
  return detail::ReducedOracle(cfg).tree_count();
}

// Number of explicit policy trees over all weight-<= b_peak masks. Saturates.
inline std::uint64_t naive_policy_count(const BlockConfig& cfg) {
  // masks = sum_{w=0}^{b_peak} C(m, w)
  std::uint64_t masks = 0;
  std::uint64_t binom = 1;  // C(m, 0)
  for (std::int32_t w = 0; w <= cfg.b_peak; ++w) {
    masks = detail::sat_add(masks, binom);
    if (binom == detail::kCountSaturated) break;
    binom = detail::sat_mul(binom, static_cast<std::uint64_t>(cfg.m - w));
    if (binom != detail::kCountSaturated) binom /= static_cast<std::uint64_t>(w + 1);
  }
  if (cfg.l > 24) return detail::kCountSaturated;
  const std::uint64_t nodes = (std::uint64_t{1} << static_cast<unsigned>(cfg.l)) - 1;
  std::uint64_t total = 1;
  for (std::uint64_t i = 0; i < nodes; ++i) total = detail::sat_mul(total, masks);
  return total;
}

struct OracleResult {
  DistortionValue min_distortion;
  PolicyTree argmin_tree;
  // Size of the policy space the search covered: every reduced tree for the
  // symmetry-reduced engine, every explicit tree for the naive one.
  std::uint64_t policies_evaluated = 0;
};

// Exact global minimum of expected distortion over deterministic adaptive
// policies (randomized policies are dominated: the objective is affine in the
// randomization). Refuses instances whose reduced enumeration exceeds
// `budget`.
inline OracleResult minimize_over_policies(const BlockConfig& cfg,
                                           std::uint64_t budget = kDefaultOracleBudget) {
  const std::uint64_t count = reduced_policy_count(cfg);
  if (count > budget)
    throw BudgetError("reduced policy enumeration size exceeds budget", count, budget);

  detail::ReducedOracle oracle(cfg);
  const std::int64_t leaf_sum = oracle.min_leaf_sum(cfg.m, 0);

  std::vector<InputMask> nodes(PolicyTree::node_count_for(cfg.l));
  std::vector<std::int32_t> members(static_cast<std::size_t>(cfg.m));
  for (std::int32_t i = 0; i < cfg.m; ++i) members[static_cast<std::size_t>(i)] = i + 1;
  detail::rebuild_argmin(cfg, oracle, members, 0, 0, nodes);

  OracleResult result{DistortionValue(Rat(2 * leaf_sum, cfg.m)),
                      PolicyTree(cfg, std::move(nodes)), count};
  if (evaluate_policy_exact(cfg, result.argmin_tree) != result.min_distortion)
    throw InvariantError("argmin tree does not achieve the oracle minimum");
  return result;
}

namespace detail {

inline std::int64_t eval_mask_tree(const std::vector<std::uint64_t>& probes, std::size_t node,
                                   std::int32_t depth, std::int32_t l, std::uint64_t consistent) {
  if (consistent == 0) return 0;
  if (depth == l) {
    const auto b = static_cast<std::int64_t>(std::popcount(consistent));
    return b > 1 ? b - 1 : 0;
  }
  const std::uint64_t probe = probes[node];
  return eval_mask_tree(probes, PolicyTree::child(node, 1), depth + 1, l, consistent & probe) +
         eval_mask_tree(probes, PolicyTree::child(node, 0), depth + 1, l, consistent & ~probe);
}

}  // namespace detail

// Ground-truth cross-check for the reduced engine: literally enumerates every
// assignment of a weight-<= b_peak mask to every feedback-history node and
// evaluates each policy tree. Desk scale only.
inline OracleResult minimize_over_policies_naive(const BlockConfig& cfg,
                                                 std::uint64_t budget = kDefaultOracleBudget) {
  const std::uint64_t count = naive_policy_count(cfg);
  if (count > budget)
    throw BudgetError("naive policy enumeration size exceeds budget", count, budget);
  if (cfg.m > 64)
    throw BudgetError("naive enumeration supports M <= 64", detail::kCountSaturated, budget);

  const std::uint64_t all = cfg.m == 64 ? ~std::uint64_t{0}
                                        : (std::uint64_t{1} << static_cast<unsigned>(cfg.m)) - 1;
  std::vector<std::uint64_t> masks{0};
  for (std::int32_t w = 1; w <= cfg.b_peak; ++w) {
    // all w-subsets of [0..m), standard combination odometer
    std::vector<std::int32_t> idx(static_cast<std::size_t>(w));
    for (std::int32_t i = 0; i < w; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (;;) {
      std::uint64_t mask = 0;
      for (std::int32_t i : idx) mask |= std::uint64_t{1} << i;
      masks.push_back(mask);
      std::int32_t pos = w - 1;
      while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == cfg.m - w + pos) --pos;
      if (pos < 0) break;
      std::int32_t next = ++idx[static_cast<std::size_t>(pos)];
      for (std::int32_t i = pos + 1; i < w; ++i) idx[static_cast<std::size_t>(i)] = ++next;
    }
  }

  const std::size_t nodes = PolicyTree::node_count_for(cfg.l);
  std::vector<std::size_t> assignment(nodes, 0);
  std::vector<std::uint64_t> probes(nodes, 0);

  std::int64_t best = -1;
  std::vector<std::size_t> best_assignment;
  std::uint64_t evaluated = 0;
  for (;;) {
    for (std::size_t i = 0; i < nodes; ++i) probes[i] = masks[assignment[i]];
    const std::int64_t value = detail::eval_mask_tree(probes, 0, 0, cfg.l, all);
    ++evaluated;
    if (best < 0 || value < best) {
      best = value;
      best_assignment = assignment;
    }
    // odometer over node assignments
    std::size_t pos = 0;
    while (pos < nodes && ++assignment[pos] == masks.size()) assignment[pos++] = 0;
    if (pos == nodes) break;
  }

  std::vector<InputMask> tree_nodes(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    std::vector<std::int32_t> support;
    for (std::int32_t s = 1; s <= cfg.m; ++s)
      if (masks[best_assignment[i]] >> (s - 1) & 1) support.push_back(s);
    tree_nodes[i] = InputMask::of(cfg, std::move(support));
  }
  return OracleResult{DistortionValue(Rat(2 * best, cfg.m)),
                      PolicyTree(cfg, std::move(tree_nodes)), evaluated};
}

namespace detail {

inline void materialize_policy(const BlockConfig& cfg, const Policy& policy, std::size_t node,
                               std::int32_t use_index, std::vector<std::int32_t> members,
                               std::vector<std::int32_t>& feedback, Rng rng,
                               std::vector<InputMask>& nodes) {
  if (use_index > cfg.l) return;
  InputMask probe;
  if (!members.empty())
    probe = policy.next_probe(cfg, use_index, feedback, AmbiguitySet::of(members), rng);
  nodes[node] = probe;
  for (std::int32_t y : {1, 0}) {
    feedback.push_back(y);
    materialize_policy(cfg, policy, PolicyTree::child(node, y), use_index + 1,
                       refine_members(members, probe, y), feedback, rng, nodes);
    feedback.pop_back();
  }
}

}  // namespace detail

// Materializes an adaptive policy as an explicit tree by replaying it over
// every feedback history. Seeded-random policies become the deterministic
// tree realized by `seed`; histories no state can reach get empty probes.
inline PolicyTree policy_to_tree(const BlockConfig& cfg, const Policy& policy, RngSeed seed) {
  std::vector<InputMask> nodes(PolicyTree::node_count_for(cfg.l));
  std::vector<std::int32_t> members(static_cast<std::size_t>(cfg.m));
  for (std::int32_t i = 0; i < cfg.m; ++i) members[static_cast<std::size_t>(i)] = i + 1;
  std::vector<std::int32_t> feedback;
  detail::materialize_policy(cfg, policy, 0, 1, std::move(members), feedback, make_rng(seed),
                             nodes);
  return PolicyTree(cfg, std::move(nodes));
}

}  // namespace bbp
