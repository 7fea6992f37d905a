#pragma once

#include <cstdint>
#include <vector>

#include "orl/dataset.hpp"
#include "orl/mdp.hpp"
#include "orl/opl_tabular.hpp"

namespace orl {

/**
 * Episodic sampler that hides the instance from the algorithm.  Episode t
 * draws from the substream (seed, t) of the collection seed, so a run is
 * reproducible no matter how the policy sequence was chosen.
 */
class Environment {
 public:
  Environment(const TabularMDP& mdp, std::uint64_t seed);

  int S() const { return mdp_.S; }
  int A() const { return mdp_.A; }
  int H() const { return mdp_.H; }

  /// Runs one episode under `policy`; transitions land in `out` ([H] items).
  void episode(const Policy& policy, std::vector<Transition>& out);

  int episodes_run() const { return episodes_; }

 private:
  TabularMDP mdp_;
  std::uint64_t seed_;
  int episodes_ = 0;
};

/// Deployment record: the policy id of every episode plus batch boundaries.
/// A switch is an episode whose policy id differs from its predecessor's.
struct AdaptivityLedger {
  std::vector<std::uint64_t> policy_per_episode;
  std::vector<int> batch_starts;

  int batch_count() const { return static_cast<int>(batch_starts.size()); }
  int switch_count() const {
    int c = 0;
    for (std::size_t t = 1; t < policy_per_episode.size(); ++t)
      if (policy_per_episode[t] != policy_per_episode[t - 1]) ++c;
    return c;
  }
};

/// Indices of surviving candidates in the deterministic-policy enumeration.
struct PolicySet {
  int S = 0;
  int A = 0;
  int H = 0;
  std::vector<std::uint64_t> indices;

  Policy policy(std::uint64_t index) const {
    return deterministic_policy_from_index(index, S, A, H);
  }
};

/// Doubling stage lengths ceil(T^(1 - 2^-k)), last stage truncated so the
/// total is exactly T.  Stage count is at most ceil(log2 log2 T) + 2.
std::vector<int> stage_schedule(int T);

struct ApeveStageRecord {
  std::vector<std::uint64_t> active;  // candidates entering the stage
  std::vector<double> estimate;       // point estimates, aligned with active
  std::vector<double> lo, hi;         // interval bounds, aligned with active
  std::vector<std::uint64_t> eliminated;
};

struct ApeveResult {
  Policy chosen;
  PolicySet survivors;
  AdaptivityLedger ledger;
  std::vector<ApeveStageRecord> stages;
};

struct ApeveConfig {
  double delta = 0.1;
  double ci_scale = 0.5;        // interval half-width multiplier
  double crude_fraction = 0.25; // share of each stage spent on coverage
  std::uint64_t policy_cap = 1024;
};

/**
 * Stagewise explore-and-eliminate over all deterministic policies.  Every
 * stage deploys one coverage policy plus one visitation-maximizing policy
 * per (h, s, a) cell, all planned at the stage boundary from earlier data,
 * then prunes candidates whose interval falls below the best lower bound.
 * Interval estimates come from the count-based marginalized evaluator on
 * the stage's own data.
 */
ApeveResult apeve(Environment& env, int T, const ApeveConfig& config = {});

struct LarfeResult {
  Dataset data;
  PluginModel model;
  AdaptivityLedger ledger;
};

struct LarfeConfig {
  double delta = 0.1;
  double budget_scale = 4.0;  // episodes per layer: scale * H^2 S A iota / eps^2
};

/**
 * Reward-free exploration: two batches per layer, a crude reach pass and a
 * refined reach pass, each deploying one visitation-maximizing policy per
 * state-action cell of that layer.  The pooled data's plug-in model supports
 * planning any reward table afterwards.
 */
LarfeResult larfe(Environment& env, double epsilon,
                  const LarfeConfig& config = {});

struct RegretSummary {
  double total_regret = 0.0;
  int episodes = 0;
  int switches = 0;
  int batches = 0;
  bool best_value_survived = false;  // some optimal-value candidate survived
  bool elimination_sound = true;     // stages with all-valid intervals never
                                     // removed the last optimal candidate
};

/// Runs the stagewise algorithm against a known instance and scores it with
/// exact policy values.
RegretSummary apeve_regret(const TabularMDP& mdp, int T, std::uint64_t seed,
                           const ApeveConfig& config = {},
                           ApeveResult* detail = nullptr);

/// Plans `k_tables` seeded random reward tables on the learned model and
/// returns the worst true suboptimality across them.
double larfe_certificate(const TabularMDP& mdp, const PluginModel& model,
                         int k_tables, std::uint64_t seed);

}  // namespace orl
