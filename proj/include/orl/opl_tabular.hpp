#pragma once

#include <cstdint>
#include <vector>

#include "orl/dataset.hpp"
#include "orl/mdp.hpp"

namespace orl {

/// Count-ratio model with the pessimistic zero-count convention: unvisited
/// (h, s, a) cells get a uniform transition row and zero reward.
struct PluginModel {
  TabularMDP mdp;
  std::vector<std::int64_t> n_sa;  // [H][S][A]

  std::int64_t count(int h, int s, int a) const {
    return n_sa[(static_cast<std::size_t>(h) * mdp.S + s) * mdp.A + a];
  }
};

PluginModel plugin_model(const Dataset& data);

enum class BonusKind { hoeffding, bernstein };

struct BonusConfig {
  BonusKind kind = BonusKind::bernstein;
  double c_var = 2.0;    // scale of the variance-adaptive term
  double c_range = 2.0;  // scale of the range term
  double delta = 0.1;    // failure probability in the log factor
};

/// Union-bound log factor log(2 H S A / delta).
double bonus_log_factor(int S, int A, int H, double delta);

struct LearnedPolicyReport {
  Policy policy;
  std::vector<double> Q;  // [H][S][A] penalized value estimates
  std::vector<double> V;  // [H+1][S]
  double value_lower = 0.0;  // V at the empirical initial distribution

  double q(int S, int A, int h, int s, int a) const {
    return Q[(static_cast<std::size_t>(h) * S + s) * A + a];
  }
  double value(int S, int h, int s) const {
    return V[static_cast<std::size_t>(h) * S + s];
  }
};

/**
 * Value iteration on the plug-in model with per-cell uncertainty bonuses
 * subtracted before the backward maximization; iterates are clipped to the
 * feasible range and unvisited cells fall to zero through a maximal bonus.
 * Accepts empty datasets (everything unvisited).
 */
LearnedPolicyReport pvi(const Dataset& data, const BonusConfig& config);

/// Plain certainty-equivalence planning (zero bonus) on the plug-in model.
LearnedPolicyReport erm_policy(const Dataset& data);

struct AugmentedModel {
  TabularMDP mdp;  // S + 1 states; index S is the absorbing sink
  double off_support_mass = 0.0;
};

/// True-model diagnostic: transitions out of unvisited cells are redirected
/// to an absorbing zero-reward sink, and `off_support_mass` accumulates the
/// sink occupancy of the (extended) optimal policy over layers 2..H+1.
AugmentedModel augmented_mdp(const TabularMDP& mdp, const Dataset& data);

/// Optimal value minus the learned policy's value on the true instance.
double suboptimality(const TabularMDP& mdp, const LearnedPolicyReport& report);

}  // namespace orl
