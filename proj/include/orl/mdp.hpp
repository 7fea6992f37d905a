#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "orl/errors.hpp"

namespace orl {

enum class RewardNoise { deterministic, bernoulli };

/**
 * Finite-horizon time-inhomogeneous tabular MDP.  Transitions are stored
 * row-major as [h][s][a][s'], mean rewards as [h][s][a].  Mean rewards live
 * in [0, 1]; realized rewards are either the mean exactly or a Bernoulli
 * draw with that mean, per `noise`.
 */
struct TabularMDP {
  int S = 0;
  int A = 0;
  int H = 0;
  std::vector<double> d1;  // [S]
  std::vector<double> P;   // [H][S][A][S']
  std::vector<double> r;   // [H][S][A]
  RewardNoise noise = RewardNoise::deterministic;

  TabularMDP() = default;
  TabularMDP(int S_, int A_, int H_)
      : S(S_), A(A_), H(H_), d1(S_, 0.0),
        P(static_cast<std::size_t>(H_) * S_ * A_ * S_, 0.0),
        r(static_cast<std::size_t>(H_) * S_ * A_, 0.0) {}

  std::size_t pidx(int h, int s, int a, int sp) const {
    return ((static_cast<std::size_t>(h) * S + s) * A + a) * S + sp;
  }
  std::size_t ridx(int h, int s, int a) const {
    return (static_cast<std::size_t>(h) * S + s) * A + a;
  }
  double p(int h, int s, int a, int sp) const { return P[pidx(h, s, a, sp)]; }
  double& p(int h, int s, int a, int sp) { return P[pidx(h, s, a, sp)]; }
  double reward(int h, int s, int a) const { return r[ridx(h, s, a)]; }
  double& reward(int h, int s, int a) { return r[ridx(h, s, a)]; }

  std::uint64_t hash() const;
};

/// Per-step stochastic policy, [h][s][a].
struct Policy {
  int S = 0;
  int A = 0;
  int H = 0;
  std::vector<double> pi;

  Policy() = default;
  Policy(int S_, int A_, int H_)
      : S(S_), A(A_), H(H_),
        pi(static_cast<std::size_t>(H_) * S_ * A_, 0.0) {}

  static Policy uniform(int S, int A, int H);

  double prob(int h, int s, int a) const {
    return pi[(static_cast<std::size_t>(h) * S + s) * A + a];
  }
  double& prob(int h, int s, int a) {
    return pi[(static_cast<std::size_t>(h) * S + s) * A + a];
  }

  bool deterministic() const;
  /// Lowest-index action with positive probability (the action itself for
  /// deterministic policies).
  int action(int h, int s) const;

  std::uint64_t hash() const;
};

struct ValueTables {
  std::vector<double> Q;  // [H][S][A]
  std::vector<double> V;  // [H+1][S], layer H identically zero
  double v = 0.0;         // initial-state value under d1

  double q(int H_, int S_, int A_, int h, int s, int a) const {
    (void)H_;
    return Q[(static_cast<std::size_t>(h) * S_ + s) * A_ + a];
  }
};

struct OccupancyTables {
  std::vector<double> d_state;  // [H][S]
  std::vector<double> d_sa;     // [H][S][A]

  double state(int S, int h, int s) const {
    return d_state[static_cast<std::size_t>(h) * S + s];
  }
  double sa(int S, int A, int h, int s, int a) const {
    return d_sa[(static_cast<std::size_t>(h) * S + s) * A + a];
  }
};

struct ReturnVariance {
  double total = 0.0;             // Var of the episodic return
  double initial = 0.0;           // spread of the layer-1 value under d1
  std::vector<double> aleatoric;  // [H] transition-and-reward noise term
  std::vector<double> mismatch;   // [H] action-marginalization term
};

struct CoverageDiagnostics {
  double d_m_state = 0.0;  // min behavior occupancy over reachable (h, s)
  double d_m_sa = 0.0;     // min behavior occupancy over reachable (h, s, a)
  double tau_s = 0.0;      // sup of state occupancy ratios (inf if uncovered)
  double tau_a = 0.0;      // sup of action probability ratios on reachable states
  double c_star = 0.0;     // sup of target/behavior occupancy over target support
  double c_mu = 0.0;       // sup of c_star over deterministic policies
  bool c_mu_exact = true;  // false when enumeration hit the policy cap
  std::vector<std::uint8_t> reachable_state;  // [H][S]
};

/// Structural checks; returns human-readable violations, never throws.
/// Probability rows must sum to 1 within tol, entries and d1 nonnegative,
/// d1 summing to 1 within tol, mean rewards in [0, 1].
std::vector<std::string> validate_mdp(const TabularMDP& mdp,
                                      double tol = 1e-12);

std::vector<std::string> validate_policy(const TabularMDP& mdp,
                                         const Policy& policy,
                                         double tol = 1e-12);

/// Exact backward evaluation of a policy: Q_h = r_h + P_h V_{h+1}.
ValueTables policy_value(const TabularMDP& mdp, const Policy& policy);

/// Exact optimal control; ties broken toward the lowest action index.
std::pair<Policy, ValueTables> optimal_policy(const TabularMDP& mdp);

/// Forward state and state-action occupancies of a policy.
OccupancyTables occupancy(const TabularMDP& mdp, const Policy& policy);

/// Variance of the episodic return with its per-step decomposition into an
/// aleatoric term (reward and transition noise around the mean) and a
/// mismatch term (spread of Q over the policy's action distribution).  The
/// initial-state draw's contribution is reported separately, so that
/// total = initial + sum_h (aleatoric[h] + mismatch[h]) exactly.
ReturnVariance return_variance(const TabularMDP& mdp, const Policy& policy);

/// Information-theoretic floor for n * variance of unbiased off-policy value
/// estimates: occupancy-ratio-squared weighted conditional variances under
/// the behavior law.  Throws SupportViolation where the target visits cells
/// the behavior cannot.
double cr_lower_bound(const TabularMDP& mdp, const Policy& target,
                      const Policy& behavior);

/// Instance-dependent pessimistic-learning error scale at sample size n:
/// optimal-policy occupancy times sqrt(conditional variance over n times
/// behavior occupancy), summed over covered cells.
double intrinsic_bound(const TabularMDP& mdp, const Policy& behavior,
                       std::int64_t n);

/// Occupancy-based coverage numbers for a (target, behavior) pair.
/// Enumerates deterministic policies exactly for c_mu up to `policy_cap`
/// policies, otherwise falls back to seeded sampling and clears c_mu_exact.
CoverageDiagnostics coverage_diagnostics(const TabularMDP& mdp,
                                         const Policy& target,
                                         const Policy& behavior,
                                         std::uint64_t policy_cap = 4096);

struct RingFixture {
  TabularMDP mdp;
  Policy behavior;
  Policy target;
  double a_eta = 0.0;  // per-step second moment of the action ratio
};

/// Odd cycle of states with left/right deterministic moves; behavior and
/// target put opposite weight eta on the two actions.  Reward 1 at state 0
/// on the final step.  Var of the cumulative action ratio is a_eta^H - 1.
RingFixture ring_mdp(int n_states, double eta, int H);

/// Seeded random instance; `stochasticity` in [0, 1] mixes a deterministic
/// kernel (0) with a random one (1).  At 0 the rewards are noise-free.
TabularMDP random_mdp(std::uint64_t seed, int S, int A, int H,
                      double stochasticity);

/// Number of deterministic policies A^(S*H), saturating at 2^63-1.
std::uint64_t deterministic_policy_count(int S, int A, int H);

/// Policy whose action table is `index` written base A over the (h, s) grid,
/// h-major.  index must be < deterministic_policy_count(S, A, H).
Policy deterministic_policy_from_index(std::uint64_t index, int S, int A,
                                       int H);

/// Fixture document writer/reader; fields in order S, A, H, d1, P, r,
/// reward_noise with transition rows flattened by (h, s, a).
void write_mdp(std::ostream& os, const TabularMDP& mdp);
TabularMDP read_mdp(std::istream& is);

}  // namespace orl
