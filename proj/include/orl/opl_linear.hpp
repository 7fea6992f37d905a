#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "orl/dataset.hpp"
#include "orl/mdp.hpp"
#include "orl/ope_linear.hpp"
#include "orl/opl_tabular.hpp"

namespace orl {

/// Per-layer regression design: the (possibly weighted) Gram matrix, its
/// factorization metadata, and the sample count feeding it.
struct GramState {
  Eigen::MatrixXd lambda_mat;
  double condition = 0.0;
  std::int64_t samples = 0;
};

/**
 * Pessimistic fitted value iteration with per-layer ridge regressions and
 * elliptical bonuses beta * sqrt(phi' Lambda^-1 phi).  `beta` < 0 selects
 * the default d * H.  Gram solves refuse condition numbers above 1e12.
 */
LearnedPolicyReport pfvi(const Dataset& data, const FeatureMap& features,
                         double lambda, double beta = -1.0,
                         std::vector<GramState>* grams = nullptr);

/// Conditional-variance estimate for layer h targets r + v_next(s'): two
/// moment ridge regressions, difference clipped to [1, H^2].  Returned per
/// state-action cell, [s][a].
std::vector<double> variance_estimate(const Dataset& data, int h,
                                      const FeatureMap& features,
                                      const std::vector<double>& v_next,
                                      double lambda);

struct VwBonusConfig {
  double c = 1.0;        // elliptical term scale
  double c_prime = 0.0;  // higher-order additive term scale
  double delta = 0.1;
};

/// Variance-weighted variant: samples are reweighted by the estimated
/// conditional variance before the Gram solve, and the bonus is
/// c * sqrt(d * iota) * sqrt(phi' Lambda^-1 phi) + c' * H^4 sqrt(d) iota / n
/// with iota = log(2 d H n / delta).
LearnedPolicyReport vw_pfvi(const Dataset& data, const FeatureMap& features,
                            double lambda, const VwBonusConfig& config = {},
                            std::vector<GramState>* grams = nullptr);

struct LinearMdpFixture {
  TabularMDP mdp;
  FeatureMap features;
  Policy behavior;
  std::vector<double> theta;  // [H][d] reward parameters
};

struct LinearFixtureOptions {
  double anchor_spread = 0.6;  // 0 collapses all anchors to uniform
  double behavior_skew = 0.6;  // 0 gives the uniform behavior policy
  int deterministic_except = -1;  // >= 0: all layers deterministic but this one
  bool all_deterministic = false;
  bool bernoulli_rewards = true;
};

/**
 * Group-structured linear instance: features are one-hot over d groups of
 * state-action pairs, transitions mix d anchor next-state distributions, so
 * every layer is exactly realizable.  Deterministic variants replace the
 * anchors by point masses.
 */
LinearMdpFixture linear_mdp_fixture(std::uint64_t seed, int S, int A, int d,
                                    int H,
                                    const LinearFixtureOptions& opts = {});

}  // namespace orl
