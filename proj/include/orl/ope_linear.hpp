#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orl/dataset.hpp"
#include "orl/mdp.hpp"

namespace orl {

/// Dense feature table over state-action pairs, [s][a][k].
struct FeatureMap {
  int S = 0;
  int A = 0;
  int d = 0;
  std::vector<double> phi;

  FeatureMap() = default;
  FeatureMap(int S_, int A_, int d_)
      : S(S_), A(A_), d(d_),
        phi(static_cast<std::size_t>(S_) * A_ * d_, 0.0) {}

  const double* feature(int s, int a) const {
    return &phi[(static_cast<std::size_t>(s) * A + a) * d];
  }
  double* feature(int s, int a) {
    return &phi[(static_cast<std::size_t>(s) * A + a) * d];
  }

  /// One-hot table of dimension S * A.
  static FeatureMap indicator(int S, int A);
};

/// Euclidean feature norms must not exceed 1 (within tol); returns the
/// violations, never throws.
std::vector<std::string> validate_features(const FeatureMap& features,
                                           double tol = 1e-9);

/// Feature-file round-trip: header `d`, then one `s a v1 ... vd` row per
/// state-action pair sorted by (s, a).
void write_features(std::ostream& os, const FeatureMap& features);
FeatureMap read_features(std::istream& is, int S, int A);

struct FqeResult {
  int d = 0;
  int H = 0;
  std::vector<double> w;   // [H][d] backward regression weights
  double value = 0.0;      // estimate under the empirical initial states
  double condition = 0.0;  // pooled gram matrix condition number
};

/// Q value implied by an FQE fit at layer h.
double fqe_q(const FeatureMap& features, const FqeResult& fit, int h, int s,
             int a);

/**
 * Fitted Q evaluation with one pooled ridge regression per backward step:
 * w_h solves the pooled gram system against rewards plus the next-step
 * policy-averaged fit.  `lambda` < 0 selects the default 1e-6 * (n * H).
 * With lambda == 0 a singular gram matrix raises RankDeficiencyError.
 */
FqeResult fqe_linear(const Dataset& data, const FeatureMap& features,
                     const Policy& target, double lambda = -1.0);

struct BootstrapResult {
  double point = 0.0;     // estimate on the original data
  double lo = 0.0;        // percentile interval at level 1 - alpha
  double hi = 0.0;
  double variance = 0.0;  // variance of sqrt(N) * (replicate - point)
  std::vector<double> replicates;
};

/// Trajectory-level resampling of the FQE estimate; replicate b draws its
/// indices from the substream (seed, b).
BootstrapResult bootstrap_fqe(const Dataset& data, const FeatureMap& features,
                              const Policy& target, double lambda, int B,
                              double alpha, std::uint64_t seed);

/// Exact large-sample variance of sqrt(N) * (estimate - truth) for the
/// pooled-regression evaluator under the given behavior law, computed from
/// closed-form moments of the per-step regression residuals.  Restricted to
/// S * A <= 64 and H <= 8.
double asymptotic_variance_oracle(const TabularMDP& mdp,
                                  const FeatureMap& features,
                                  const Policy& target,
                                  const Policy& behavior);

/// Restricted chi-square divergence between the average occupancy laws of
/// target and behavior over the span of the features: the best predictable
/// mean ratio minus one.  Zero when target equals behavior and the span
/// contains constants.
double chi_square_divergence(const TabularMDP& mdp, const FeatureMap& features,
                             const Policy& target, const Policy& behavior);

}  // namespace orl
