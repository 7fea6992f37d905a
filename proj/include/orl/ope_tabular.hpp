#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "orl/dataset.hpp"
#include "orl/mdp.hpp"

namespace orl {

enum class OpeMethod { is, step_is, smis, tmis };

const char* ope_method_name(OpeMethod m);
OpeMethod parse_ope_method(const std::string& name);

struct EstimateReport {
  double value = 0.0;
  /// For the model-backed estimator this is the value computed through the
  /// plug-in model route; identical to `value` for the others.
  double model_value = 0.0;
  std::map<std::string, double> diagnostics;
};

struct MseSummary {
  OpeMethod method = OpeMethod::is;
  int n = 0;
  int reps = 0;
  double true_value = 0.0;
  double mean_estimate = 0.0;
  double mse = 0.0;
  double se = 0.0;  // standard error of the mse estimate
  double rel_rmse = 0.0;
  int error_count = 0;  // replications rejected by the estimator
};

/// Full-trajectory importance sampling.  Throws SupportViolation when an
/// observed action has zero behavior probability; estimates are not clipped.
EstimateReport is_estimate(const Dataset& data, const Policy& target,
                           const Policy& behavior);

/// Per-decision importance sampling (ratio up to the reward's step).
EstimateReport step_is_estimate(const Dataset& data, const Policy& target,
                                const Policy& behavior);

/// State-marginalized estimator: empirical state marginals with
/// action-ratio-weighted transition and reward averages, rolled forward from
/// the empirical initial distribution.  Unvisited states contribute zero.
EstimateReport smis_estimate(const Dataset& data, const Policy& target,
                             const Policy& behavior);

/// Model-backed marginalized estimator built from per-layer counts; needs no
/// behavior policy.  `value` follows the marginal recursion, `model_value`
/// the plug-in model rollout; the two agree up to float roundoff.
EstimateReport tmis_estimate(const Dataset& data, const Policy& target);

/// Same estimator on the time-homogeneous view: one pooled transition and
/// reward model rolled forward H steps.
EstimateReport tmis_pooled_estimate(const Dataset& data, const Policy& target);

/// Replicated squared-error study of one estimator on a known instance.
/// Replication r samples with a substream of (seed, r); estimator rejections
/// are counted and excluded rather than fatal.
MseSummary mse_harness(const TabularMDP& mdp, const Policy& target,
                       const Policy& behavior, OpeMethod method, int n,
                       int reps, std::uint64_t seed);

}  // namespace orl
