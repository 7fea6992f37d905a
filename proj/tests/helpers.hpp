#pragma once

// Brute-force oracles and fixture builders shared by the test suites.  These
// deliberately re-derive quantities by exhaustive enumeration or direct
// summation, independent of the library's recursions.

#include <cmath>
#include <vector>

#include "orl/dataset.hpp"
#include "orl/mdp.hpp"
#include "orl/rng.hpp"

namespace testutil {

inline orl::Policy random_policy(int S, int A, int H, orl::Rng& rng) {
  orl::Policy p(S, A, H);
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s) {
      double total = 0.0;
      for (int a = 0; a < A; ++a) {
        p.prob(h, s, a) = -std::log(1.0 - rng.uniform());
        total += p.prob(h, s, a);
      }
      for (int a = 0; a < A; ++a) p.prob(h, s, a) /= total;
    }
  return p;
}

/// Reward outcomes of one (h, s, a) cell with their probabilities.
inline std::vector<std::pair<double, double>> reward_outcomes(
    const orl::TabularMDP& mdp, int h, int s, int a) {
  const double mean = mdp.reward(h, s, a);
  if (mdp.noise == orl::RewardNoise::bernoulli && mean > 0.0 && mean < 1.0)
    return {{1.0, mean}, {0.0, 1.0 - mean}};
  return {{mean, 1.0}};
}

inline void enumerate_return_rec(const orl::TabularMDP& mdp,
                                 const orl::Policy& pol, int h, int s,
                                 double prob, double ret, double& e1,
                                 double& e2) {
  if (h == mdp.H) {
    e1 += prob * ret;
    e2 += prob * ret * ret;
    return;
  }
  for (int a = 0; a < mdp.A; ++a) {
    const double pa = pol.prob(h, s, a);
    if (pa <= 0.0) continue;
    for (const auto& [rv, rp] : reward_outcomes(mdp, h, s, a))
      for (int sp = 0; sp < mdp.S; ++sp) {
        const double pt = mdp.p(h, s, a, sp);
        if (pt <= 0.0) continue;
        enumerate_return_rec(mdp, pol, h + 1, sp, prob * pa * rp * pt,
                             ret + rv, e1, e2);
      }
  }
}

/// Exact first and second moments of the episodic return by full trajectory
/// enumeration (use only for tiny instances).
inline std::pair<double, double> enumerate_return_moments(
    const orl::TabularMDP& mdp, const orl::Policy& pol) {
  double e1 = 0.0, e2 = 0.0;
  for (int s = 0; s < mdp.S; ++s)
    if (mdp.d1[s] > 0.0)
      enumerate_return_rec(mdp, pol, 0, s, mdp.d1[s], 0.0, e1, e2);
  return {e1, e2};
}

inline double brute_value(const orl::TabularMDP& mdp, const orl::Policy& pol) {
  return enumerate_return_moments(mdp, pol).first;
}

inline double brute_return_variance(const orl::TabularMDP& mdp,
                                    const orl::Policy& pol) {
  const auto [e1, e2] = enumerate_return_moments(mdp, pol);
  return e2 - e1 * e1;
}

/// Forward state-action occupancies computed directly (matrix products),
/// independent of the library implementation.
inline std::vector<double> brute_occupancy_sa(const orl::TabularMDP& mdp,
                                              const orl::Policy& pol) {
  const int S = mdp.S, A = mdp.A, H = mdp.H;
  std::vector<double> d(static_cast<std::size_t>(H) * S * A, 0.0);
  std::vector<double> ds(mdp.d1);
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a)
        d[(static_cast<std::size_t>(h) * S + s) * A + a] =
            ds[s] * pol.prob(h, s, a);
    std::vector<double> next(S, 0.0);
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        const double m = d[(static_cast<std::size_t>(h) * S + s) * A + a];
        if (m <= 0.0) continue;
        for (int sp = 0; sp < S; ++sp) next[sp] += m * mdp.p(h, s, a, sp);
      }
    ds.swap(next);
  }
  return d;
}

/**
 * Time-homogeneous embedding of a time-inhomogeneous instance: state (h, s)
 * carries the layer in the state itself, the kernel moves block h to block
 * h + 1 (mod H) with the layer-h dynamics and is identical at every step.
 * Pooled-over-time statistics on the embedding correspond exactly to
 * per-layer statistics on the base instance.
 */
inline orl::TabularMDP clocked_mdp(const orl::TabularMDP& base) {
  const int S = base.S, A = base.A, H = base.H;
  orl::TabularMDP out(S * H, A, H);
  out.noise = base.noise;
  for (int s = 0; s < S; ++s) out.d1[s] = base.d1[s];
  for (int t = 0; t < H; ++t)
    for (int h = 0; h < H; ++h)
      for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
          const int hn = (h + 1) % H;
          for (int sp = 0; sp < S; ++sp)
            out.p(t, h * S + s, a, hn * S + sp) = base.p(h, s, a, sp);
          out.reward(t, h * S + s, a) = base.reward(h, s, a);
        }
  return out;
}

inline orl::Policy clocked_policy(const orl::Policy& base) {
  const int S = base.S, A = base.A, H = base.H;
  orl::Policy out(S * H, A, H);
  for (int t = 0; t < H; ++t)
    for (int h = 0; h < H; ++h)
      for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a)
          out.prob(t, h * S + s, a) = base.prob(h, s, a);
  return out;
}

inline orl::Policy mix_policies(const orl::Policy& a, const orl::Policy& b,
                                double weight_b) {
  orl::Policy out(a.S, a.A, a.H);
  for (std::size_t i = 0; i < out.pi.size(); ++i)
    out.pi[i] = (1.0 - weight_b) * a.pi[i] + weight_b * b.pi[i];
  return out;
}

}  // namespace testutil
