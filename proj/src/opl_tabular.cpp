#include "orl/opl_tabular.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace orl {

namespace {

void check_dims(const Dataset& data) {
  if (data.S < 1 || data.A < 1 || data.H < 1)
    throw std::invalid_argument("dataset must carry positive dimensions");
}

LearnedPolicyReport penalized_value_iteration(const Dataset& data,
                                              const BonusConfig* config) {
  const int S = data.S, A = data.A, H = data.H;
  const PluginModel model = plugin_model(data);
  const double iota =
      config ? bonus_log_factor(S, A, H, config->delta) : 0.0;

  LearnedPolicyReport out;
  out.policy = Policy(S, A, H);
  out.Q.assign(static_cast<std::size_t>(H) * S * A, 0.0);
  out.V.assign(static_cast<std::size_t>(H + 1) * S, 0.0);

  for (int h = H - 1; h >= 0; --h) {
    const double range = static_cast<double>(H - h);
    for (int s = 0; s < S; ++s) {
      int best = 0;
      double best_q = -1.0;
      for (int a = 0; a < A; ++a) {
        double pv = 0.0, pv2 = 0.0;
        for (int sp = 0; sp < S; ++sp) {
          const double p = model.mdp.p(h, s, a, sp);
          const double vn = out.V[(h + 1) * static_cast<std::size_t>(S) + sp];
          pv += p * vn;
          pv2 += p * vn * vn;
        }
        double q = model.mdp.reward(h, s, a) + pv;
        if (config) {
          const double n_eff =
              static_cast<double>(std::max<std::int64_t>(model.count(h, s, a), 1));
          double bonus;
          if (config->kind == BonusKind::hoeffding) {
            bonus = config->c_range * static_cast<double>(H) *
                    std::sqrt(iota / n_eff);
          } else {
            const double var = std::max(0.0, pv2 - pv * pv);
            bonus = config->c_var * std::sqrt(var * iota / n_eff) +
                    config->c_range * static_cast<double>(H) * iota / n_eff;
          }
          q -= bonus;
        }
        q = std::clamp(q, 0.0, range);
        out.Q[(static_cast<std::size_t>(h) * S + s) * A + a] = q;
        if (q > best_q) {
          best_q = q;
          best = a;
        }
      }
      out.policy.prob(h, s, best) = 1.0;
      out.V[static_cast<std::size_t>(h) * S + s] = best_q;
    }
  }

  const std::vector<double> d1 = empirical_initial(data);
  double v = 0.0;
  for (int s = 0; s < S; ++s) v += d1[s] * out.V[s];
  out.value_lower = v;
  return out;
}

}  // namespace

double bonus_log_factor(int S, int A, int H, double delta) {
  if (delta <= 0.0 || delta >= 1.0)
    throw std::invalid_argument("delta must lie strictly inside (0, 1)");
  return std::log(2.0 * H * S * A / delta);
}

PluginModel plugin_model(const Dataset& data) {
  check_dims(data);
  const int S = data.S, A = data.A, H = data.H;
  const CountTables ct = counts(data);

  PluginModel out;
  out.mdp = TabularMDP(S, A, H);
  out.mdp.noise = RewardNoise::deterministic;
  out.n_sa = ct.n_sa;
  const std::vector<double> d1 = empirical_initial(data);
  out.mdp.d1 = d1;
  // An empty dataset has no initial frequencies; keep the container valid.
  if (data.n == 0)
    for (int s = 0; s < S; ++s) out.mdp.d1[s] = 1.0 / S;

  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        const std::int64_t c = ct.sa(h, s, a);
        if (c == 0) {
          for (int sp = 0; sp < S; ++sp)
            out.mdp.p(h, s, a, sp) = 1.0 / S;
          continue;
        }
        for (int sp = 0; sp < S; ++sp)
          out.mdp.p(h, s, a, sp) =
              static_cast<double>(ct.sas(h, s, a, sp)) / static_cast<double>(c);
        out.mdp.reward(h, s, a) = ct.rewards(h, s, a) / static_cast<double>(c);
      }
  return out;
}

LearnedPolicyReport pvi(const Dataset& data, const BonusConfig& config) {
  check_dims(data);
  return penalized_value_iteration(data, &config);
}

LearnedPolicyReport erm_policy(const Dataset& data) {
  check_dims(data);
  return penalized_value_iteration(data, nullptr);
}

AugmentedModel augmented_mdp(const TabularMDP& mdp, const Dataset& data) {
  if (data.S != mdp.S || data.A != mdp.A || data.H != mdp.H)
    throw std::invalid_argument("dataset dimensions do not match the MDP");
  const int S = mdp.S, A = mdp.A, H = mdp.H;
  const CountTables ct = counts(data);
  const int sink = S;

  AugmentedModel out;
  out.mdp = TabularMDP(S + 1, A, H);
  out.mdp.noise = mdp.noise;
  for (int s = 0; s < S; ++s) out.mdp.d1[s] = mdp.d1[s];
  for (int h = 0; h < H; ++h)
    for (int a = 0; a < A; ++a) {
      for (int s = 0; s < S; ++s) {
        if (ct.sa(h, s, a) > 0) {
          for (int sp = 0; sp < S; ++sp)
            out.mdp.p(h, s, a, sp) = mdp.p(h, s, a, sp);
          out.mdp.reward(h, s, a) = mdp.reward(h, s, a);
        } else {
          out.mdp.p(h, s, a, sink) = 1.0;
        }
      }
      out.mdp.p(h, sink, a, sink) = 1.0;
    }

  // Optimal policy of the original instance, extended arbitrarily (lowest
  // index) at the sink, then pushed through the redirected dynamics.
  Policy pistar = optimal_policy(mdp).first;
  Policy extended(S + 1, A, H);
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a)
        extended.prob(h, s, a) = pistar.prob(h, s, a);
    extended.prob(h, sink, 0) = 1.0;
  }

  const OccupancyTables occ = occupancy(out.mdp, extended);
  double mass = 0.0;
  for (int h = 1; h < H; ++h) mass += occ.state(S + 1, h, sink);
  // One step past the recorded layers: the distribution after the final
  // transition.
  double final_mass = 0.0;
  for (int s = 0; s <= S; ++s)
    for (int a = 0; a < A; ++a) {
      const double dsa = occ.sa(S + 1, A, H - 1, s, a);
      if (dsa != 0.0) final_mass += dsa * out.mdp.p(H - 1, s, a, sink);
    }
  out.off_support_mass = mass + final_mass;
  return out;
}

double suboptimality(const TabularMDP& mdp, const LearnedPolicyReport& report) {
  return optimal_policy(mdp).second.v - policy_value(mdp, report.policy).v;
}

}  // namespace orl
