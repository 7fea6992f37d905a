#include "orl/ope_tabular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "orl/errors.hpp"
#include "orl/rng.hpp"
#include "orl/util.hpp"

namespace orl {

namespace {

void check_inputs(const Dataset& data, const Policy& target) {
  if (data.n == 0) throw std::invalid_argument("dataset holds no trajectories");
  if (target.S != data.S || target.A != data.A || target.H != data.H)
    throw std::invalid_argument("policy dimensions do not match the dataset");
}

/// Action-probability ratios for every record; throws when the behavior
/// policy cannot have produced an observed action.
std::vector<double> action_ratios(const Dataset& data, const Policy& target,
                                  const Policy& behavior) {
  if (behavior.S != data.S || behavior.A != data.A || behavior.H != data.H)
    throw std::invalid_argument(
        "behavior policy dimensions do not match the dataset");
  std::vector<double> out(data.records.size(), 0.0);
  std::set<std::array<int, 3>> missing;
  for (int i = 0; i < data.n; ++i)
    for (int h = 0; h < data.H; ++h) {
      const Transition& t = data.at(i, h);
      const double mu = behavior.prob(h, t.s, t.a);
      if (mu <= 0.0) {
        missing.insert({h, t.s, t.a});
        continue;
      }
      out[static_cast<std::size_t>(i) * data.H + h] =
          target.prob(h, t.s, t.a) / mu;
    }
  if (!missing.empty())
    throw SupportViolation(
        std::vector<std::array<int, 3>>(missing.begin(), missing.end()));
  return out;
}

void add_count_diagnostics(const Dataset& data, EstimateReport& rep) {
  const CountTables ct = counts(data);
  std::int64_t min_pos = std::numeric_limits<std::int64_t>::max();
  std::int64_t zero_cells = 0;
  for (std::int64_t c : ct.n_sa) {
    if (c == 0)
      ++zero_cells;
    else
      min_pos = std::min(min_pos, c);
  }
  rep.diagnostics["min_positive_count"] =
      min_pos == std::numeric_limits<std::int64_t>::max()
          ? 0.0
          : static_cast<double>(min_pos);
  rep.diagnostics["zero_count_cells"] = static_cast<double>(zero_cells);
}

}  // namespace

const char* ope_method_name(OpeMethod m) {
  switch (m) {
    case OpeMethod::is: return "is";
    case OpeMethod::step_is: return "step_is";
    case OpeMethod::smis: return "smis";
    case OpeMethod::tmis: return "tmis";
  }
  return "?";
}

OpeMethod parse_ope_method(const std::string& name) {
  if (name == "is") return OpeMethod::is;
  if (name == "step_is") return OpeMethod::step_is;
  if (name == "smis") return OpeMethod::smis;
  if (name == "tmis") return OpeMethod::tmis;
  throw std::invalid_argument("unknown estimator '" + name + "'");
}

EstimateReport is_estimate(const Dataset& data, const Policy& target,
                           const Policy& behavior) {
  check_inputs(data, target);
  const std::vector<double> ratio = action_ratios(data, target, behavior);
  std::vector<double> vals(data.n);
  double max_cum = 0.0;
  for (int i = 0; i < data.n; ++i) {
    double rho = 1.0, ret = 0.0;
    for (int h = 0; h < data.H; ++h) {
      rho *= ratio[static_cast<std::size_t>(i) * data.H + h];
      max_cum = std::max(max_cum, rho);
      ret += data.at(i, h).r;
    }
    vals[i] = rho * ret;
  }
  EstimateReport rep;
  rep.value = rep.model_value = pairwise_mean(vals);
  rep.diagnostics["max_cum_ratio"] = max_cum;
  return rep;
}

EstimateReport step_is_estimate(const Dataset& data, const Policy& target,
                                const Policy& behavior) {
  check_inputs(data, target);
  const std::vector<double> ratio = action_ratios(data, target, behavior);
  std::vector<double> vals(data.n);
  double max_cum = 0.0;
  for (int i = 0; i < data.n; ++i) {
    double rho = 1.0, acc = 0.0;
    for (int h = 0; h < data.H; ++h) {
      rho *= ratio[static_cast<std::size_t>(i) * data.H + h];
      max_cum = std::max(max_cum, rho);
      acc += rho * data.at(i, h).r;
    }
    vals[i] = acc;
  }
  EstimateReport rep;
  rep.value = rep.model_value = pairwise_mean(vals);
  rep.diagnostics["max_cum_ratio"] = max_cum;
  return rep;
}

EstimateReport smis_estimate(const Dataset& data, const Policy& target,
                             const Policy& behavior) {
  check_inputs(data, target);
  const std::vector<double> ratio = action_ratios(data, target, behavior);
  const int S = data.S, H = data.H;

  std::vector<std::int64_t> n_state(static_cast<std::size_t>(H) * S, 0);
  for (int i = 0; i < data.n; ++i)
    for (int h = 0; h < H; ++h)
      ++n_state[static_cast<std::size_t>(h) * S + data.at(i, h).s];

  // Ratio-weighted transition flows between consecutive layers and
  // ratio-weighted rewards per layer.
  std::vector<double> flow(static_cast<std::size_t>(H) * S * S, 0.0);
  std::vector<double> rsum(static_cast<std::size_t>(H) * S, 0.0);
  for (int i = 0; i < data.n; ++i)
    for (int h = 0; h < H; ++h) {
      const Transition& t = data.at(i, h);
      const double w = ratio[static_cast<std::size_t>(i) * H + h];
      flow[(static_cast<std::size_t>(h) * S + t.s) * S + t.s_next] += w;
      rsum[static_cast<std::size_t>(h) * S + t.s] += w * t.r;
    }

  std::vector<double> d(S, 0.0);
  for (int i = 0; i < data.n; ++i) d[data.at(i, 0).s] += 1.0;
  for (double& x : d) x /= data.n;

  double value = 0.0;
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      const std::int64_t ns = n_state[static_cast<std::size_t>(h) * S + s];
      if (ns > 0)
        value += d[s] * rsum[static_cast<std::size_t>(h) * S + s] /
                 static_cast<double>(ns);
    }
    if (h + 1 < H) {
      std::vector<double> next(S, 0.0);
      for (int s = 0; s < S; ++s) {
        const std::int64_t ns = n_state[static_cast<std::size_t>(h) * S + s];
        if (ns == 0 || d[s] == 0.0) continue;
        const double scale = d[s] / static_cast<double>(ns);
        for (int sp = 0; sp < S; ++sp)
          next[sp] += scale * flow[(static_cast<std::size_t>(h) * S + s) * S + sp];
      }
      d.swap(next);
    }
  }

  EstimateReport rep;
  rep.value = rep.model_value = value;
  std::int64_t min_pos = std::numeric_limits<std::int64_t>::max();
  std::int64_t zero_states = 0;
  for (std::int64_t c : n_state) {
    if (c == 0)
      ++zero_states;
    else
      min_pos = std::min(min_pos, c);
  }
  rep.diagnostics["min_positive_count"] =
      min_pos == std::numeric_limits<std::int64_t>::max()
          ? 0.0
          : static_cast<double>(min_pos);
  rep.diagnostics["zero_count_states"] = static_cast<double>(zero_states);
  return rep;
}

EstimateReport tmis_estimate(const Dataset& data, const Policy& target) {
  check_inputs(data, target);
  const int S = data.S, A = data.A, H = data.H;
  const CountTables ct = counts(data);
  const std::vector<double> d1 = empirical_initial(data);

  // Marginal route: policy-averaged transition and reward models applied to
  // the state marginal.
  double value = 0.0;
  {
    std::vector<double> d = d1;
    for (int h = 0; h < H; ++h) {
      for (int s = 0; s < S; ++s) {
        if (d[s] == 0.0) continue;
        double rs = 0.0;
        for (int a = 0; a < A; ++a) {
          const std::int64_t nsa = ct.sa(h, s, a);
          if (nsa == 0) continue;
          rs += target.prob(h, s, a) * ct.rewards(h, s, a) /
                static_cast<double>(nsa);
        }
        value += d[s] * rs;
      }
      if (h + 1 < H) {
        std::vector<double> next(S, 0.0);
        for (int s = 0; s < S; ++s) {
          if (d[s] == 0.0) continue;
          for (int a = 0; a < A; ++a) {
            const std::int64_t nsa = ct.sa(h, s, a);
            const double pa = target.prob(h, s, a);
            if (nsa == 0 || pa == 0.0) continue;
            const double scale = d[s] * pa / static_cast<double>(nsa);
            for (int sp = 0; sp < S; ++sp)
              next[sp] += scale * static_cast<double>(ct.sas(h, s, a, sp));
          }
        }
        d.swap(next);
      }
    }
  }

  // Model route: state-action occupancy flow through the plug-in model.
  double model_value = 0.0;
  {
    std::vector<double> dsa(static_cast<std::size_t>(S) * A, 0.0);
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a)
        dsa[static_cast<std::size_t>(s) * A + a] = d1[s] * target.prob(0, s, a);
    for (int h = 0; h < H; ++h) {
      for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
          const std::int64_t nsa = ct.sa(h, s, a);
          if (nsa == 0) continue;
          model_value += dsa[static_cast<std::size_t>(s) * A + a] *
                         ct.rewards(h, s, a) / static_cast<double>(nsa);
        }
      if (h + 1 < H) {
        std::vector<double> dstate(S, 0.0);
        for (int s = 0; s < S; ++s)
          for (int a = 0; a < A; ++a) {
            const std::int64_t nsa = ct.sa(h, s, a);
            const double mass = dsa[static_cast<std::size_t>(s) * A + a];
            if (nsa == 0 || mass == 0.0) continue;
            const double scale = mass / static_cast<double>(nsa);
            for (int sp = 0; sp < S; ++sp)
              dstate[sp] += scale * static_cast<double>(ct.sas(h, s, a, sp));
          }
        std::vector<double> next(static_cast<std::size_t>(S) * A, 0.0);
        for (int s = 0; s < S; ++s)
          for (int a = 0; a < A; ++a)
            next[static_cast<std::size_t>(s) * A + a] =
                dstate[s] * target.prob(h + 1, s, a);
        dsa.swap(next);
      }
    }
  }

  EstimateReport rep;
  rep.value = value;
  rep.model_value = model_value;
  add_count_diagnostics(data, rep);
  return rep;
}

EstimateReport tmis_pooled_estimate(const Dataset& data,
                                    const Policy& target) {
  check_inputs(data, target);
  const int S = data.S, A = data.A, H = data.H;
  const CountTables ct = pooled_counts(data);
  std::vector<double> d = empirical_initial(data);

  double value = 0.0;
  for (int h = 0; h < H; ++h) {
    std::vector<double> next(S, 0.0);
    for (int s = 0; s < S; ++s) {
      if (d[s] == 0.0) continue;
      for (int a = 0; a < A; ++a) {
        const std::int64_t nsa = ct.sa(0, s, a);
        const double pa = target.prob(h, s, a);
        if (nsa == 0 || pa == 0.0) continue;
        const double scale = d[s] * pa / static_cast<double>(nsa);
        value += scale * ct.rewards(0, s, a);
        for (int sp = 0; sp < S; ++sp)
          next[sp] += scale * static_cast<double>(ct.sas(0, s, a, sp));
      }
    }
    d.swap(next);
  }

  EstimateReport rep;
  rep.value = rep.model_value = value;
  add_count_diagnostics(data, rep);
  return rep;
}

MseSummary mse_harness(const TabularMDP& mdp, const Policy& target,
                       const Policy& behavior, OpeMethod method, int n,
                       int reps, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample size must be >= 1");
  if (reps < 1) throw std::invalid_argument("replication count must be >= 1");
  MseSummary out;
  out.method = method;
  out.n = n;
  out.reps = reps;
  out.true_value = policy_value(mdp, target).v;

  std::vector<double> estimates, sq_errs;
  estimates.reserve(reps);
  sq_errs.reserve(reps);
  for (int rep = 0; rep < reps; ++rep) {
    const std::uint64_t rep_seed =
        Rng::substream(seed, static_cast<std::uint64_t>(rep)).next_u64();
    const Dataset data = sample_trajectories(mdp, behavior, n, rep_seed);
    double est;
    try {
      switch (method) {
        case OpeMethod::is: est = is_estimate(data, target, behavior).value; break;
        case OpeMethod::step_is:
          est = step_is_estimate(data, target, behavior).value;
          break;
        case OpeMethod::smis:
          est = smis_estimate(data, target, behavior).value;
          break;
        case OpeMethod::tmis:
        default: est = tmis_estimate(data, target).value; break;
      }
    } catch (const SupportViolation&) {
      ++out.error_count;
      continue;
    } catch (const std::invalid_argument&) {
      ++out.error_count;
      continue;
    }
    estimates.push_back(est);
    const double err = est - out.true_value;
    sq_errs.push_back(err * err);
  }

  if (!estimates.empty()) {
    out.mean_estimate = pairwise_mean(estimates);
    out.mse = pairwise_mean(sq_errs);
    const std::size_t k = sq_errs.size();
    if (k > 1) {
      std::vector<double> dev2(k);
      for (std::size_t i = 0; i < k; ++i) {
        const double d = sq_errs[i] - out.mse;
        dev2[i] = d * d;
      }
      out.se = std::sqrt(pairwise_sum(dev2) /
                         (static_cast<double>(k - 1) * static_cast<double>(k)));
    }
    out.rel_rmse = out.true_value != 0.0
                       ? std::sqrt(out.mse) / std::abs(out.true_value)
                       : std::numeric_limits<double>::infinity();
  }
  return out;
}

}  // namespace orl
