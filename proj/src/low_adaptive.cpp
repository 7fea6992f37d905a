#include "orl/low_adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "orl/ope_tabular.hpp"
#include "orl/rng.hpp"

namespace orl {

namespace {

std::uint64_t policy_to_index(const Policy& p) {
  std::uint64_t idx = 0, mult = 1;
  for (int h = 0; h < p.H; ++h)
    for (int s = 0; s < p.S; ++s) {
      idx += static_cast<std::uint64_t>(p.action(h, s)) * mult;
      mult *= static_cast<std::uint64_t>(p.A);
    }
  return idx;
}

/// Count-ratio model with uniform fallback rows and the empirical (or
/// uniform, when empty) initial distribution; used only for planning.
TabularMDP model_from_counts(const CountTables& ct) {
  const int S = ct.S, A = ct.A, H = ct.H;
  TabularMDP mdp(S, A, H);
  std::int64_t n0 = 0;
  for (int s = 0; s < S; ++s) n0 += ct.state(0, s);
  for (int s = 0; s < S; ++s)
    mdp.d1[s] = n0 > 0 ? static_cast<double>(ct.state(0, s)) /
                             static_cast<double>(n0)
                       : 1.0 / S;
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        const std::int64_t c = ct.sa(h, s, a);
        if (c == 0) {
          for (int sp = 0; sp < S; ++sp) mdp.p(h, s, a, sp) = 1.0 / S;
        } else {
          for (int sp = 0; sp < S; ++sp)
            mdp.p(h, s, a, sp) = static_cast<double>(ct.sas(h, s, a, sp)) /
                                 static_cast<double>(c);
          mdp.reward(h, s, a) = ct.rewards(h, s, a) / static_cast<double>(c);
        }
      }
  return mdp;
}

/// Deterministic policy maximizing the probability of sitting at `s` at
/// layer `h` under the model, playing `a` there; lowest action index on ties.
Policy reach_policy(const TabularMDP& model, int h, int s, int a) {
  const int S = model.S, A = model.A, H = model.H;
  Policy pol(S, A, H);
  std::vector<double> w(S, 0.0);
  w[s] = 1.0;
  std::vector<std::vector<int>> act(h, std::vector<int>(S, 0));
  for (int t = h - 1; t >= 0; --t) {
    std::vector<double> prev(S, 0.0);
    for (int x = 0; x < S; ++x) {
      int best = 0;
      double best_w = -1.0;
      for (int b = 0; b < A; ++b) {
        double acc = 0.0;
        for (int sp = 0; sp < S; ++sp) acc += model.p(t, x, b, sp) * w[sp];
        if (acc > best_w) {
          best_w = acc;
          best = b;
        }
      }
      prev[x] = best_w;
      act[t][x] = best;
    }
    w.swap(prev);
  }
  for (int t = 0; t < H; ++t)
    for (int x = 0; x < S; ++x) {
      int chosen = 0;
      if (t < h)
        chosen = act[t][x];
      else if (t == h && x == s)
        chosen = a;
      pol.prob(t, x, chosen) = 1.0;
    }
  return pol;
}

void add_to_counts(CountTables& ct, const std::vector<Transition>& episode) {
  const int S = ct.S, A = ct.A;
  for (int h = 0; h < static_cast<int>(episode.size()); ++h) {
    const Transition& t = episode[h];
    ++ct.n_state[static_cast<std::size_t>(h) * S + t.s];
    const std::size_t sa = (static_cast<std::size_t>(h) * S + t.s) * A + t.a;
    ++ct.n_sa[sa];
    ++ct.n_sas[sa * S + t.s_next];
    ct.r_sum[sa] += t.r;
  }
}

CountTables empty_counts(int S, int A, int H) {
  CountTables ct;
  ct.S = S;
  ct.A = A;
  ct.H = H;
  ct.n_state.assign(static_cast<std::size_t>(H) * S, 0);
  ct.n_sa.assign(static_cast<std::size_t>(H) * S * A, 0);
  ct.n_sas.assign(static_cast<std::size_t>(H) * S * A * S, 0);
  ct.r_sum.assign(static_cast<std::size_t>(H) * S * A, 0.0);
  return ct;
}

/// Equal integer shares of `total` over `parts` slots, remainder first.
std::vector<int> split_budget(int total, int parts) {
  std::vector<int> out(parts, total / parts);
  for (int j = 0; j < total % parts; ++j) ++out[j];
  return out;
}

/// Effective count behind a candidate's stage estimate: the smallest visit
/// count among the cells its estimated occupancy actually flows through.
std::int64_t effective_count(const CountTables& ct, const Policy& pol,
                             std::int64_t n_episodes) {
  const int S = ct.S, A = ct.A, H = ct.H;
  std::vector<double> d(S, 0.0);
  for (int s = 0; s < S; ++s)
    d[s] = n_episodes > 0 ? static_cast<double>(ct.state(0, s)) /
                                static_cast<double>(n_episodes)
                          : 0.0;
  std::int64_t n_eff = std::numeric_limits<std::int64_t>::max();
  for (int h = 0; h < H; ++h) {
    std::vector<double> next(S, 0.0);
    for (int s = 0; s < S; ++s) {
      if (d[s] <= 1e-12) continue;
      for (int a = 0; a < A; ++a) {
        if (pol.prob(h, s, a) <= 1e-12) continue;
        const std::int64_t c = ct.sa(h, s, a);
        n_eff = std::min(n_eff, c);
        if (c == 0) continue;
        const double scale = d[s] * pol.prob(h, s, a) / static_cast<double>(c);
        for (int sp = 0; sp < S; ++sp)
          next[sp] += scale * static_cast<double>(ct.sas(h, s, a, sp));
      }
    }
    d.swap(next);
  }
  if (n_eff == std::numeric_limits<std::int64_t>::max()) n_eff = 0;
  return std::max<std::int64_t>(n_eff, 1);
}

Dataset dataset_from_episodes(int S, int A, int H,
                              const std::vector<Transition>& records) {
  Dataset out;
  out.S = S;
  out.A = A;
  out.H = H;
  out.n = static_cast<int>(records.size()) / H;
  out.records = records;
  return out;
}

}  // namespace

Environment::Environment(const TabularMDP& mdp, std::uint64_t seed)
    : mdp_(mdp), seed_(seed) {
  auto bad = validate_mdp(mdp_);
  if (!bad.empty()) throw std::invalid_argument("invalid MDP: " + bad.front());
}

void Environment::episode(const Policy& policy, std::vector<Transition>& out) {
  const int S = mdp_.S, A = mdp_.A, H = mdp_.H;
  if (policy.S != S || policy.A != A || policy.H != H)
    throw std::invalid_argument("policy dimensions do not match the MDP");
  out.resize(H);
  Rng rng = Rng::substream(seed_, static_cast<std::uint64_t>(episodes_));
  int s = rng.categorical({mdp_.d1.data(), static_cast<std::size_t>(S)});
  for (int h = 0; h < H; ++h) {
    const int a = rng.categorical(
        {&policy.pi[(static_cast<std::size_t>(h) * S + s) * A],
         static_cast<std::size_t>(A)});
    const double mean = mdp_.reward(h, s, a);
    const double r = mdp_.noise == RewardNoise::bernoulli
                         ? (rng.bernoulli(mean) ? 1.0 : 0.0)
                         : mean;
    const int sp = rng.categorical(
        {&mdp_.P[mdp_.pidx(h, s, a, 0)], static_cast<std::size_t>(S)});
    out[h] = {s, a, r, sp};
    s = sp;
  }
  ++episodes_;
}

std::vector<int> stage_schedule(int T) {
  if (T < 1) throw std::invalid_argument("episode budget must be >= 1");
  std::vector<int> out;
  int total = 0;
  for (int k = 1; total < T; ++k) {
    const double expo = 1.0 - std::pow(2.0, -k);
    int len = static_cast<int>(
        std::ceil(std::pow(static_cast<double>(T), expo) - 1e-9));
    len = std::max(1, std::min(len, T - total));
    out.push_back(len);
    total += len;
  }
  return out;
}

ApeveResult apeve(Environment& env, int T, const ApeveConfig& config) {
  const int S = env.S(), A = env.A(), H = env.H();
  if (T < 1) throw std::invalid_argument("episode budget must be >= 1");
  const std::uint64_t n_policies = deterministic_policy_count(S, A, H);
  if (n_policies > config.policy_cap)
    throw std::invalid_argument("policy class exceeds the enumeration cap");
  const double iota =
      std::log(2.0 * H * S * A * std::max(T, 2) / config.delta);

  ApeveResult out;
  out.survivors.S = S;
  out.survivors.A = A;
  out.survivors.H = H;
  std::vector<std::uint64_t> active(n_policies);
  for (std::uint64_t i = 0; i < n_policies; ++i) active[i] = i;

  CountTables cumulative = empty_counts(S, A, H);
  std::vector<Transition> episode_buf;
  const std::vector<int> schedule = stage_schedule(T);

  double final_best_estimate = -1.0;
  std::uint64_t final_best_policy = 0;

  for (int stage_len : schedule) {
    out.ledger.batch_starts.push_back(
        static_cast<int>(out.ledger.policy_per_episode.size()));

    // Everything below up to the deployments is planned from data of
    // earlier stages only.
    const TabularMDP model = model_from_counts(cumulative);

    std::int64_t min_count = std::numeric_limits<std::int64_t>::max();
    int mh = 0, ms = 0, ma = 0;
    for (int h = 0; h < H; ++h)
      for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a)
          if (cumulative.sa(h, s, a) < min_count) {
            min_count = cumulative.sa(h, s, a);
            mh = h;
            ms = s;
            ma = a;
          }
    const Policy crude = reach_policy(model, mh, ms, ma);
    const std::uint64_t crude_id = policy_to_index(crude);

    std::vector<OccupancyTables> occ(active.size());
    for (std::size_t j = 0; j < active.size(); ++j)
      occ[j] = occupancy(model, out.survivors.policy(active[j]));

    struct Deployment {
      std::uint64_t id;
      Policy policy;
      int episodes;
    };
    std::vector<Deployment> plan;
    const int crude_eps = std::max(
        1, std::min(stage_len, static_cast<int>(std::ceil(
                                   config.crude_fraction * stage_len))));
    plan.push_back({crude_id, crude, crude_eps});
    const int fine_total = stage_len - crude_eps;
    if (fine_total > 0) {
      const std::vector<int> shares = split_budget(fine_total, H * S * A);
      int cell = 0;
      for (int h = 0; h < H; ++h)
        for (int s = 0; s < S; ++s)
          for (int a = 0; a < A; ++a, ++cell) {
            if (shares[cell] == 0) continue;
            std::size_t best_j = 0;
            double best_occ = -1.0;
            for (std::size_t j = 0; j < active.size(); ++j) {
              const double o = occ[j].sa(S, A, h, s, a);
              if (o > best_occ) {
                best_occ = o;
                best_j = j;
              }
            }
            plan.push_back({active[best_j],
                            out.survivors.policy(active[best_j]),
                            shares[cell]});
          }
    }

    CountTables stage_counts = empty_counts(S, A, H);
    std::vector<Transition> stage_records;
    stage_records.reserve(static_cast<std::size_t>(stage_len) * H);
    for (const Deployment& dep : plan)
      for (int e = 0; e < dep.episodes; ++e) {
        env.episode(dep.policy, episode_buf);
        add_to_counts(stage_counts, episode_buf);
        add_to_counts(cumulative, episode_buf);
        stage_records.insert(stage_records.end(), episode_buf.begin(),
                             episode_buf.end());
        out.ledger.policy_per_episode.push_back(dep.id);
      }

    const Dataset stage_data =
        dataset_from_episodes(S, A, H, stage_records);
    const int stage_eps = stage_data.n;

    ApeveStageRecord rec;
    rec.active = active;
    rec.estimate.resize(active.size());
    rec.lo.resize(active.size());
    rec.hi.resize(active.size());
    double best_lo = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < active.size(); ++j) {
      const Policy pol = out.survivors.policy(active[j]);
      const double est = tmis_estimate(stage_data, pol).value;
      const std::int64_t n_eff =
          effective_count(stage_counts, pol, stage_eps);
      const double width =
          config.ci_scale * H *
          std::sqrt(static_cast<double>(S) * iota /
                    static_cast<double>(n_eff));
      rec.estimate[j] = est;
      rec.lo[j] = est - width;
      rec.hi[j] = est + width;
      best_lo = std::max(best_lo, rec.lo[j]);
    }

    std::vector<std::uint64_t> kept;
    for (std::size_t j = 0; j < active.size(); ++j) {
      if (rec.hi[j] < best_lo) {
        rec.eliminated.push_back(active[j]);
      } else {
        kept.push_back(active[j]);
      }
    }
    // The recommendation tracks the best surviving point estimate of the
    // most recent stage.
    if (!kept.empty()) {
      final_best_estimate = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < active.size(); ++j)
        if (rec.hi[j] >= best_lo && rec.estimate[j] > final_best_estimate) {
          final_best_estimate = rec.estimate[j];
          final_best_policy = active[j];
        }
    }
    out.stages.push_back(std::move(rec));
    active.swap(kept);
  }

  out.survivors.indices = active;
  out.chosen = out.survivors.policy(final_best_policy);
  return out;
}

LarfeResult larfe(Environment& env, double epsilon,
                  const LarfeConfig& config) {
  const int S = env.S(), A = env.A(), H = env.H();
  if (epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");
  const double iota = std::log(2.0 * H * S * A / config.delta);
  const int per_layer = std::max(
      2, static_cast<int>(std::ceil(config.budget_scale * H * H * S * A *
                                    iota / (epsilon * epsilon))));

  LarfeResult out;
  CountTables cumulative = empty_counts(S, A, H);
  std::vector<Transition> all_records, episode_buf;
  all_records.reserve(static_cast<std::size_t>(per_layer) * H * H);

  for (int h = 0; h < H; ++h) {
    const int budget_a = (per_layer + 1) / 2;
    for (int phase = 0; phase < 2; ++phase) {
      out.ledger.batch_starts.push_back(
          static_cast<int>(out.ledger.policy_per_episode.size()));
      const int budget = phase == 0 ? budget_a : per_layer - budget_a;
      if (budget <= 0) continue;
      const TabularMDP model = model_from_counts(cumulative);
      const std::vector<int> shares = split_budget(budget, S * A);
      int cell = 0;
      for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a, ++cell) {
          if (shares[cell] == 0) continue;
          const Policy pol = reach_policy(model, h, s, a);
          const std::uint64_t id = policy_to_index(pol);
          for (int e = 0; e < shares[cell]; ++e) {
            env.episode(pol, episode_buf);
            add_to_counts(cumulative, episode_buf);
            all_records.insert(all_records.end(), episode_buf.begin(),
                               episode_buf.end());
            out.ledger.policy_per_episode.push_back(id);
          }
        }
    }
  }

  out.data = dataset_from_episodes(S, A, H, all_records);
  out.model = plugin_model(out.data);
  return out;
}

RegretSummary apeve_regret(const TabularMDP& mdp, int T, std::uint64_t seed,
                           const ApeveConfig& config, ApeveResult* detail) {
  Environment env(mdp, seed);
  ApeveResult res = apeve(env, T, config);

  RegretSummary out;
  out.episodes = static_cast<int>(res.ledger.policy_per_episode.size());
  out.switches = res.ledger.switch_count();
  out.batches = res.ledger.batch_count();

  const double v_star = optimal_policy(mdp).second.v;
  std::vector<double> value_cache(
      deterministic_policy_count(mdp.S, mdp.A, mdp.H),
      std::numeric_limits<double>::quiet_NaN());
  auto true_value = [&](std::uint64_t idx) {
    if (std::isnan(value_cache[idx]))
      value_cache[idx] =
          policy_value(mdp, deterministic_policy_from_index(
                                idx, mdp.S, mdp.A, mdp.H))
              .v;
    return value_cache[idx];
  };

  for (std::uint64_t id : res.ledger.policy_per_episode)
    out.total_regret += v_star - true_value(id);

  for (std::uint64_t id : res.survivors.indices)
    if (true_value(id) >= v_star - 1e-9) out.best_value_survived = true;

  out.elimination_sound = true;
  for (const ApeveStageRecord& rec : res.stages) {
    bool all_valid = true;
    for (std::size_t j = 0; j < rec.active.size(); ++j) {
      const double v = true_value(rec.active[j]);
      if (v < rec.lo[j] - 1e-12 || v > rec.hi[j] + 1e-12) {
        all_valid = false;
        break;
      }
    }
    if (!all_valid) continue;
    bool best_kept = false;
    for (std::size_t j = 0; j < rec.active.size(); ++j) {
      const bool eliminated =
          std::find(rec.eliminated.begin(), rec.eliminated.end(),
                    rec.active[j]) != rec.eliminated.end();
      if (!eliminated && true_value(rec.active[j]) >= v_star - 1e-9)
        best_kept = true;
    }
    if (!best_kept) out.elimination_sound = false;
  }

  if (detail) *detail = std::move(res);
  return out;
}

double larfe_certificate(const TabularMDP& mdp, const PluginModel& model,
                         int k_tables, std::uint64_t seed) {
  if (model.mdp.S != mdp.S || model.mdp.A != mdp.A || model.mdp.H != mdp.H)
    throw std::invalid_argument("model dimensions do not match the MDP");
  double worst = 0.0;
  for (int j = 0; j < k_tables; ++j) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(j));
    TabularMDP plan = model.mdp;
    TabularMDP truth = mdp;
    for (std::size_t k = 0; k < plan.r.size(); ++k) {
      const double val = rng.uniform();
      plan.r[k] = val;
      truth.r[k] = val;
    }
    const Policy learned = optimal_policy(plan).first;
    const double gap =
        optimal_policy(truth).second.v - policy_value(truth, learned).v;
    worst = std::max(worst, gap);
  }
  return worst;
}

}  // namespace orl
