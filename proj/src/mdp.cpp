#include "orl/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "orl/rng.hpp"
#include "orl/util.hpp"

namespace orl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string cell_name(int h, int s, int a) {
  return "(h=" + std::to_string(h) + ",s=" + std::to_string(s) +
         ",a=" + std::to_string(a) + ")";
}

double reward_second_moment(double mean, RewardNoise noise) {
  return noise == RewardNoise::bernoulli ? mean : mean * mean;
}

double reward_variance(double mean, RewardNoise noise) {
  return noise == RewardNoise::bernoulli ? mean * (1.0 - mean) : 0.0;
}

}  // namespace

Policy Policy::uniform(int S, int A, int H) {
  Policy p(S, A, H);
  const double w = 1.0 / A;
  for (double& x : p.pi) x = w;
  return p;
}

bool Policy::deterministic() const {
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        const double p = prob(h, s, a);
        if (p != 0.0 && p != 1.0) return false;
      }
  return true;
}

int Policy::action(int h, int s) const {
  for (int a = 0; a < A; ++a)
    if (prob(h, s, a) > 0.0) return a;
  return 0;
}

std::uint64_t Policy::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  h = hash_accumulate(h, static_cast<std::int64_t>(S));
  h = hash_accumulate(h, static_cast<std::int64_t>(A));
  h = hash_accumulate(h, static_cast<std::int64_t>(H));
  for (double x : pi) h = hash_accumulate(h, x);
  return h;
}

std::uint64_t TabularMDP::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  h = hash_accumulate(h, static_cast<std::int64_t>(S));
  h = hash_accumulate(h, static_cast<std::int64_t>(A));
  h = hash_accumulate(h, static_cast<std::int64_t>(H));
  for (double x : d1) h = hash_accumulate(h, x);
  for (double x : P) h = hash_accumulate(h, x);
  for (double x : r) h = hash_accumulate(h, x);
  h = hash_accumulate(h, static_cast<std::int64_t>(noise));
  return h;
}

std::vector<std::string> validate_mdp(const TabularMDP& mdp, double tol) {
  std::vector<std::string> out;
  if (mdp.S < 1 || mdp.A < 1 || mdp.H < 1) {
    out.push_back("dimensions must be positive");
    return out;
  }
  if (mdp.d1.size() != static_cast<std::size_t>(mdp.S))
    out.push_back("d1 has wrong length");
  if (mdp.P.size() !=
      static_cast<std::size_t>(mdp.H) * mdp.S * mdp.A * mdp.S)
    out.push_back("transition table has wrong length");
  if (mdp.r.size() != static_cast<std::size_t>(mdp.H) * mdp.S * mdp.A)
    out.push_back("reward table has wrong length");
  if (!out.empty()) return out;

  double d1_sum = 0.0;
  for (int s = 0; s < mdp.S; ++s) {
    if (mdp.d1[s] < 0.0)
      out.push_back("d1[" + std::to_string(s) + "] is negative");
    d1_sum += mdp.d1[s];
  }
  if (std::abs(d1_sum - 1.0) > tol)
    out.push_back("d1 sums to " + std::to_string(d1_sum));

  for (int h = 0; h < mdp.H; ++h)
    for (int s = 0; s < mdp.S; ++s)
      for (int a = 0; a < mdp.A; ++a) {
        double row = 0.0;
        for (int sp = 0; sp < mdp.S; ++sp) {
          const double p = mdp.p(h, s, a, sp);
          if (p < 0.0)
            out.push_back("negative transition probability at " +
                          cell_name(h, s, a));
          row += p;
        }
        if (std::abs(row - 1.0) > tol)
          out.push_back("transition row at " + cell_name(h, s, a) +
                        " sums to " + std::to_string(row));
        const double rr = mdp.reward(h, s, a);
        if (rr < 0.0 || rr > 1.0)
          out.push_back("mean reward at " + cell_name(h, s, a) +
                        " outside [0, 1]");
      }
  return out;
}

std::vector<std::string> validate_policy(const TabularMDP& mdp,
                                         const Policy& policy, double tol) {
  std::vector<std::string> out;
  if (policy.S != mdp.S || policy.A != mdp.A || policy.H != mdp.H) {
    out.push_back("policy dimensions do not match the MDP");
    return out;
  }
  for (int h = 0; h < mdp.H; ++h)
    for (int s = 0; s < mdp.S; ++s) {
      double row = 0.0;
      for (int a = 0; a < mdp.A; ++a) {
        const double p = policy.prob(h, s, a);
        if (p < 0.0)
          out.push_back("negative action probability at " + cell_name(h, s, a));
        row += p;
      }
      if (std::abs(row - 1.0) > tol)
        out.push_back("action row at (h=" + std::to_string(h) +
                      ",s=" + std::to_string(s) + ") sums to " +
                      std::to_string(row));
    }
  return out;
}

ValueTables policy_value(const TabularMDP& mdp, const Policy& policy) {
  const int S = mdp.S, A = mdp.A, H = mdp.H;
  ValueTables out;
  out.Q.assign(static_cast<std::size_t>(H) * S * A, 0.0);
  out.V.assign(static_cast<std::size_t>(H + 1) * S, 0.0);
  for (int h = H - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      double vs = 0.0;
      for (int a = 0; a < A; ++a) {
        double q = mdp.reward(h, s, a);
        for (int sp = 0; sp < S; ++sp)
          q += mdp.p(h, s, a, sp) * out.V[(h + 1) * static_cast<std::size_t>(S) + sp];
        out.Q[(static_cast<std::size_t>(h) * S + s) * A + a] = q;
        vs += policy.prob(h, s, a) * q;
      }
      out.V[static_cast<std::size_t>(h) * S + s] = vs;
    }
  }
  double v = 0.0;
  for (int s = 0; s < S; ++s) v += mdp.d1[s] * out.V[s];
  out.v = v;
  return out;
}

std::pair<Policy, ValueTables> optimal_policy(const TabularMDP& mdp) {
  const int S = mdp.S, A = mdp.A, H = mdp.H;
  Policy pol(S, A, H);
  ValueTables out;
  out.Q.assign(static_cast<std::size_t>(H) * S * A, 0.0);
  out.V.assign(static_cast<std::size_t>(H + 1) * S, 0.0);
  for (int h = H - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      int best = 0;
      double best_q = -kInf;
      for (int a = 0; a < A; ++a) {
        double q = mdp.reward(h, s, a);
        for (int sp = 0; sp < S; ++sp)
          q += mdp.p(h, s, a, sp) * out.V[(h + 1) * static_cast<std::size_t>(S) + sp];
        out.Q[(static_cast<std::size_t>(h) * S + s) * A + a] = q;
        if (q > best_q) {
          best_q = q;
          best = a;
        }
      }
      pol.prob(h, s, best) = 1.0;
      out.V[static_cast<std::size_t>(h) * S + s] = best_q;
    }
  }
  double v = 0.0;
  for (int s = 0; s < S; ++s) v += mdp.d1[s] * out.V[s];
  out.v = v;
  return {std::move(pol), std::move(out)};
}

OccupancyTables occupancy(const TabularMDP& mdp, const Policy& policy) {
  const int S = mdp.S, A = mdp.A, H = mdp.H;
  OccupancyTables out;
  out.d_state.assign(static_cast<std::size_t>(H) * S, 0.0);
  out.d_sa.assign(static_cast<std::size_t>(H) * S * A, 0.0);
  for (int s = 0; s < S; ++s) out.d_state[s] = mdp.d1[s];
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      const double ds = out.d_state[static_cast<std::size_t>(h) * S + s];
      for (int a = 0; a < A; ++a)
        out.d_sa[(static_cast<std::size_t>(h) * S + s) * A + a] =
            ds * policy.prob(h, s, a);
    }
    if (h + 1 < H) {
      for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
          const double dsa = out.d_sa[(static_cast<std::size_t>(h) * S + s) * A + a];
          if (dsa == 0.0) continue;
          for (int sp = 0; sp < S; ++sp)
            out.d_state[(h + 1) * static_cast<std::size_t>(S) + sp] +=
                dsa * mdp.p(h, s, a, sp);
        }
    }
  }
  return out;
}

ReturnVariance return_variance(const TabularMDP& mdp, const Policy& policy) {
  const int S = mdp.S, A = mdp.A, H = mdp.H;
  const ValueTables vt = policy_value(mdp, policy);
  const OccupancyTables occ = occupancy(mdp, policy);

  // Second moment of the tail return, backward in h.
  std::vector<double> m(static_cast<std::size_t>(H + 1) * S, 0.0);
  for (int h = H - 1; h >= 0; --h)
    for (int s = 0; s < S; ++s) {
      double ms = 0.0;
      for (int a = 0; a < A; ++a) {
        const double pa = policy.prob(h, s, a);
        if (pa == 0.0) continue;
        const double mean_r = mdp.reward(h, s, a);
        double pv = 0.0, pm = 0.0;
        for (int sp = 0; sp < S; ++sp) {
          const double p = mdp.p(h, s, a, sp);
          pv += p * vt.V[(h + 1) * static_cast<std::size_t>(S) + sp];
          pm += p * m[(h + 1) * static_cast<std::size_t>(S) + sp];
        }
        ms += pa * (reward_second_moment(mean_r, mdp.noise) +
                    2.0 * mean_r * pv + pm);
      }
      m[static_cast<std::size_t>(h) * S + s] = ms;
    }

  ReturnVariance out;
  double second = 0.0;
  for (int s = 0; s < S; ++s) second += mdp.d1[s] * m[s];
  out.total = second - vt.v * vt.v;

  double ev2 = 0.0;
  for (int s = 0; s < S; ++s) ev2 += mdp.d1[s] * vt.V[s] * vt.V[s];
  out.initial = ev2 - vt.v * vt.v;

  out.aleatoric.assign(H, 0.0);
  out.mismatch.assign(H, 0.0);
  for (int h = 0; h < H; ++h) {
    double alea = 0.0, mis = 0.0;
    for (int s = 0; s < S; ++s) {
      double mean_q = 0.0, mean_q2 = 0.0;
      for (int a = 0; a < A; ++a) {
        const double pa = policy.prob(h, s, a);
        const double dsa = occ.sa(S, A, h, s, a);
        const double q = vt.q(H, S, A, h, s, a);
        mean_q += pa * q;
        mean_q2 += pa * q * q;
        if (dsa == 0.0) continue;
        double pv = 0.0, pv2 = 0.0;
        for (int sp = 0; sp < S; ++sp) {
          const double p = mdp.p(h, s, a, sp);
          const double vnext = vt.V[(h + 1) * static_cast<std::size_t>(S) + sp];
          pv += p * vnext;
          pv2 += p * vnext * vnext;
        }
        alea += dsa * (pv2 - pv * pv +
                       reward_variance(mdp.reward(h, s, a), mdp.noise));
      }
      mis += occ.state(S, h, s) * (mean_q2 - mean_q * mean_q);
    }
    out.aleatoric[h] = alea;
    out.mismatch[h] = mis;
  }
  return out;
}

double cr_lower_bound(const TabularMDP& mdp, const Policy& target,
                      const Policy& behavior) {
  const int S = mdp.S, A = mdp.A, H = mdp.H;
  const ValueTables vt = policy_value(mdp, target);
  const OccupancyTables dt = occupancy(mdp, target);
  const OccupancyTables db = occupancy(mdp, behavior);

  std::vector<std::array<int, 3>> missing;
  double total = 0.0;
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        const double dp = dt.sa(S, A, h, s, a);
        if (dp == 0.0) continue;
        const double dm = db.sa(S, A, h, s, a);
        if (dm <= 0.0) {
          missing.push_back({h, s, a});
          continue;
        }
        double pv = 0.0, pv2 = 0.0;
        for (int sp = 0; sp < S; ++sp) {
          const double p = mdp.p(h, s, a, sp);
          const double vnext = vt.V[(h + 1) * static_cast<std::size_t>(S) + sp];
          pv += p * vnext;
          pv2 += p * vnext * vnext;
        }
        const double cond_var =
            pv2 - pv * pv + reward_variance(mdp.reward(h, s, a), mdp.noise);
        total += dp * dp / dm * cond_var;
      }
  if (!missing.empty()) throw SupportViolation(std::move(missing));
  return total;
}

double intrinsic_bound(const TabularMDP& mdp, const Policy& behavior,
                       std::int64_t n) {
  if (n < 1) throw std::invalid_argument("sample size must be >= 1");
  const int S = mdp.S, A = mdp.A, H = mdp.H;
  auto [pistar, vt] = optimal_policy(mdp);
  const OccupancyTables dstar = occupancy(mdp, pistar);
  const OccupancyTables db = occupancy(mdp, behavior);

  double total = 0.0;
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        const double dp = dstar.sa(S, A, h, s, a);
        const double dm = db.sa(S, A, h, s, a);
        if (dp == 0.0 || dm <= 0.0) continue;
        double pv = 0.0, pv2 = 0.0;
        for (int sp = 0; sp < S; ++sp) {
          const double p = mdp.p(h, s, a, sp);
          const double vnext = vt.V[(h + 1) * static_cast<std::size_t>(S) + sp];
          pv += p * vnext;
          pv2 += p * vnext * vnext;
        }
        const double cond_var =
            pv2 - pv * pv + reward_variance(mdp.reward(h, s, a), mdp.noise);
        total += dp * std::sqrt(cond_var / (static_cast<double>(n) * dm));
      }
  return total;
}

namespace {

double occupancy_ratio_sup(const TabularMDP& mdp, const OccupancyTables& dt,
                           const OccupancyTables& db) {
  double sup = 0.0;
  for (int h = 0; h < mdp.H; ++h)
    for (int s = 0; s < mdp.S; ++s)
      for (int a = 0; a < mdp.A; ++a) {
        const double dp = dt.sa(mdp.S, mdp.A, h, s, a);
        if (dp == 0.0) continue;
        const double dm = db.sa(mdp.S, mdp.A, h, s, a);
        if (dm <= 0.0) return kInf;
        sup = std::max(sup, dp / dm);
      }
  return sup;
}

}  // namespace

CoverageDiagnostics coverage_diagnostics(const TabularMDP& mdp,
                                         const Policy& target,
                                         const Policy& behavior,
                                         std::uint64_t policy_cap) {
  const int S = mdp.S, A = mdp.A, H = mdp.H;
  CoverageDiagnostics out;

  out.reachable_state.assign(static_cast<std::size_t>(H) * S, 0);
  for (int s = 0; s < S; ++s)
    if (mdp.d1[s] > 0.0) out.reachable_state[s] = 1;
  for (int h = 0; h + 1 < H; ++h)
    for (int s = 0; s < S; ++s) {
      if (!out.reachable_state[static_cast<std::size_t>(h) * S + s]) continue;
      for (int a = 0; a < A; ++a)
        for (int sp = 0; sp < S; ++sp)
          if (mdp.p(h, s, a, sp) > 0.0)
            out.reachable_state[(h + 1) * static_cast<std::size_t>(S) + sp] = 1;
    }

  const OccupancyTables dt = occupancy(mdp, target);
  const OccupancyTables db = occupancy(mdp, behavior);

  double dm_state = kInf, dm_sa = kInf;
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s) {
      const double ds = db.state(S, h, s);
      if (ds > 0.0) dm_state = std::min(dm_state, ds);
      for (int a = 0; a < A; ++a) {
        const double dsa = db.sa(S, A, h, s, a);
        if (dsa > 0.0) dm_sa = std::min(dm_sa, dsa);
      }
    }
  out.d_m_state = std::isfinite(dm_state) ? dm_state : 0.0;
  out.d_m_sa = std::isfinite(dm_sa) ? dm_sa : 0.0;

  double tau_s = 0.0;
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s) {
      const double dp = dt.state(S, h, s);
      if (dp == 0.0) continue;
      const double dm = db.state(S, h, s);
      tau_s = dm <= 0.0 ? kInf : std::max(tau_s, dp / dm);
    }
  out.tau_s = tau_s;

  double tau_a = 0.0;
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s) {
      if (!out.reachable_state[static_cast<std::size_t>(h) * S + s]) continue;
      for (int a = 0; a < A; ++a) {
        const double pp = target.prob(h, s, a);
        if (pp == 0.0) continue;
        const double pm = behavior.prob(h, s, a);
        tau_a = pm <= 0.0 ? kInf : std::max(tau_a, pp / pm);
      }
    }
  out.tau_a = tau_a;

  out.c_star = occupancy_ratio_sup(mdp, dt, db);

  const std::uint64_t count = deterministic_policy_count(S, A, H);
  double c_mu = 0.0;
  if (count <= policy_cap) {
    for (std::uint64_t i = 0; i < count; ++i) {
      const Policy cand = deterministic_policy_from_index(i, S, A, H);
      c_mu = std::max(c_mu, occupancy_ratio_sup(mdp, occupancy(mdp, cand), db));
      if (c_mu == kInf) break;
    }
    out.c_mu_exact = true;
  } else {
    Rng rng(0x0c0ffee5eedull);
    for (std::uint64_t i = 0; i < policy_cap; ++i) {
      Policy cand(S, A, H);
      for (int h = 0; h < H; ++h)
        for (int s = 0; s < S; ++s)
          cand.prob(h, s, static_cast<int>(rng.next_u64() % A)) = 1.0;
      c_mu = std::max(c_mu, occupancy_ratio_sup(mdp, occupancy(mdp, cand), db));
      if (c_mu == kInf) break;
    }
    out.c_mu_exact = false;
  }
  out.c_mu = c_mu;
  return out;
}

RingFixture ring_mdp(int n_states, double eta, int H) {
  if (n_states < 3 || n_states % 2 == 0)
    throw std::invalid_argument("ring needs an odd number of states >= 3");
  if (eta <= 0.0 || eta >= 1.0)
    throw std::invalid_argument("eta must lie strictly inside (0, 1)");
  RingFixture out;
  out.mdp = TabularMDP(n_states, 2, H);
  for (int s = 0; s < n_states; ++s)
    out.mdp.d1[s] = 1.0 / n_states;
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < n_states; ++s) {
      const int left = (s + n_states - 1) % n_states;
      const int right = (s + 1) % n_states;
      out.mdp.p(h, s, 0, left) = 1.0;
      out.mdp.p(h, s, 1, right) = 1.0;
    }
  for (int a = 0; a < 2; ++a) out.mdp.reward(H - 1, 0, a) = 1.0;

  out.behavior = Policy(n_states, 2, H);
  out.target = Policy(n_states, 2, H);
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < n_states; ++s) {
      out.behavior.prob(h, s, 0) = 1.0 - eta;
      out.behavior.prob(h, s, 1) = eta;
      out.target.prob(h, s, 0) = eta;
      out.target.prob(h, s, 1) = 1.0 - eta;
    }
  const double c = eta * eta * eta + (1.0 - eta) * (1.0 - eta) * (1.0 - eta);
  out.a_eta = c / (eta * (1.0 - eta));
  return out;
}

TabularMDP random_mdp(std::uint64_t seed, int S, int A, int H,
                      double stochasticity) {
  if (S < 1 || A < 1 || H < 1)
    throw std::invalid_argument("dimensions must be positive");
  if (stochasticity < 0.0 || stochasticity > 1.0)
    throw std::invalid_argument("stochasticity must lie in [0, 1]");
  TabularMDP mdp(S, A, H);
  for (int s = 0; s < S; ++s) mdp.d1[s] = 1.0 / S;
  mdp.noise = stochasticity == 0.0 ? RewardNoise::deterministic
                                   : RewardNoise::bernoulli;
  Rng rng = Rng::substream(seed, 0xfa57);
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        const int det_next = static_cast<int>(rng.next_u64() % S);
        std::vector<double> g(S);
        double gsum = 0.0;
        for (int sp = 0; sp < S; ++sp) {
          g[sp] = -std::log(1.0 - rng.uniform());
          gsum += g[sp];
        }
        for (int sp = 0; sp < S; ++sp) {
          double p = stochasticity * g[sp] / gsum;
          if (sp == det_next) p += 1.0 - stochasticity;
          mdp.p(h, s, a, sp) = p;
        }
        mdp.reward(h, s, a) = rng.uniform();
      }
  return mdp;
}

std::uint64_t deterministic_policy_count(int S, int A, int H) {
  const std::uint64_t cap = std::numeric_limits<std::int64_t>::max();
  std::uint64_t count = 1;
  for (int i = 0; i < S * H; ++i) {
    if (count > cap / static_cast<std::uint64_t>(A)) return cap;
    count *= static_cast<std::uint64_t>(A);
  }
  return count;
}

Policy deterministic_policy_from_index(std::uint64_t index, int S, int A,
                                       int H) {
  Policy p(S, A, H);
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s) {
      p.prob(h, s, static_cast<int>(index % static_cast<std::uint64_t>(A))) =
          1.0;
      index /= static_cast<std::uint64_t>(A);
    }
  return p;
}

namespace {

void write_doubles(std::ostream& os, const double* xs, int count) {
  char buf[64];
  for (int i = 0; i < count; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", xs[i]);
    os << (i ? " " : "") << buf;
  }
  os << "\n";
}

class LineReader {
 public:
  explicit LineReader(std::istream& is) : is_(is) {}

  std::istringstream next(const std::string& what) {
    std::string line;
    while (std::getline(is_, line)) {
      ++lineno_;
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        return std::istringstream(line);
    }
    throw ParseError(lineno_ + 1, "truncated document, expected " + what);
  }

  int lineno() const { return lineno_; }

 private:
  std::istream& is_;
  int lineno_ = 0;
};

int read_dim_field(LineReader& lr, const std::string& key) {
  std::istringstream ls = lr.next(key);
  std::string k;
  long long v = 0;
  if (!(ls >> k) || k != key)
    throw ParseError(lr.lineno(), "expected field '" + key + "'");
  if (!(ls >> v) || v < 1)
    throw ParseError(lr.lineno(), "field '" + key + "' needs a positive integer");
  return static_cast<int>(v);
}

void read_row(LineReader& lr, std::istringstream& ls, double* out, int count,
              const std::string& what) {
  for (int i = 0; i < count; ++i)
    if (!(ls >> out[i]) || !std::isfinite(out[i]))
      throw ParseError(lr.lineno(), "non-numeric or missing value in " + what);
  double extra;
  if (ls >> extra)
    throw ParseError(lr.lineno(), "trailing values in " + what);
}

}  // namespace

void write_mdp(std::ostream& os, const TabularMDP& mdp) {
  os << "S " << mdp.S << "\n";
  os << "A " << mdp.A << "\n";
  os << "H " << mdp.H << "\n";
  os << "d1 ";
  write_doubles(os, mdp.d1.data(), mdp.S);
  os << "P\n";
  for (int h = 0; h < mdp.H; ++h)
    for (int s = 0; s < mdp.S; ++s)
      for (int a = 0; a < mdp.A; ++a)
        write_doubles(os, &mdp.P[mdp.pidx(h, s, a, 0)], mdp.S);
  os << "r\n";
  for (int h = 0; h < mdp.H; ++h)
    for (int s = 0; s < mdp.S; ++s)
      write_doubles(os, &mdp.r[mdp.ridx(h, s, 0)], mdp.A);
  os << "reward_noise "
     << (mdp.noise == RewardNoise::bernoulli ? "bernoulli" : "deterministic")
     << "\n";
}

TabularMDP read_mdp(std::istream& is) {
  LineReader lr(is);
  const int S = read_dim_field(lr, "S");
  const int A = read_dim_field(lr, "A");
  const int H = read_dim_field(lr, "H");
  TabularMDP mdp(S, A, H);

  {
    std::istringstream ls = lr.next("d1");
    std::string k;
    if (!(ls >> k) || k != "d1")
      throw ParseError(lr.lineno(), "expected field 'd1'");
    read_row(lr, ls, mdp.d1.data(), S, "d1");
  }
  {
    std::istringstream ls = lr.next("P");
    std::string k;
    if (!(ls >> k) || k != "P")
      throw ParseError(lr.lineno(), "expected field 'P'");
    for (int h = 0; h < H; ++h)
      for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
          std::istringstream row = lr.next("transition row");
          read_row(lr, row, &mdp.P[mdp.pidx(h, s, a, 0)], S,
                   "transition row for " + cell_name(h, s, a));
        }
  }
  {
    std::istringstream ls = lr.next("r");
    std::string k;
    if (!(ls >> k) || k != "r")
      throw ParseError(lr.lineno(), "expected field 'r'");
    for (int h = 0; h < H; ++h)
      for (int s = 0; s < S; ++s) {
        std::istringstream row = lr.next("reward row");
        read_row(lr, row, &mdp.r[mdp.ridx(h, s, 0)], A,
                 "reward row for (h=" + std::to_string(h) +
                     ",s=" + std::to_string(s) + ")");
      }
  }
  {
    std::istringstream ls = lr.next("reward_noise");
    std::string k, v;
    if (!(ls >> k) || k != "reward_noise")
      throw ParseError(lr.lineno(), "expected field 'reward_noise'");
    if (!(ls >> v) || (v != "deterministic" && v != "bernoulli"))
      throw ParseError(lr.lineno(),
                       "reward_noise must be deterministic or bernoulli");
    mdp.noise = v == "bernoulli" ? RewardNoise::bernoulli
                                 : RewardNoise::deterministic;
  }
  return mdp;
}

}  // namespace orl
