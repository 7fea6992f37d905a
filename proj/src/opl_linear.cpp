#include "orl/opl_linear.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "orl/linalg.hpp"
#include "orl/rng.hpp"

namespace orl {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kConditionCap = 1e12;

Eigen::Map<const VectorXd> feat(const FeatureMap& fm, int s, int a) {
  return Eigen::Map<const VectorXd>(fm.feature(s, a), fm.d);
}

void check_dims(const Dataset& data, const FeatureMap& fm) {
  if (data.n < 1) throw std::invalid_argument("dataset holds no trajectories");
  if (fm.S != data.S || fm.A != data.A)
    throw std::invalid_argument("feature dimensions do not match the dataset");
}

LearnedPolicyReport finish_report(const Dataset& data, int S, int A, int H,
                                  std::vector<double> Q) {
  LearnedPolicyReport out;
  out.Q = std::move(Q);
  out.V.assign(static_cast<std::size_t>(H + 1) * S, 0.0);
  out.policy = Policy(S, A, H);
  for (int h = H - 1; h >= 0; --h)
    for (int s = 0; s < S; ++s) {
      int best = 0;
      double best_q = -1.0;
      for (int a = 0; a < A; ++a) {
        const double q = out.Q[(static_cast<std::size_t>(h) * S + s) * A + a];
        if (q > best_q) {
          best_q = q;
          best = a;
        }
      }
      out.policy.prob(h, s, best) = 1.0;
      out.V[static_cast<std::size_t>(h) * S + s] = best_q;
    }
  const std::vector<double> d1 = empirical_initial(data);
  double v = 0.0;
  for (int s = 0; s < S; ++s) v += d1[s] * out.V[s];
  out.value_lower = v;
  return out;
}

}  // namespace

LearnedPolicyReport pfvi(const Dataset& data, const FeatureMap& features,
                         double lambda, double beta,
                         std::vector<GramState>* grams) {
  check_dims(data, features);
  if (lambda <= 0.0) throw std::invalid_argument("lambda must be positive");
  const int S = data.S, A = data.A, H = data.H, d = features.d;
  if (beta < 0.0) beta = static_cast<double>(d) * H;
  const CountTables ct = counts(data);
  if (grams) grams->clear();

  std::vector<double> Q(static_cast<std::size_t>(H) * S * A, 0.0);
  std::vector<std::vector<double>> v_layers(H + 1,
                                            std::vector<double>(S, 0.0));

  for (int h = H - 1; h >= 0; --h) {
    MatrixXd gram = lambda * MatrixXd::Identity(d, d);
    VectorXd rhs = VectorXd::Zero(d);
    std::int64_t samples = 0;
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        const std::int64_t c = ct.sa(h, s, a);
        if (c == 0) continue;
        samples += c;
        const auto f = feat(features, s, a);
        gram.noalias() += static_cast<double>(c) * f * f.transpose();
        double y = ct.rewards(h, s, a);
        for (int sp = 0; sp < S; ++sp) {
          const std::int64_t csp = ct.sas(h, s, a, sp);
          if (csp != 0) y += static_cast<double>(csp) * v_layers[h + 1][sp];
        }
        rhs.noalias() += y * f;
      }
    const SpdSolver solver(gram, kConditionCap);
    const VectorXd w = solver.solve(rhs);
    if (grams)
      grams->push_back({gram, solver.info().condition, samples});

    const double range = static_cast<double>(H - h);
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        const auto f = feat(features, s, a);
        const double width = std::sqrt(f.dot(solver.solve(f)));
        const double q = std::clamp(f.dot(w) - beta * width, 0.0, range);
        Q[(static_cast<std::size_t>(h) * S + s) * A + a] = q;
        v_layers[h][s] = std::max(v_layers[h][s], q);
      }
  }
  if (grams) std::reverse(grams->begin(), grams->end());
  return finish_report(data, S, A, H, std::move(Q));
}

std::vector<double> variance_estimate(const Dataset& data, int h,
                                      const FeatureMap& features,
                                      const std::vector<double>& v_next,
                                      double lambda) {
  check_dims(data, features);
  if (lambda <= 0.0) throw std::invalid_argument("lambda must be positive");
  if (h < 0 || h >= data.H) throw std::invalid_argument("layer out of range");
  if (v_next.size() != static_cast<std::size_t>(data.S))
    throw std::invalid_argument("next-step values must have one entry per state");
  const int S = data.S, A = data.A, d = features.d;
  const double hi = static_cast<double>(data.H) * data.H;

  MatrixXd gram = lambda * MatrixXd::Identity(d, d);
  VectorXd b1 = VectorXd::Zero(d), b2 = VectorXd::Zero(d);
  for (int i = 0; i < data.n; ++i) {
    const Transition& t = data.at(i, h);
    const auto f = feat(features, t.s, t.a);
    const double z = t.r + v_next[t.s_next];
    gram.noalias() += f * f.transpose();
    b1.noalias() += z * f;
    b2.noalias() += z * z * f;
  }
  const SpdSolver solver(gram, kConditionCap);
  const VectorXd w1 = solver.solve(b1);
  const VectorXd w2 = solver.solve(b2);

  std::vector<double> out(static_cast<std::size_t>(S) * A, 1.0);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) {
      const auto f = feat(features, s, a);
      const double m1 = f.dot(w1);
      const double m2 = f.dot(w2);
      out[static_cast<std::size_t>(s) * A + a] =
          std::clamp(m2 - m1 * m1, 1.0, hi);
    }
  return out;
}

LearnedPolicyReport vw_pfvi(const Dataset& data, const FeatureMap& features,
                            double lambda, const VwBonusConfig& config,
                            std::vector<GramState>* grams) {
  check_dims(data, features);
  if (lambda <= 0.0) throw std::invalid_argument("lambda must be positive");
  if (config.delta <= 0.0 || config.delta >= 1.0)
    throw std::invalid_argument("delta must lie strictly inside (0, 1)");
  const int S = data.S, A = data.A, H = data.H, d = features.d;
  const double n = static_cast<double>(data.n);
  const double iota = std::log(2.0 * d * H * n / config.delta);
  const CountTables ct = counts(data);
  if (grams) grams->clear();

  std::vector<double> Q(static_cast<std::size_t>(H) * S * A, 0.0);
  std::vector<std::vector<double>> v_layers(H + 1,
                                            std::vector<double>(S, 0.0));

  for (int h = H - 1; h >= 0; --h) {
    const std::vector<double> sigma2 =
        variance_estimate(data, h, features, v_layers[h + 1], lambda);

    MatrixXd gram = lambda * MatrixXd::Identity(d, d);
    VectorXd rhs = VectorXd::Zero(d);
    std::int64_t samples = 0;
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        const std::int64_t c = ct.sa(h, s, a);
        if (c == 0) continue;
        samples += c;
        const double inv_var = 1.0 / sigma2[static_cast<std::size_t>(s) * A + a];
        const auto f = feat(features, s, a);
        gram.noalias() +=
            static_cast<double>(c) * inv_var * f * f.transpose();
        double y = ct.rewards(h, s, a);
        for (int sp = 0; sp < S; ++sp) {
          const std::int64_t csp = ct.sas(h, s, a, sp);
          if (csp != 0) y += static_cast<double>(csp) * v_layers[h + 1][sp];
        }
        rhs.noalias() += inv_var * y * f;
      }
    const SpdSolver solver(gram, kConditionCap);
    const VectorXd w = solver.solve(rhs);
    if (grams)
      grams->push_back({gram, solver.info().condition, samples});

    const double tail = config.c_prime * std::pow(static_cast<double>(H), 4) *
                        std::sqrt(static_cast<double>(d)) * iota / n;
    const double range = static_cast<double>(H - h);
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        const auto f = feat(features, s, a);
        const double width = std::sqrt(f.dot(solver.solve(f)));
        const double bonus =
            config.c * std::sqrt(static_cast<double>(d) * iota) * width + tail;
        const double q = std::clamp(f.dot(w) - bonus, 0.0, range);
        Q[(static_cast<std::size_t>(h) * S + s) * A + a] = q;
        v_layers[h][s] = std::max(v_layers[h][s], q);
      }
  }
  if (grams) std::reverse(grams->begin(), grams->end());
  return finish_report(data, S, A, H, std::move(Q));
}

LinearMdpFixture linear_mdp_fixture(std::uint64_t seed, int S, int A, int d,
                                    int H,
                                    const LinearFixtureOptions& opts) {
  if (S < 1 || A < 1 || H < 1 || d < 1 || d > S * A)
    throw std::invalid_argument("need 1 <= d <= S * A and positive dims");

  LinearMdpFixture out;
  out.mdp = TabularMDP(S, A, H);
  out.mdp.noise = opts.bernoulli_rewards ? RewardNoise::bernoulli
                                         : RewardNoise::deterministic;
  for (int s = 0; s < S; ++s) out.mdp.d1[s] = 1.0 / S;

  Rng rng = Rng::substream(seed, 0x11f);

  // Surjective group assignment; the feature of a cell is the one-hot of
  // its group, so the instance is exactly realizable in dimension d.
  std::vector<int> group(static_cast<std::size_t>(S) * A);
  for (int k = 0; k < S * A; ++k)
    group[k] = k < d ? k : static_cast<int>(rng.next_u64() %
                                            static_cast<std::uint64_t>(d));
  out.features = FeatureMap(S, A, d);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a)
      out.features.feature(s, a)[group[static_cast<std::size_t>(s) * A + a]] =
          1.0;

  out.theta.assign(static_cast<std::size_t>(H) * d, 0.0);
  for (int h = 0; h < H; ++h) {
    const bool deterministic_layer =
        opts.all_deterministic ||
        (opts.deterministic_except >= 0 && h != opts.deterministic_except);
    for (int j = 0; j < d; ++j) {
      std::vector<double> anchor(S, 0.0);
      if (deterministic_layer) {
        anchor[static_cast<int>(rng.next_u64() %
                                static_cast<std::uint64_t>(S))] = 1.0;
      } else {
        double gsum = 0.0;
        std::vector<double> g(S);
        for (int sp = 0; sp < S; ++sp) {
          g[sp] = -std::log(1.0 - rng.uniform());
          gsum += g[sp];
        }
        for (int sp = 0; sp < S; ++sp)
          anchor[sp] = (1.0 - opts.anchor_spread) / S +
                       opts.anchor_spread * g[sp] / gsum;
      }
      out.theta[static_cast<std::size_t>(h) * d + j] = rng.uniform();
      for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
          if (group[static_cast<std::size_t>(s) * A + a] != j) continue;
          for (int sp = 0; sp < S; ++sp) out.mdp.p(h, s, a, sp) = anchor[sp];
          out.mdp.reward(h, s, a) =
              out.theta[static_cast<std::size_t>(h) * d + j];
        }
    }
  }

  out.behavior = Policy(S, A, H);
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s) {
      const int fav =
          static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(A));
      for (int a = 0; a < A; ++a)
        out.behavior.prob(h, s, a) =
            (1.0 - opts.behavior_skew) / A +
            (a == fav ? opts.behavior_skew : 0.0);
    }
  return out;
}

}  // namespace orl
