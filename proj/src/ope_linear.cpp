#include "orl/ope_linear.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "orl/errors.hpp"
#include "orl/linalg.hpp"
#include "orl/rng.hpp"
#include "orl/util.hpp"

namespace orl {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Eigen::Map<const VectorXd> feat(const FeatureMap& fm, int s, int a) {
  return Eigen::Map<const VectorXd>(fm.feature(s, a), fm.d);
}

/// Policy-averaged feature at (h, s): sum_a pi_h(a | s) phi(s, a).
MatrixXd policy_features(const FeatureMap& fm, const Policy& pol) {
  MatrixXd out(fm.d, static_cast<std::size_t>(pol.H) * fm.S);
  out.setZero();
  for (int h = 0; h < pol.H; ++h)
    for (int s = 0; s < fm.S; ++s) {
      VectorXd v = VectorXd::Zero(fm.d);
      for (int a = 0; a < fm.A; ++a) {
        const double p = pol.prob(h, s, a);
        if (p != 0.0) v += p * feat(fm, s, a);
      }
      out.col(static_cast<std::size_t>(h) * fm.S + s) = v;
    }
  return out;
}

void check_dims(const Dataset& data, const FeatureMap& fm,
                const Policy& target) {
  if (data.n == 0) throw std::invalid_argument("dataset holds no trajectories");
  if (fm.S != data.S || fm.A != data.A)
    throw std::invalid_argument("feature dimensions do not match the dataset");
  if (target.S != data.S || target.A != data.A || target.H != data.H)
    throw std::invalid_argument("policy dimensions do not match the dataset");
}

}  // namespace

FeatureMap FeatureMap::indicator(int S, int A) {
  FeatureMap fm(S, A, S * A);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) fm.feature(s, a)[s * A + a] = 1.0;
  return fm;
}

std::vector<std::string> validate_features(const FeatureMap& features,
                                           double tol) {
  std::vector<std::string> out;
  if (features.S < 1 || features.A < 1 || features.d < 1) {
    out.push_back("feature dimensions must be positive");
    return out;
  }
  for (int s = 0; s < features.S; ++s)
    for (int a = 0; a < features.A; ++a) {
      const double norm = feat(features, s, a).norm();
      if (norm > 1.0 + tol)
        out.push_back("feature norm " + std::to_string(norm) + " at (s=" +
                      std::to_string(s) + ",a=" + std::to_string(a) +
                      ") exceeds 1");
    }
  return out;
}

void write_features(std::ostream& os, const FeatureMap& features) {
  os << "d " << features.d << "\n";
  char buf[64];
  for (int s = 0; s < features.S; ++s)
    for (int a = 0; a < features.A; ++a) {
      os << s << " " << a;
      for (int k = 0; k < features.d; ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", features.feature(s, a)[k]);
        os << " " << buf;
      }
      os << "\n";
    }
}

FeatureMap read_features(std::istream& is, int S, int A) {
  int lineno = 0;
  std::string line;
  if (!std::getline(is, line)) throw ParseError(1, "truncated feature file");
  ++lineno;
  int d = 0;
  {
    std::istringstream ls(line);
    std::string k;
    if (!(ls >> k) || k != "d" || !(ls >> d) || d < 1)
      throw ParseError(lineno, "expected header 'd <dim>'");
  }
  FeatureMap fm(S, A, d);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) {
      do {
        if (!std::getline(is, line))
          throw ParseError(lineno + 1, "truncated feature file");
        ++lineno;
      } while (line.find_first_not_of(" \t\r") == std::string::npos);
      std::istringstream ls(line);
      int rs, ra;
      if (!(ls >> rs >> ra) || rs != s || ra != a)
        throw ParseError(lineno, "feature rows out of order");
      for (int k = 0; k < d; ++k)
        if (!(ls >> fm.feature(s, a)[k]) ||
            !std::isfinite(fm.feature(s, a)[k]))
          throw ParseError(lineno, "non-numeric feature value");
      double extra;
      if (ls >> extra) throw ParseError(lineno, "trailing feature values");
    }
  return fm;
}

double fqe_q(const FeatureMap& features, const FqeResult& fit, int h, int s,
             int a) {
  const Eigen::Map<const VectorXd> w(
      &fit.w[static_cast<std::size_t>(h) * fit.d], fit.d);
  return feat(features, s, a).dot(w);
}

FqeResult fqe_linear(const Dataset& data, const FeatureMap& features,
                     const Policy& target, double lambda) {
  check_dims(data, features, target);
  const int S = data.S, A = data.A, H = data.H, d = features.d;
  const double N = static_cast<double>(data.n) * H;
  if (lambda < 0.0) lambda = 1e-6 * N;

  const CountTables ct = pooled_counts(data);

  MatrixXd gram = lambda * MatrixXd::Identity(d, d);
  VectorXd b_r = VectorXd::Zero(d);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) {
      const std::int64_t c = ct.sa(0, s, a);
      if (c == 0) continue;
      const auto f = feat(features, s, a);
      gram.noalias() += static_cast<double>(c) * f * f.transpose();
      b_r.noalias() += ct.rewards(0, s, a) * f;
    }

  const SpdInfo info = spd_info(gram);
  if (lambda == 0.0 && info.rank < d) throw RankDeficiencyError(info.rank, d);
  Eigen::LDLT<MatrixXd> ldlt(gram);

  const MatrixXd phi_pi = policy_features(features, target);

  FqeResult out;
  out.d = d;
  out.H = H;
  out.condition = info.condition;
  out.w.assign(static_cast<std::size_t>(H) * d, 0.0);

  VectorXd w_next = VectorXd::Zero(d);
  for (int h = H - 1; h >= 0; --h) {
    VectorXd rhs = b_r;
    if (h + 1 < H) {
      // Cross-moment of observed features against the next-step
      // policy-averaged feature of the observed successor state.
      for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
          const std::int64_t c = ct.sa(0, s, a);
          if (c == 0) continue;
          double wsum = 0.0;
          for (int sp = 0; sp < S; ++sp) {
            const std::int64_t csp = ct.sas(0, s, a, sp);
            if (csp == 0) continue;
            wsum += static_cast<double>(csp) *
                    phi_pi.col((h + 1) * static_cast<std::size_t>(S) + sp)
                        .dot(w_next);
          }
          rhs.noalias() += wsum * feat(features, s, a);
        }
    }
    const VectorXd w = ldlt.solve(rhs);
    for (int k = 0; k < d; ++k)
      out.w[static_cast<std::size_t>(h) * d + k] = w[k];
    w_next = w;
  }

  const std::vector<double> d1 = empirical_initial(data);
  double v = 0.0;
  for (int s = 0; s < S; ++s)
    if (d1[s] != 0.0) v += d1[s] * phi_pi.col(s).dot(w_next);
  out.value = v;
  return out;
}

BootstrapResult bootstrap_fqe(const Dataset& data, const FeatureMap& features,
                              const Policy& target, double lambda, int B,
                              double alpha, std::uint64_t seed) {
  if (B < 1) throw std::invalid_argument("bootstrap needs B >= 1");
  if (alpha <= 0.0 || alpha >= 1.0)
    throw std::invalid_argument("alpha must lie strictly inside (0, 1)");
  check_dims(data, features, target);

  BootstrapResult out;
  out.point = fqe_linear(data, features, target, lambda).value;
  out.replicates.resize(B);

  Dataset resampled = data;
  for (int b = 0; b < B; ++b) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(b));
    for (int i = 0; i < data.n; ++i) {
      const int src = static_cast<int>(rng.next_u64() %
                                       static_cast<std::uint64_t>(data.n));
      std::copy_n(data.records.begin() +
                      static_cast<std::size_t>(src) * data.H,
                  data.H,
                  resampled.records.begin() +
                      static_cast<std::size_t>(i) * data.H);
    }
    out.replicates[b] = fqe_linear(resampled, features, target, lambda).value;
  }

  std::vector<double> sorted = out.replicates;
  std::sort(sorted.begin(), sorted.end());
  out.lo = sorted_quantile(sorted, alpha / 2.0);
  out.hi = sorted_quantile(sorted, 1.0 - alpha / 2.0);

  const double N = static_cast<double>(data.n) * data.H;
  const double mean = pairwise_mean(out.replicates);
  if (B > 1) {
    std::vector<double> dev2(B);
    for (int b = 0; b < B; ++b) {
      const double dv = out.replicates[b] - mean;
      dev2[b] = dv * dv;
    }
    out.variance = N * pairwise_sum(dev2) / static_cast<double>(B - 1);
  }
  return out;
}

double asymptotic_variance_oracle(const TabularMDP& mdp,
                                  const FeatureMap& features,
                                  const Policy& target,
                                  const Policy& behavior) {
  const int S = mdp.S, A = mdp.A, H = mdp.H, d = features.d;
  if (S * A > 64 || H > 8)
    throw std::invalid_argument(
        "variance oracle is limited to S * A <= 64 and H <= 8");
  if (features.S != S || features.A != A)
    throw std::invalid_argument("feature dimensions do not match the MDP");

  const ValueTables vt = policy_value(mdp, target);
  const OccupancyTables dpi = occupancy(mdp, target);
  const OccupancyTables dmu = occupancy(mdp, behavior);

  MatrixXd gram = MatrixXd::Zero(d, d);
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        const double w = dmu.sa(S, A, h, s, a);
        if (w == 0.0) continue;
        const auto f = feat(features, s, a);
        gram.noalias() += (w / H) * f * f.transpose();
      }
  const SpdInfo info = spd_info(gram);
  if (info.rank < d) throw RankDeficiencyError(info.rank, d);
  Eigen::LDLT<MatrixXd> ldlt(gram);

  // Solved occupancy-feature directions, one per evaluation layer.
  MatrixXd u(d, H);
  for (int h = 0; h < H; ++h) {
    VectorXd nu = VectorXd::Zero(d);
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        const double w = dpi.sa(S, A, h, s, a);
        if (w != 0.0) nu.noalias() += w * feat(features, s, a);
      }
    u.col(h) = ldlt.solve(nu);
  }

  // Residual first moments b[h1] and the value cross moments, per data cell.
  double sigma2 = 0.0;
  std::vector<double> b(H), pv(H + 1), pvv(static_cast<std::size_t>(H + 1) *
                                           (H + 1));
  for (int hp = 0; hp < H; ++hp)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        const double w = dmu.sa(S, A, hp, s, a);
        if (w == 0.0) continue;
        const double mean_r = mdp.reward(hp, s, a);
        const double var_r = mdp.noise == RewardNoise::bernoulli
                                 ? mean_r * (1.0 - mean_r)
                                 : 0.0;
        for (int h1 = 0; h1 <= H; ++h1) {
          double e = 0.0;
          for (int sp = 0; sp < S; ++sp)
            e += mdp.p(hp, s, a, sp) *
                 vt.V[static_cast<std::size_t>(h1) * S + sp];
          pv[h1] = e;
        }
        for (int h1 = 0; h1 <= H; ++h1)
          for (int h2 = h1; h2 <= H; ++h2) {
            double e = 0.0;
            for (int sp = 0; sp < S; ++sp)
              e += mdp.p(hp, s, a, sp) *
                   vt.V[static_cast<std::size_t>(h1) * S + sp] *
                   vt.V[static_cast<std::size_t>(h2) * S + sp];
            pvv[static_cast<std::size_t>(h1) * (H + 1) + h2] = e;
            pvv[static_cast<std::size_t>(h2) * (H + 1) + h1] = e;
          }
        for (int h1 = 0; h1 < H; ++h1)
          b[h1] = vt.q(H, S, A, h1, s, a) - mean_r - pv[h1 + 1];

        const auto f = feat(features, s, a);
        for (int h1 = 0; h1 < H; ++h1) {
          const double fu1 = f.dot(u.col(h1));
          if (fu1 == 0.0) continue;
          for (int h2 = 0; h2 < H; ++h2) {
            const double fu2 = f.dot(u.col(h2));
            if (fu2 == 0.0) continue;
            const double cov_v =
                pvv[static_cast<std::size_t>(h1 + 1) * (H + 1) + (h2 + 1)] -
                pv[h1 + 1] * pv[h2 + 1];
            const double cross = b[h1] * b[h2] + var_r + cov_v;
            sigma2 += (w / H) * fu1 * fu2 * cross;
          }
        }
      }
  return sigma2;
}

double chi_square_divergence(const TabularMDP& mdp, const FeatureMap& features,
                             const Policy& target, const Policy& behavior) {
  const int S = mdp.S, A = mdp.A, H = mdp.H, d = features.d;
  if (features.S != S || features.A != A)
    throw std::invalid_argument("feature dimensions do not match the MDP");
  const OccupancyTables dpi = occupancy(mdp, target);
  const OccupancyTables dmu = occupancy(mdp, behavior);

  VectorXd nu = VectorXd::Zero(d);
  MatrixXd m = MatrixXd::Zero(d, d);
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        const auto f = feat(features, s, a);
        const double wp = dpi.sa(S, A, h, s, a);
        if (wp != 0.0) nu.noalias() += (wp / H) * f;
        const double wq = dmu.sa(S, A, h, s, a);
        if (wq != 0.0) m.noalias() += (wq / H) * f * f.transpose();
      }

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
  const VectorXd ev = es.eigenvalues();
  const MatrixXd basis = es.eigenvectors();
  const double tol = 1e-12 * std::max(1.0, ev.maxCoeff());
  double quad = 0.0;
  for (int j = 0; j < d; ++j) {
    const double proj = basis.col(j).dot(nu);
    if (ev[j] > tol) {
      quad += proj * proj / ev[j];
    } else if (std::abs(proj) > 1e-9) {
      // Target mass in a feature direction the behavior never excites.
      return std::numeric_limits<double>::infinity();
    }
  }
  return quad - 1.0;
}

}  // namespace orl
