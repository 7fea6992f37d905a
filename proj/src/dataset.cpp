#include "orl/dataset.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "orl/errors.hpp"
#include "orl/rng.hpp"

namespace orl {

Dataset sample_trajectories(const TabularMDP& mdp, const Policy& behavior,
                            int n, std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("trajectory count must be >= 0");
  {
    auto bad = validate_mdp(mdp);
    if (!bad.empty()) throw std::invalid_argument("invalid MDP: " + bad.front());
    bad = validate_policy(mdp, behavior);
    if (!bad.empty())
      throw std::invalid_argument("invalid policy: " + bad.front());
  }
  const int S = mdp.S, A = mdp.A, H = mdp.H;
  Dataset out;
  out.n = n;
  out.H = H;
  out.S = S;
  out.A = A;
  out.seed = seed;
  out.policy_hash = behavior.hash();
  out.mdp_hash = mdp.hash();
  out.records.resize(static_cast<std::size_t>(n) * H);

  for (int i = 0; i < n; ++i) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(i));
    int s = rng.categorical({mdp.d1.data(), static_cast<std::size_t>(S)});
    for (int h = 0; h < H; ++h) {
      const int a = rng.categorical(
          {&behavior.pi[(static_cast<std::size_t>(h) * S + s) * A],
           static_cast<std::size_t>(A)});
      const double mean = mdp.reward(h, s, a);
      const double r = mdp.noise == RewardNoise::bernoulli
                           ? (rng.bernoulli(mean) ? 1.0 : 0.0)
                           : mean;
      const int sp = rng.categorical(
          {&mdp.P[mdp.pidx(h, s, a, 0)], static_cast<std::size_t>(S)});
      out.records[static_cast<std::size_t>(i) * H + h] = {s, a, r, sp};
      s = sp;
    }
  }
  return out;
}

namespace {

CountTables tally(const Dataset& data, bool pool_layers) {
  CountTables out;
  out.S = data.S;
  out.A = data.A;
  out.H = pool_layers ? 1 : data.H;
  const int S = out.S, A = out.A;
  out.n_state.assign(static_cast<std::size_t>(out.H) * S, 0);
  out.n_sa.assign(static_cast<std::size_t>(out.H) * S * A, 0);
  out.n_sas.assign(static_cast<std::size_t>(out.H) * S * A * S, 0);
  out.r_sum.assign(static_cast<std::size_t>(out.H) * S * A, 0.0);
  for (int i = 0; i < data.n; ++i)
    for (int h = 0; h < data.H; ++h) {
      const Transition& t = data.at(i, h);
      const int hh = pool_layers ? 0 : h;
      ++out.n_state[static_cast<std::size_t>(hh) * S + t.s];
      const std::size_t sa = (static_cast<std::size_t>(hh) * S + t.s) * A + t.a;
      ++out.n_sa[sa];
      ++out.n_sas[sa * S + t.s_next];
      out.r_sum[sa] += t.r;
    }
  return out;
}

}  // namespace

CountTables counts(const Dataset& data) { return tally(data, false); }

CountTables pooled_counts(const Dataset& data) { return tally(data, true); }

std::vector<double> empirical_initial(const Dataset& data) {
  std::vector<double> out(data.S, 0.0);
  if (data.n == 0) return out;
  for (int i = 0; i < data.n; ++i) out[data.at(i, 0).s] += 1.0;
  for (double& x : out) x /= data.n;
  return out;
}

namespace {

void write_meta(std::ostream& os, const char* key,
                const std::optional<std::uint64_t>& v) {
  if (v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, *v);
    os << key << " " << buf << "\n";
  } else {
    os << key << " -\n";
  }
}

std::optional<std::uint64_t> read_meta(std::istream& is, int& lineno,
                                       const std::string& key) {
  std::string line;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::string k, v;
    if (!(ls >> k) || k != key)
      throw ParseError(lineno, "expected meta field '" + key + "'");
    if (!(ls >> v))
      throw ParseError(lineno, "meta field '" + key + "' needs a value");
    if (v == "-") return std::nullopt;
    try {
      std::size_t used = 0;
      const std::uint64_t parsed = std::stoull(v, &used, 16);
      if (used != v.size()) throw std::invalid_argument("trailing");
      return parsed;
    } catch (const std::exception&) {
      throw ParseError(lineno, "meta field '" + key + "' is not 64-bit hex");
    }
  }
  throw ParseError(lineno + 1, "truncated document, expected '" + key + "'");
}

}  // namespace

void write_dataset(std::ostream& os, const Dataset& data) {
  os << data.n << " " << data.H << " " << data.S << " " << data.A << "\n";
  char buf[64];
  for (int i = 0; i < data.n; ++i)
    for (int h = 0; h < data.H; ++h) {
      const Transition& t = data.at(i, h);
      std::snprintf(buf, sizeof buf, "%.17g", t.r);
      os << i << " " << h << " " << t.s << " " << t.a << " " << buf << " "
         << t.s_next << "\n";
    }
  write_meta(os, "seed", data.seed);
  write_meta(os, "policy_hash", data.policy_hash);
  write_meta(os, "mdp_hash", data.mdp_hash);
}

Dataset read_dataset(std::istream& is) {
  int lineno = 0;
  std::string line;

  Dataset out;
  {
    if (!std::getline(is, line))
      throw ParseError(1, "truncated document, expected header");
    ++lineno;
    std::istringstream ls(line);
    long long n, H, S, A;
    if (!(ls >> n >> H >> S >> A) || n < 0 || H < 1 || S < 1 || A < 1)
      throw ParseError(lineno, "malformed header, expected 'n H S A'");
    double extra;
    if (ls >> extra) throw ParseError(lineno, "trailing values in header");
    out.n = static_cast<int>(n);
    out.H = static_cast<int>(H);
    out.S = static_cast<int>(S);
    out.A = static_cast<int>(A);
  }
  out.records.resize(static_cast<std::size_t>(out.n) * out.H);

  for (int i = 0; i < out.n; ++i)
    for (int h = 0; h < out.H; ++h) {
      do {
        if (!std::getline(is, line))
          throw ParseError(lineno + 1, "truncated document, expected record (" +
                                           std::to_string(i) + ", " +
                                           std::to_string(h) + ")");
        ++lineno;
      } while (line.find_first_not_of(" \t\r") == std::string::npos);
      std::istringstream ls(line);
      long long ri, rh, s, a, sp;
      double r;
      if (!(ls >> ri >> rh >> s >> a >> r >> sp))
        throw ParseError(lineno, "non-numeric or missing value in record");
      if (ri != i || rh != h)
        throw ParseError(lineno, "records out of order, expected (" +
                                     std::to_string(i) + ", " +
                                     std::to_string(h) + ")");
      if (s < 0 || s >= out.S || sp < 0 || sp >= out.S)
        throw ParseError(lineno, "state index out of range");
      if (a < 0 || a >= out.A)
        throw ParseError(lineno, "action index out of range");
      if (!std::isfinite(r)) throw ParseError(lineno, "reward is not finite");
      double extra;
      if (ls >> extra) throw ParseError(lineno, "trailing values in record");
      out.records[static_cast<std::size_t>(i) * out.H + h] = {
          static_cast<int>(s), static_cast<int>(a), r, static_cast<int>(sp)};
    }

  out.seed = read_meta(is, lineno, "seed");
  out.policy_hash = read_meta(is, lineno, "policy_hash");
  out.mdp_hash = read_meta(is, lineno, "mdp_hash");
  return out;
}

}  // namespace orl
