#include "orl/bench.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "orl/dataset.hpp"
#include "orl/errors.hpp"
#include "orl/low_adaptive.hpp"
#include "orl/ope_tabular.hpp"
#include "orl/opl_linear.hpp"
#include "orl/opl_tabular.hpp"
#include "orl/rng.hpp"
#include "orl/util.hpp"

namespace orl {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::vector<std::string>& known_kinds() {
  static const std::vector<std::string> kinds = {
      "ope-scaling", "ope-efficiency", "opl-pessimism",
      "opl-linear",  "low-adaptive",   "curse-of-horizon"};
  return kinds;
}

/// Seed for grid point `index` of the run, decorrelated from trajectory
/// substreams by the extra draw.
std::uint64_t point_seed(std::uint64_t run_seed, std::uint64_t index) {
  Rng r = Rng::substream(run_seed, 0xb3ac4000ull + index);
  return r.next_u64();
}

Policy soften(const Policy& base, double uniform_weight) {
  Policy out(base.S, base.A, base.H);
  for (int h = 0; h < base.H; ++h)
    for (int s = 0; s < base.S; ++s)
      for (int a = 0; a < base.A; ++a)
        out.prob(h, s, a) = (1.0 - uniform_weight) * base.prob(h, s, a) +
                            uniform_weight / base.A;
  return out;
}

/// State-independent transitions: every (s, a) row of layer h equals one
/// shared next-state distribution, so value functions have range at most 1.
TabularMDP fastmix_mdp(std::uint64_t seed, int S, int A, int H) {
  TabularMDP mdp(S, A, H);
  mdp.noise = RewardNoise::bernoulli;
  for (int s = 0; s < S; ++s) mdp.d1[s] = 1.0 / S;
  Rng rng = Rng::substream(seed, 0xfa57);
  for (int h = 0; h < H; ++h) {
    std::vector<double> nu(S);
    double total = 0.0;
    for (int s = 0; s < S; ++s) {
      nu[s] = -std::log(1.0 - rng.uniform());
      total += nu[s];
    }
    for (int s = 0; s < S; ++s) nu[s] /= total;
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        for (int sp = 0; sp < S; ++sp) mdp.p(h, s, a, sp) = nu[sp];
        mdp.reward(h, s, a) = rng.uniform();
      }
  }
  return mdp;
}

struct Welfordish {
  std::vector<double> values;

  void push(double v) { values.push_back(v); }
  std::size_t count() const { return values.size(); }
  double mean() const { return pairwise_mean(values); }
  double se_of_mean() const {
    const std::size_t k = values.size();
    if (k < 2) return 0.0;
    const double m = mean();
    std::vector<double> dev2(k);
    for (std::size_t i = 0; i < k; ++i)
      dev2[i] = (values[i] - m) * (values[i] - m);
    return std::sqrt(pairwise_sum(dev2) /
                     (static_cast<double>(k - 1) * static_cast<double>(k)));
  }
  double median() {
    if (values.empty()) return 0.0;
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    return sorted_quantile(sorted, 0.5);
  }
};

}  // namespace

ExperimentConfig default_config(const std::string& kind) {
  ExperimentConfig c;
  c.kind = kind;
  if (kind == "ope-scaling") {
    c.fixture = "random";
    c.n_grid = {250, 1000, 4000};
    c.h_grid = {2, 4, 8, 16};
    c.methods = {"is", "step-is", "smis", "tmis"};
    c.reps = 64;
  } else if (kind == "ope-efficiency") {
    c.fixture = "random";
    c.n_grid = {1000, 10000};
    c.h_grid = {c.H};
    c.methods = {"tmis"};
    c.reps = 200;
  } else if (kind == "opl-pessimism") {
    c.fixture = "random";
    c.S = 3;
    c.A = 2;
    c.H = 4;
    c.n_grid = {250, 1000, 4000, 16000};
    c.h_grid = {4};
    c.methods = {"bernstein", "hoeffding", "erm"};
    c.reps = 50;
  } else if (kind == "opl-linear") {
    c.fixture = "linear";
    c.S = 8;
    c.A = 2;
    c.H = 8;
    c.n_grid = {20000};
    c.h_grid = {4, 8, 16};
    c.methods = {"pfvi", "vw-pfvi"};
    c.reps = 20;
  } else if (kind == "low-adaptive") {
    c.fixture = "random";
    c.S = 2;
    c.A = 2;
    c.H = 2;
    c.n_grid = {1};
    c.h_grid = {2};
    c.t_grid = {512, 2048, 8192};
    c.methods = {"apeve", "larfe"};
    c.reps = 20;
  } else if (kind == "curse-of-horizon") {
    c.fixture = "ring";
    c.S = 5;
    c.n_grid = {200000};
    c.h_grid = {2, 4, 6, 8, 10};
    c.methods = {"is-ratio"};
    c.reps = 2;
  } else {
    throw std::invalid_argument("unknown experiment kind: " + kind);
  }
  return c;
}

ExperimentConfig parse_config(std::istream& is) {
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") +
                                e.what());
  }
  if (!j.is_object())
    throw std::invalid_argument("config root must be a JSON object");
  if (!j.contains("kind") || !j["kind"].is_string())
    throw std::invalid_argument("config requires a string field 'kind'");
  ExperimentConfig c = default_config(j["kind"].get<std::string>());
  try {
    for (const auto& [key, val] : j.items()) {
      if (key == "kind") {
      } else if (key == "fixture") {
        c.fixture = val.get<std::string>();
      } else if (key == "fixture_seed") {
        c.fixture_seed = val.get<std::uint64_t>();
      } else if (key == "S") {
        c.S = val.get<int>();
      } else if (key == "A") {
        c.A = val.get<int>();
      } else if (key == "H") {
        c.H = val.get<int>();
      } else if (key == "eta") {
        c.eta = val.get<double>();
      } else if (key == "stochasticity") {
        c.stochasticity = val.get<double>();
      } else if (key == "epsilon") {
        c.epsilon = val.get<double>();
      } else if (key == "n_grid") {
        c.n_grid = val.get<std::vector<std::int64_t>>();
      } else if (key == "h_grid") {
        c.h_grid = val.get<std::vector<int>>();
      } else if (key == "t_grid") {
        c.t_grid = val.get<std::vector<int>>();
      } else if (key == "methods") {
        c.methods = val.get<std::vector<std::string>>();
      } else if (key == "reps") {
        c.reps = val.get<int>();
      } else if (key == "seed") {
        c.seed = val.get<std::uint64_t>();
      } else if (key == "out") {
        c.out = val.get<std::string>();
      } else {
        throw std::invalid_argument("unknown config field '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config field has wrong type: ") +
                                e.what());
  }
  return c;
}

void validate_config(const ExperimentConfig& c) {
  const auto& kinds = known_kinds();
  if (std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end())
    throw std::invalid_argument("unknown experiment kind: " + c.kind);
  if (c.S < 1 || c.A < 1 || c.H < 1)
    throw std::invalid_argument("S, A, H must all be >= 1");
  if (c.reps < 2)
    throw std::invalid_argument("reps must be >= 2 for variance estimates");
  if (c.n_grid.empty()) throw std::invalid_argument("n_grid must be non-empty");
  if (c.h_grid.empty() && c.kind != "low-adaptive")
    throw std::invalid_argument("h_grid must be non-empty");
  if (c.kind == "low-adaptive" && c.t_grid.empty())
    throw std::invalid_argument("t_grid must be non-empty");
  if (c.methods.empty())
    throw std::invalid_argument("methods must be non-empty");
  for (std::int64_t n : c.n_grid)
    if (n < 1) throw std::invalid_argument("n_grid entries must be >= 1");
  for (int h : c.h_grid)
    if (h < 1) throw std::invalid_argument("h_grid entries must be >= 1");
  for (int t : c.t_grid)
    if (t < 4) throw std::invalid_argument("t_grid entries must be >= 4");
  if (c.epsilon <= 0.0) throw std::invalid_argument("epsilon must be > 0");
}

std::uint64_t config_hash(const ExperimentConfig& c) {
  std::ostringstream os;
  os << c.kind << '|' << c.fixture << '|' << c.fixture_seed << '|' << c.S
     << '|' << c.A << '|' << c.H << '|' << fmt17(c.eta) << '|'
     << fmt17(c.stochasticity) << '|' << fmt17(c.epsilon) << '|';
  for (std::int64_t n : c.n_grid) os << n << ',';
  os << '|';
  for (int h : c.h_grid) os << h << ',';
  os << '|';
  for (int t : c.t_grid) os << t << ',';
  os << '|';
  for (const std::string& m : c.methods) os << m << ',';
  os << '|' << c.reps << '|' << c.seed;
  const std::string s = os.str();
  return fnv1a64(s.data(), s.size());
}

void write_manifest(std::ostream& os, const ExperimentConfig& c) {
  char hex[32];
  std::snprintf(hex, sizeof hex, "%016" PRIx64, config_hash(c));
  os << "# orl-bench v1\n";
  os << "# config_hash " << hex << "\n";
  os << "# kind " << c.kind << " fixture " << c.fixture << " fixture_seed "
     << c.fixture_seed << "\n";
  os << "# S " << c.S << " A " << c.A << " H " << c.H << " eta "
     << fmt17(c.eta) << " stochasticity " << fmt17(c.stochasticity)
     << " epsilon " << fmt17(c.epsilon) << "\n";
  os << "# seed " << c.seed << " reps " << c.reps << "\n";
  os << "# n_grid";
  for (std::int64_t n : c.n_grid) os << ' ' << n;
  os << "\n# h_grid";
  for (int h : c.h_grid) os << ' ' << h;
  os << "\n# t_grid";
  for (int t : c.t_grid) os << ' ' << t;
  os << "\n# methods";
  for (const std::string& m : c.methods) os << ' ' << m;
  os << "\n";
  const BonusConfig bc;
  os << "# const pvi.c_var " << fmt17(bc.c_var) << "\n";
  os << "# const pvi.c_range " << fmt17(bc.c_range) << "\n";
  os << "# const pvi.delta " << fmt17(bc.delta) << "\n";
  os << "# const pvi.log_factor log(2*H*S*A/delta)\n";
  os << "# const fqe.lambda_default 1e-6*N\n";
  os << "# const pfvi.lambda 1\n";
  os << "# const pfvi.beta_default d*H\n";
  const VwBonusConfig vw;
  os << "# const vw.c " << fmt17(vw.c) << "\n";
  os << "# const vw.c_prime " << fmt17(vw.c_prime) << "\n";
  os << "# const vw.delta " << fmt17(vw.delta) << "\n";
  os << "# const vw.log_factor log(2*d*H*n/delta)\n";
  const ApeveConfig ac;
  os << "# const apeve.delta " << fmt17(ac.delta) << "\n";
  os << "# const apeve.ci_scale " << fmt17(ac.ci_scale) << "\n";
  os << "# const apeve.crude_fraction " << fmt17(ac.crude_fraction) << "\n";
  os << "# const apeve.policy_cap " << ac.policy_cap << "\n";
  const LarfeConfig lc;
  os << "# const larfe.delta " << fmt17(lc.delta) << "\n";
  os << "# const larfe.budget_scale " << fmt17(lc.budget_scale) << "\n";
  os << "# note stage lengths use the doubling-exponent schedule "
        "ceil(T^(1-2^-k)) truncated to sum T\n";
  os << "# float ieee754 double, round-to-nearest-even, pairwise summation\n";
  os << "# columns experiment method n H metric value se seed\n";
}

void write_rows(std::ostream& os, const std::vector<ResultRow>& rows) {
  for (const ResultRow& r : rows)
    os << r.experiment << ' ' << r.method << ' ' << r.n << ' ' << r.H << ' '
       << r.metric << ' ' << fmt17(r.value) << ' ' << fmt17(r.se) << ' '
       << r.seed << "\n";
}

std::vector<ResultRow> read_rows(std::istream& is) {
  std::vector<ResultRow> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    ResultRow r;
    if (!(ls >> r.experiment >> r.method >> r.n >> r.H >> r.metric >>
          r.value >> r.se >> r.seed))
      throw ParseError(lineno, "malformed result row");
    rows.push_back(std::move(r));
  }
  return rows;
}

FitResult fit_loglog(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size())
    throw std::invalid_argument("fit inputs differ in length");
  FitResult out;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] > 0.0 && ys[i] > 0.0) {
      lx.push_back(std::log(xs[i]));
      ly.push_back(std::log(ys[i]));
    } else {
      ++out.excluded;
    }
  }
  out.used = static_cast<int>(lx.size());
  if (out.used < 3)
    throw std::invalid_argument(
        "log-log fit needs at least 3 positive points, got " +
        std::to_string(out.used));
  const double mx = pairwise_mean(lx), my = pairwise_mean(ly);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < out.used; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx <= 0.0)
    throw std::invalid_argument("log-log fit needs at least 2 distinct x");
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double ss_res = 0.0;
  for (int i = 0; i < out.used; ++i) {
    const double e = ly[i] - (out.intercept + out.slope * lx[i]);
    ss_res += e * e;
  }
  out.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return out;
}

FitResult fit_rows(const std::vector<ResultRow>& rows, const std::string& axis,
                   const std::string& method, const std::string& metric) {
  if (axis != "n" && axis != "H")
    throw std::invalid_argument("fit axis must be 'n' or 'H'");
  std::vector<const ResultRow*> matched;
  bool any_tagged = false;
  const std::string tag = ":" + axis;
  for (const ResultRow& r : rows) {
    if (r.method != method || r.metric != metric) continue;
    matched.push_back(&r);
    if (r.experiment.size() >= tag.size() &&
        r.experiment.compare(r.experiment.size() - tag.size(), tag.size(),
                             tag) == 0)
      any_tagged = true;
  }
  std::vector<double> xs, ys;
  for (const ResultRow* r : matched) {
    if (any_tagged) {
      const bool tagged =
          r->experiment.size() >= tag.size() &&
          r->experiment.compare(r->experiment.size() - tag.size(), tag.size(),
                                tag) == 0;
      if (!tagged) continue;
    }
    xs.push_back(axis == "n" ? static_cast<double>(r->n)
                             : static_cast<double>(r->H));
    ys.push_back(r->value);
  }
  return fit_loglog(xs, ys);
}

std::vector<std::string> fixture_names() {
  return {"ring", "fastmix", "det", "random"};
}

BenchFixture make_fixture(const std::string& name,
                          const ExperimentConfig& config, int h_override) {
  const int H = h_override > 0 ? h_override : config.H;
  BenchFixture f;
  f.name = name;
  if (name == "ring") {
    RingFixture r = ring_mdp(config.S, config.eta, H);
    f.mdp = std::move(r.mdp);
    f.behavior = std::move(r.behavior);
    f.target = std::move(r.target);
    f.manifest["a_eta"] = r.a_eta;
    f.manifest["cumulative_ratio_var"] = std::pow(r.a_eta, H) - 1.0;
  } else {
    if (name == "fastmix") {
      f.mdp = fastmix_mdp(config.fixture_seed, config.S, config.A, H);
    } else if (name == "det") {
      f.mdp = random_mdp(config.fixture_seed, config.S, config.A, H, 0.0);
    } else if (name == "random") {
      f.mdp = random_mdp(config.fixture_seed, config.S, config.A, H,
                         config.stochasticity);
    } else {
      throw std::invalid_argument("unknown fixture: " + name);
    }
    f.behavior = Policy::uniform(config.S, config.A, H);
    f.target = soften(optimal_policy(f.mdp).first, 0.3);
  }
  const auto opt = optimal_policy(f.mdp);
  f.manifest["v_star"] = opt.second.v;
  f.manifest["v_target"] = policy_value(f.mdp, f.target).v;
  f.manifest["v_behavior"] = policy_value(f.mdp, f.behavior).v;
  if (name == "fastmix") {
    double range_max = 0.0;
    for (int h = 0; h < H; ++h) {
      double lo = 1e300, hi = -1e300;
      for (int s = 0; s < f.mdp.S; ++s) {
        const double v = opt.second.V[static_cast<std::size_t>(h) * f.mdp.S + s];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      range_max = std::max(range_max, hi - lo);
    }
    f.manifest["value_range_max"] = range_max;
  }
  return f;
}

namespace {

void mse_rows(std::vector<ResultRow>& rows, const std::string& experiment,
              const BenchFixture& fix, const std::string& method_name,
              std::int64_t n, int reps, std::uint64_t sd) {
  const OpeMethod method = parse_ope_method(method_name);
  const MseSummary ms =
      mse_harness(fix.mdp, fix.target, fix.behavior, method,
                  static_cast<int>(n), reps, sd);
  rows.push_back({experiment, method_name, n, fix.mdp.H, "mse", ms.mse, ms.se,
                  sd});
  rows.push_back({experiment, method_name, n, fix.mdp.H, "rel_rmse",
                  ms.rel_rmse, 0.0, sd});
  if (ms.error_count > 0)
    rows.push_back({experiment, method_name, n, fix.mdp.H, "error_count",
                    static_cast<double>(ms.error_count), 0.0, sd});
}

std::vector<ResultRow> run_ope_scaling(const ExperimentConfig& c) {
  std::vector<ResultRow> rows;
  std::uint64_t idx = 0;
  const BenchFixture fixed_h = make_fixture(c.fixture, c);
  for (const std::string& m : c.methods)
    for (std::int64_t n : c.n_grid)
      mse_rows(rows, c.kind + ":n", fixed_h, m, n, c.reps,
               point_seed(c.seed, idx++));
  for (int h : c.h_grid) {
    const BenchFixture fix = make_fixture(c.fixture, c, h);
    for (const std::string& m : c.methods)
      mse_rows(rows, c.kind + ":H", fix, m, c.n_grid.front(), c.reps,
               point_seed(c.seed, idx++));
  }
  return rows;
}

std::vector<ResultRow> run_ope_efficiency(const ExperimentConfig& c) {
  std::vector<ResultRow> rows;
  const BenchFixture fix = make_fixture(c.fixture, c);
  const double cr = cr_lower_bound(fix.mdp, fix.target, fix.behavior);
  std::uint64_t idx = 0;
  for (const std::string& m : c.methods)
    for (std::int64_t n : c.n_grid) {
      const std::uint64_t sd = point_seed(c.seed, idx++);
      const MseSummary ms =
          mse_harness(fix.mdp, fix.target, fix.behavior, parse_ope_method(m),
                      static_cast<int>(n), c.reps, sd);
      const double nd = static_cast<double>(n);
      rows.push_back({c.kind + ":n", m, n, fix.mdp.H, "n_mse", nd * ms.mse,
                      nd * ms.se, sd});
      rows.push_back({c.kind + ":n", m, n, fix.mdp.H, "cr_bound", cr, 0.0,
                      sd});
      if (cr > 0.0)
        rows.push_back({c.kind + ":n", m, n, fix.mdp.H, "efficiency_ratio",
                        nd * ms.mse / cr, nd * ms.se / cr, sd});
    }
  return rows;
}

std::vector<ResultRow> run_curse_of_horizon(const ExperimentConfig& c) {
  std::vector<ResultRow> rows;
  const std::int64_t n = c.n_grid.front();
  std::uint64_t idx = 0;
  for (int h : c.h_grid) {
    const BenchFixture fix = make_fixture("ring", c, h);
    const std::uint64_t sd = point_seed(c.seed, idx++);
    std::vector<double> rho(static_cast<std::size_t>(n));
    std::vector<Transition> buf;
    Environment env(fix.mdp, sd);
    for (std::int64_t i = 0; i < n; ++i) {
      env.episode(fix.behavior, buf);
      double ratio = 1.0;
      for (std::size_t h = 0; h < buf.size(); ++h) {
        const Transition& t = buf[h];
        const int hh = static_cast<int>(h);
        ratio *= fix.target.prob(hh, t.s, t.a) /
                 fix.behavior.prob(hh, t.s, t.a);
      }
      rho[static_cast<std::size_t>(i)] = ratio;
    }
    const double mean = pairwise_mean(rho);
    std::vector<double> dev2(rho.size()), dev4(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) {
      const double d = rho[i] - mean;
      dev2[i] = d * d;
      dev4[i] = d * d * d * d;
    }
    const double var =
        pairwise_sum(dev2) / static_cast<double>(rho.size() - 1);
    const double m4 = pairwise_mean(dev4);
    const double se =
        std::sqrt(std::max(0.0, m4 - var * var) /
                  static_cast<double>(rho.size()));
    rows.push_back({c.kind + ":H", "is-ratio", n, h, "var_ratio", var, se,
                    sd});
    rows.push_back({c.kind + ":H", "is-ratio", n, h, "var_ratio_oracle",
                    fix.manifest.at("cumulative_ratio_var"), 0.0, sd});
  }
  return rows;
}

std::vector<ResultRow> run_opl_pessimism(const ExperimentConfig& c) {
  std::vector<ResultRow> rows;
  const BenchFixture fix = make_fixture(c.fixture, c);
  const int S = fix.mdp.S;
  std::uint64_t idx = 0;
  for (const std::string& m : c.methods) {
    BonusConfig bc;
    bool use_erm = false;
    if (m == "bernstein") {
      bc.kind = BonusKind::bernstein;
    } else if (m == "hoeffding") {
      bc.kind = BonusKind::hoeffding;
    } else if (m == "erm") {
      use_erm = true;
    } else {
      throw std::invalid_argument("unknown learning method: " + m);
    }
    for (std::int64_t n : c.n_grid) {
      const std::uint64_t sd = point_seed(c.seed, idx++);
      Welfordish sub;
      int pess_ok = 0, errors = 0;
      for (int rep = 0; rep < c.reps; ++rep) {
        const std::uint64_t rep_seed =
            Rng::substream(sd, static_cast<std::uint64_t>(rep)).next_u64();
        try {
          const Dataset ds = sample_trajectories(
              fix.mdp, fix.behavior, static_cast<int>(n), rep_seed);
          const LearnedPolicyReport rep_out =
              use_erm ? erm_policy(ds) : pvi(ds, bc);
          sub.push(suboptimality(fix.mdp, rep_out));
          const ValueTables vt = policy_value(fix.mdp, rep_out.policy);
          bool ok = true;
          for (int s = 0; s < S; ++s)
            if (rep_out.value(S, 0, s) > vt.V[s] + 1e-9) ok = false;
          if (ok) ++pess_ok;
        } catch (const std::exception&) {
          ++errors;
        }
      }
      const double k = static_cast<double>(sub.count());
      rows.push_back({c.kind + ":n", m, n, fix.mdp.H, "subopt_mean",
                      sub.mean(), sub.se_of_mean(), sd});
      rows.push_back({c.kind + ":n", m, n, fix.mdp.H, "subopt_median",
                      sub.median(), 0.0, sd});
      if (k > 0.0) {
        const double p = pess_ok / k;
        rows.push_back({c.kind + ":n", m, n, fix.mdp.H, "pess_freq", p,
                        std::sqrt(p * (1.0 - p) / k), sd});
      }
      if (errors > 0)
        rows.push_back({c.kind + ":n", m, n, fix.mdp.H, "error_count",
                        static_cast<double>(errors), 0.0, sd});
    }
  }
  return rows;
}

std::vector<ResultRow> run_opl_linear(const ExperimentConfig& c) {
  std::vector<ResultRow> rows;
  const int d = 4;
  std::uint64_t idx = 0;
  for (int h : c.h_grid) {
    const LinearMdpFixture fix =
        linear_mdp_fixture(c.fixture_seed, c.S, c.A, d, h);
    for (const std::string& m : c.methods) {
      if (m != "pfvi" && m != "vw-pfvi")
        throw std::invalid_argument("unknown learning method: " + m);
      for (std::int64_t n : c.n_grid) {
        const std::uint64_t sd = point_seed(c.seed, idx++);
        Welfordish sub;
        int errors = 0;
        for (int rep = 0; rep < c.reps; ++rep) {
          const std::uint64_t rep_seed =
              Rng::substream(sd, static_cast<std::uint64_t>(rep)).next_u64();
          try {
            const Dataset ds = sample_trajectories(
                fix.mdp, fix.behavior, static_cast<int>(n), rep_seed);
            const LearnedPolicyReport rep_out =
                m == "pfvi" ? pfvi(ds, fix.features, 1.0)
                            : vw_pfvi(ds, fix.features, 1.0);
            sub.push(suboptimality(fix.mdp, rep_out));
          } catch (const std::exception&) {
            ++errors;
          }
        }
        rows.push_back({c.kind + ":H", m, n, h, "subopt_mean", sub.mean(),
                        sub.se_of_mean(), sd});
        rows.push_back({c.kind + ":H", m, n, h, "subopt_median", sub.median(),
                        0.0, sd});
        if (errors > 0)
          rows.push_back({c.kind + ":H", m, n, h, "error_count",
                          static_cast<double>(errors), 0.0, sd});
      }
    }
  }
  return rows;
}

std::vector<ResultRow> run_low_adaptive(const ExperimentConfig& c) {
  std::vector<ResultRow> rows;
  const BenchFixture fix = make_fixture(c.fixture, c);
  const int H = fix.mdp.H;
  std::uint64_t idx = 0;
  const bool want_apeve = std::find(c.methods.begin(), c.methods.end(),
                                    "apeve") != c.methods.end();
  const bool want_larfe = std::find(c.methods.begin(), c.methods.end(),
                                    "larfe") != c.methods.end();
  if (want_apeve)
    for (int T : c.t_grid) {
      const std::uint64_t sd = point_seed(c.seed, idx++);
      Welfordish regret;
      int survived = 0, sound = 0, max_sw = 0, max_b = 0, errors = 0;
      for (int rep = 0; rep < c.reps; ++rep) {
        const std::uint64_t rep_seed =
            Rng::substream(sd, static_cast<std::uint64_t>(rep)).next_u64();
        try {
          const RegretSummary rs = apeve_regret(fix.mdp, T, rep_seed);
          regret.push(rs.total_regret);
          if (rs.best_value_survived) ++survived;
          if (rs.elimination_sound) ++sound;
          max_sw = std::max(max_sw, rs.switches);
          max_b = std::max(max_b, rs.batches);
        } catch (const std::exception&) {
          ++errors;
        }
      }
      const double k = static_cast<double>(regret.count());
      rows.push_back({c.kind + ":n", "apeve", T, H, "regret_mean",
                      regret.mean(), regret.se_of_mean(), sd});
      rows.push_back({c.kind + ":n", "apeve", T, H, "switches_max",
                      static_cast<double>(max_sw), 0.0, sd});
      rows.push_back({c.kind + ":n", "apeve", T, H, "batches_max",
                      static_cast<double>(max_b), 0.0, sd});
      const double bound =
          std::ceil(std::log2(std::log2(static_cast<double>(T)))) + 2.0;
      rows.push_back({c.kind + ":n", "apeve", T, H, "batch_bound", bound, 0.0,
                      sd});
      if (k > 0.0) {
        rows.push_back({c.kind + ":n", "apeve", T, H, "survival_freq",
                        survived / k, 0.0, sd});
        rows.push_back({c.kind + ":n", "apeve", T, H, "soundness_freq",
                        sound / k, 0.0, sd});
      }
      if (errors > 0)
        rows.push_back({c.kind + ":n", "apeve", T, H, "error_count",
                        static_cast<double>(errors), 0.0, sd});
    }
  if (want_larfe) {
    const std::uint64_t sd = point_seed(c.seed, 0xdeadull);
    Environment env(fix.mdp, sd);
    LarfeResult lr = larfe(env, c.epsilon);
    const double cert = larfe_certificate(fix.mdp, lr.model, 5, sd);
    const std::int64_t eps_n = env.episodes_run();
    rows.push_back({c.kind, "larfe", eps_n, H, "batches",
                    static_cast<double>(lr.ledger.batch_count()), 0.0, sd});
    rows.push_back({c.kind, "larfe", eps_n, H, "batch_bound",
                    static_cast<double>(2 * H), 0.0, sd});
    rows.push_back({c.kind, "larfe", eps_n, H, "cert_gap", cert, 0.0, sd});
    rows.push_back({c.kind, "larfe", eps_n, H, "epsilon", c.epsilon, 0.0, sd});
  }
  return rows;
}

}  // namespace

std::vector<ResultRow> run(const ExperimentConfig& config) {
  validate_config(config);
  if (config.kind == "ope-scaling") return run_ope_scaling(config);
  if (config.kind == "ope-efficiency") return run_ope_efficiency(config);
  if (config.kind == "curse-of-horizon") return run_curse_of_horizon(config);
  if (config.kind == "opl-pessimism") return run_opl_pessimism(config);
  if (config.kind == "opl-linear") return run_opl_linear(config);
  if (config.kind == "low-adaptive") return run_low_adaptive(config);
  throw std::invalid_argument("unknown experiment kind: " + config.kind);
}

}  // namespace orl
