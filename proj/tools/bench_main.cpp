#include <algorithm>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "orl/bench.hpp"
#include "orl/dataset.hpp"
#include "orl/errors.hpp"
#include "orl/mdp.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out;
  std::string kind;
  std::uint64_t seed = 0;
  int reps = 0;
  bool seed_set = false;
  bool reps_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path,
                  "JSON experiment config; fields override kind defaults");
  cmd->add_option("--out", opts.out, "result file path (default: stdout)");
  cmd->add_option("--seed", opts.seed, "master seed override")
      ->each([&opts](const std::string&) { opts.seed_set = true; });
  cmd->add_option("--reps", opts.reps, "replication count override")
      ->each([&opts](const std::string&) { opts.reps_set = true; });
}

orl::ExperimentConfig load_config(const CommonOpts& opts,
                                  const std::string& default_kind,
                                  const std::vector<std::string>& allowed) {
  orl::ExperimentConfig cfg;
  if (!opts.config_path.empty()) {
    std::ifstream is(opts.config_path);
    if (!is)
      throw std::invalid_argument("cannot open config file: " +
                                  opts.config_path);
    cfg = orl::parse_config(is);
  } else {
    cfg = orl::default_config(opts.kind.empty() ? default_kind : opts.kind);
  }
  if (!opts.kind.empty() && !opts.config_path.empty() && cfg.kind != opts.kind)
    throw std::invalid_argument("--kind conflicts with the config file kind");
  bool ok = false;
  for (const std::string& k : allowed) ok = ok || cfg.kind == k;
  if (!ok)
    throw std::invalid_argument("experiment kind '" + cfg.kind +
                                "' is not valid for this subcommand");
  if (opts.seed_set) cfg.seed = opts.seed;
  if (opts.reps_set) cfg.reps = opts.reps;
  if (!opts.out.empty()) cfg.out = opts.out;
  return cfg;
}

int emit(const orl::ExperimentConfig& cfg,
         const std::vector<orl::ResultRow>& rows) {
  if (cfg.out.empty()) {
    orl::write_manifest(std::cout, cfg);
    orl::write_rows(std::cout, rows);
  } else {
    std::ofstream os(cfg.out);
    if (!os) {
      std::cerr << "error: cannot open output file: " << cfg.out << "\n";
      return 3;
    }
    orl::write_manifest(os, cfg);
    orl::write_rows(os, rows);
    std::cout << "wrote " << rows.size() << " rows to " << cfg.out << "\n";
  }
  return 0;
}

int run_experiment(const CommonOpts& opts, const std::string& default_kind,
                   const std::vector<std::string>& allowed) {
  const orl::ExperimentConfig cfg = load_config(opts, default_kind, allowed);
  orl::validate_config(cfg);
  const std::vector<orl::ResultRow> rows = orl::run(cfg);
  return emit(cfg, rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"offline RL estimator and learner benchmark harness"};
  app.require_subcommand(1);

  CommonOpts ope_opts, opl_opts, la_opts;

  CLI::App* sim = app.add_subcommand(
      "simulate", "sample trajectories from a named fixture");
  std::string sim_fixture = "random", sim_out;
  std::uint64_t sim_seed = 1, sim_fixture_seed = 7;
  int sim_n = 1000, sim_s = 4, sim_a = 3, sim_h = 8;
  double sim_eta = 1.0 / 3.0, sim_stoch = 1.0;
  sim->add_option("--fixture", sim_fixture, "ring | fastmix | det | random");
  sim->add_option("--n", sim_n, "trajectory count")->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_seed, "sampling seed");
  sim->add_option("--fixture-seed", sim_fixture_seed, "fixture seed");
  sim->add_option("--S", sim_s, "state count");
  sim->add_option("--A", sim_a, "action count");
  sim->add_option("--H", sim_h, "horizon");
  sim->add_option("--eta", sim_eta, "ring action weight");
  sim->add_option("--stochasticity", sim_stoch, "random fixture mix in [0,1]");
  sim->add_option("--out", sim_out, "dataset file path")->required();

  CLI::App* ope = app.add_subcommand("ope", "off-policy evaluation studies");
  add_common(ope, ope_opts);
  ope->add_option("--kind", ope_opts.kind,
                  "ope-scaling | ope-efficiency | curse-of-horizon");

  CLI::App* opl = app.add_subcommand("opl", "offline policy learning studies");
  add_common(opl, opl_opts);
  opl->add_option("--kind", opl_opts.kind, "opl-pessimism | opl-linear");

  CLI::App* la = app.add_subcommand("low-adaptive",
                                    "batched exploration studies");
  add_common(la, la_opts);

  CLI::App* fx = app.add_subcommand("fixtures",
                                    "list or emit named fixture files");
  bool fx_list = false;
  std::string fx_name, fx_out;
  std::uint64_t fx_seed = 7;
  int fx_s = 4, fx_a = 3, fx_h = 8;
  double fx_eta = 1.0 / 3.0, fx_stoch = 1.0;
  fx->add_flag("--list", fx_list, "print fixture names");
  fx->add_option("--name", fx_name, "fixture to emit");
  fx->add_option("--fixture-seed", fx_seed, "fixture seed");
  fx->add_option("--S", fx_s, "state count");
  fx->add_option("--A", fx_a, "action count");
  fx->add_option("--H", fx_h, "horizon");
  fx->add_option("--eta", fx_eta, "ring action weight");
  fx->add_option("--stochasticity", fx_stoch, "random fixture mix in [0,1]");
  fx->add_option("--out", fx_out, "MDP file path");

  CLI::App* fit = app.add_subcommand("fit", "log-log slope fit on result rows");
  std::string fit_in, fit_x = "n", fit_metric = "mse", fit_method;
  fit->add_option("--in", fit_in, "result rows file")->required();
  fit->add_option("--x", fit_x, "axis: n or H");
  fit->add_option("--metric", fit_metric, "metric name to fit");
  fit->add_option("--method", fit_method, "restrict to one method");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) {
      orl::ExperimentConfig cfg;
      cfg.fixture = sim_fixture;
      cfg.fixture_seed = sim_fixture_seed;
      cfg.S = sim_s;
      cfg.A = sim_a;
      cfg.H = sim_h;
      cfg.eta = sim_eta;
      cfg.stochasticity = sim_stoch;
      const orl::BenchFixture fix = orl::make_fixture(sim_fixture, cfg);
      const orl::Dataset ds =
          orl::sample_trajectories(fix.mdp, fix.behavior, sim_n, sim_seed);
      std::ofstream os(sim_out);
      if (!os) {
        std::cerr << "error: cannot open output file: " << sim_out << "\n";
        return 3;
      }
      orl::write_dataset(os, ds);
      std::cout << "wrote " << ds.n << " trajectories (H=" << ds.H << ") to "
                << sim_out << "\n";
      return 0;
    }
    if (ope->parsed())
      return run_experiment(
          ope_opts, "ope-scaling",
          {"ope-scaling", "ope-efficiency", "curse-of-horizon"});
    if (opl->parsed())
      return run_experiment(opl_opts, "opl-pessimism",
                            {"opl-pessimism", "opl-linear"});
    if (la->parsed())
      return run_experiment(la_opts, "low-adaptive", {"low-adaptive"});
    if (fx->parsed()) {
      if (fx_list) {
        for (const std::string& name : orl::fixture_names())
          std::cout << name << "\n";
        return 0;
      }
      if (fx_name.empty())
        throw std::invalid_argument("fixtures needs --list or --name");
      orl::ExperimentConfig cfg;
      cfg.fixture = fx_name;
      cfg.fixture_seed = fx_seed;
      cfg.S = fx_s;
      cfg.A = fx_a;
      cfg.H = fx_h;
      cfg.eta = fx_eta;
      cfg.stochasticity = fx_stoch;
      const orl::BenchFixture fix = orl::make_fixture(fx_name, cfg);
      for (const auto& [key, val] : fix.manifest) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", val);
        std::cout << "# " << fix.name << " " << key << " " << buf << "\n";
      }
      if (!fx_out.empty()) {
        std::ofstream os(fx_out);
        if (!os) {
          std::cerr << "error: cannot open output file: " << fx_out << "\n";
          return 3;
        }
        orl::write_mdp(os, fix.mdp);
        std::cout << "wrote fixture MDP to " << fx_out << "\n";
      }
      return 0;
    }
    if (fit->parsed()) {
      std::ifstream is(fit_in);
      if (!is)
        throw std::invalid_argument("cannot open rows file: " + fit_in);
      const std::vector<orl::ResultRow> rows = orl::read_rows(is);
      std::vector<std::string> methods;
      if (!fit_method.empty()) {
        methods.push_back(fit_method);
      } else {
        for (const orl::ResultRow& r : rows)
          if (r.metric == fit_metric &&
              std::find(methods.begin(), methods.end(), r.method) ==
                  methods.end())
            methods.push_back(r.method);
      }
      if (methods.empty())
        throw std::invalid_argument("no rows match metric '" + fit_metric +
                                    "'");
      for (const std::string& m : methods) {
        const orl::FitResult f = orl::fit_rows(rows, fit_x, m, fit_metric);
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "fit method=%s metric=%s x=%s slope=%.6g "
                      "intercept=%.6g r2=%.6g used=%d excluded=%d",
                      m.c_str(), fit_metric.c_str(), fit_x.c_str(), f.slope,
                      f.intercept, f.r2, f.used, f.excluded);
        std::cout << buf << "\n";
      }
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const orl::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
