#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "orl/mdp.hpp"

namespace orl {

/**
 * One experiment run: a fixture, a grid over sample sizes and/or horizons
 * (or interaction budgets for the online kind), a method list, and the
 * replication/seed bookkeeping.  `parse_config` fills unset fields from the
 * kind's defaults.
 */
struct ExperimentConfig {
  std::string kind = "ope-scaling";
  std::string fixture;
  std::uint64_t fixture_seed = 7;
  int S = 4;
  int A = 3;
  int H = 8;
  double eta = 1.0 / 3.0;
  double stochasticity = 1.0;
  double epsilon = 0.5;
  std::vector<std::int64_t> n_grid;
  std::vector<int> h_grid;
  std::vector<int> t_grid;
  std::vector<std::string> methods;
  int reps = 0;
  std::uint64_t seed = 1;
  std::string out;
};

/// Baseline config for one of the six experiment kinds.
ExperimentConfig default_config(const std::string& kind);

/// JSON object with the ExperimentConfig field names as keys; unknown keys
/// are rejected.  Fields left out fall back to the kind's defaults.
ExperimentConfig parse_config(std::istream& is);

/// Throws std::invalid_argument with a field-naming message on bad configs
/// (empty grids, reps < 2, unknown kind/method/fixture).
void validate_config(const ExperimentConfig& config);

std::uint64_t config_hash(const ExperimentConfig& config);

struct ResultRow {
  std::string experiment;
  std::string method;
  std::int64_t n = 0;
  int H = 0;
  std::string metric;
  double value = 0.0;
  double se = 0.0;
  std::uint64_t seed = 0;
};

/// `#`-prefixed header: config hash, fixture parameters, every frozen
/// algorithm constant, and the floating-point contract.
void write_manifest(std::ostream& os, const ExperimentConfig& config);

/// Space-delimited rows `experiment method n H metric value se seed`, values
/// with 17 significant digits.
void write_rows(std::ostream& os, const std::vector<ResultRow>& rows);

/// Reads rows back, skipping `#` lines; throws ParseError on bad lines.
std::vector<ResultRow> read_rows(std::istream& is);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int used = 0;
  int excluded = 0;  // points dropped for nonpositive coordinates
};

/// Least squares of log y on log x; nonpositive points are excluded and
/// counted.  Requires >= 3 usable points.
FitResult fit_loglog(std::span<const double> xs, std::span<const double> ys);

/// Fit over the rows matching (method, metric) with x drawn from the `n` or
/// `H` column per `axis`.
FitResult fit_rows(const std::vector<ResultRow>& rows, const std::string& axis,
                   const std::string& method, const std::string& metric);

struct BenchFixture {
  std::string name;
  TabularMDP mdp;
  Policy behavior;
  Policy target;
  std::map<std::string, double> manifest;  // fixture-derived diagnostics
};

/// Named fixtures: ring, fastmix, det, random.
std::vector<std::string> fixture_names();

/// Builds a named fixture at the config's parameters; `h_override` > 0
/// replaces the config horizon (used by horizon sweeps).
BenchFixture make_fixture(const std::string& name,
                          const ExperimentConfig& config, int h_override = -1);

/// Runs the configured experiment; estimator failures inside replications
/// are counted into `error_count` metric rows instead of aborting.
std::vector<ResultRow> run(const ExperimentConfig& config);

}  // namespace orl
