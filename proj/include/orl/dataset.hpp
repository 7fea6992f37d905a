#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "orl/mdp.hpp"

namespace orl {

struct Transition {
  int s = 0;
  int a = 0;
  double r = 0.0;
  int s_next = 0;
};

/**
 * Fixed-horizon trajectory collection, stored trajectory-major: record
 * (i, h) sits at index i * H + h.  Provenance hashes are optional so that
 * ingested external data can omit them.
 */
struct Dataset {
  int n = 0;
  int H = 0;
  int S = 0;
  int A = 0;
  std::vector<Transition> records;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> policy_hash;
  std::optional<std::uint64_t> mdp_hash;

  const Transition& at(int i, int h) const {
    return records[static_cast<std::size_t>(i) * H + h];
  }

  /// Flat time-homogeneous view over all (i, h) records; no copy.
  std::span<const Transition> pooled() const { return records; }
};

struct CountTables {
  int S = 0;
  int A = 0;
  int H = 0;
  std::vector<std::int64_t> n_state;  // [H][S] visits of s at layer h
  std::vector<std::int64_t> n_sa;     // [H][S][A]
  std::vector<std::int64_t> n_sas;    // [H][S][A][S']
  std::vector<double> r_sum;          // [H][S][A]

  std::int64_t state(int h, int s) const {
    return n_state[static_cast<std::size_t>(h) * S + s];
  }
  std::int64_t sa(int h, int s, int a) const {
    return n_sa[(static_cast<std::size_t>(h) * S + s) * A + a];
  }
  std::int64_t sas(int h, int s, int a, int sp) const {
    return n_sas[((static_cast<std::size_t>(h) * S + s) * A + a) * S + sp];
  }
  double rewards(int h, int s, int a) const {
    return r_sum[(static_cast<std::size_t>(h) * S + s) * A + a];
  }
};

/// Roll out `n` independent trajectories of the behavior policy.  Trajectory
/// i draws from the substream (seed, i) only, so the result is bit-identical
/// regardless of evaluation order.
Dataset sample_trajectories(const TabularMDP& mdp, const Policy& behavior,
                            int n, std::uint64_t seed);

/// Per-layer visit, transition, and reward tallies.
CountTables counts(const Dataset& data);

/// Tallies pooled over layers (time-homogeneous view); result has H = 1.
CountTables pooled_counts(const Dataset& data);

/// Initial-state frequencies n_s / n at layer 1.
std::vector<double> empirical_initial(const Dataset& data);

/// Text round-trip: header `n H S A`, one `i h s a r s_next` line per record
/// sorted by (i, h), then meta lines seed / policy_hash / mdp_hash as 64-bit
/// hex or `-`.  Rewards are written with 17 significant digits so the
/// round-trip is bit-exact.
void write_dataset(std::ostream& os, const Dataset& data);
Dataset read_dataset(std::istream& is);

}  // namespace orl
