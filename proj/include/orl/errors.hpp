#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace orl {

/// Malformed input document; `line` is 1-based within the offending file.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Behavior policy assigns zero probability to an observed or required
/// (h, s, a) cell; `cells` lists the offending triples.
class SupportViolation : public std::runtime_error {
 public:
  explicit SupportViolation(std::vector<std::array<int, 3>> cells)
      : std::runtime_error(describe(cells)), cells_(std::move(cells)) {}
  const std::vector<std::array<int, 3>>& cells() const { return cells_; }

 private:
  static std::string describe(const std::vector<std::array<int, 3>>& cs) {
    std::string msg = "behavior support violation at " +
                      std::to_string(cs.size()) + " cell(s):";
    int shown = 0;
    for (const auto& c : cs) {
      if (shown++ == 8) {
        msg += " ...";
        break;
      }
      msg += " (h=" + std::to_string(c[0]) + ",s=" + std::to_string(c[1]) +
             ",a=" + std::to_string(c[2]) + ")";
    }
    return msg;
  }

  std::vector<std::array<int, 3>> cells_;
};

/// Regression design matrix is singular and no ridge term was requested.
class RankDeficiencyError : public std::runtime_error {
 public:
  RankDeficiencyError(int rank, int dim)
      : std::runtime_error("gram matrix is rank deficient: rank " +
                           std::to_string(rank) + " < dim " +
                           std::to_string(dim)),
        rank_(rank) {}
  int rank() const { return rank_; }

 private:
  int rank_;
};

/// Solve refused because the matrix condition number exceeds the cap.
class IllConditionedError : public std::runtime_error {
 public:
  explicit IllConditionedError(double condition)
      : std::runtime_error("matrix condition number " +
                           std::to_string(condition) + " exceeds 1e12"),
        condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

}  // namespace orl
