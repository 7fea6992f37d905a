#pragma once

#include <Eigen/Dense>

#include "orl/errors.hpp"

namespace orl {

struct SpdInfo {
  double condition = 0.0;
  int rank = 0;
  double eig_min = 0.0;
  double eig_max = 0.0;
};

/// Spectrum summary of a symmetric PSD matrix.
inline SpdInfo spd_info(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  SpdInfo out;
  const auto& ev = es.eigenvalues();
  out.eig_min = ev.minCoeff();
  out.eig_max = ev.maxCoeff();
  const double tol = 1e-14 * std::max(1.0, out.eig_max) * m.rows();
  out.rank = static_cast<int>((ev.array() > tol).count());
  out.condition = out.eig_min > 0.0
                      ? out.eig_max / out.eig_min
                      : std::numeric_limits<double>::infinity();
  return out;
}

/// Factor a symmetric positive-definite matrix for repeated solves; refuses
/// ill-conditioned systems when a condition cap is given (<= 0 disables).
class SpdSolver {
 public:
  explicit SpdSolver(const Eigen::MatrixXd& m, double condition_cap = 0.0)
      : info_(spd_info(m)) {
    if (info_.rank < m.rows()) throw RankDeficiencyError(info_.rank, m.rows());
    if (condition_cap > 0.0 && info_.condition > condition_cap)
      throw IllConditionedError(info_.condition);
    ldlt_.compute(m);
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    return ldlt_.solve(b);
  }
  const SpdInfo& info() const { return info_; }

 private:
  SpdInfo info_;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
};

}  // namespace orl
