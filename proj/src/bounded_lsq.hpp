#pragma once

#include <Eigen/Dense>

#include <vector>

namespace waylab::detail {

struct BoundedLsqResult {
  Eigen::VectorXd z;
  double objective = 0.0;  // ||A z - b||^2
  int iterations = 0;
  bool converged = false;
};

enum class LsqSubsolver { kNormalEquations, kOrthogonal };

// min ||A z - b||^2 subject to z_i >= 0 for every i with nonneg[i], by a
// primal active-set method started from `start` (projected onto the bounds).
// kOrthogonal factors the free columns of A directly; use it when rows carry
// very different weights.
BoundedLsqResult solve_bounded_lsq(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                   const std::vector<bool>& nonneg, Eigen::VectorXd start,
                                   int max_iters,
                                   LsqSubsolver subsolver = LsqSubsolver::kNormalEquations);

}  // namespace waylab::detail
