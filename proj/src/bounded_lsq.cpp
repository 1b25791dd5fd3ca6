#include "bounded_lsq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace waylab::detail {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

class FreeSetSolver {
 public:
  FreeSetSolver(const MatrixXd& A, const VectorXd& b, LsqSubsolver kind) : A_(A), b_(b), kind_(kind) {
    if (kind_ == LsqSubsolver::kNormalEquations) {
      H_ = A.transpose() * A;
      c_ = A.transpose() * b;
    }
  }

  // Least-squares minimizer over the free coordinates, zero elsewhere.
  VectorXd solve(const std::vector<Index>& free) const {
    VectorXd y = VectorXd::Zero(A_.cols());
    if (free.empty()) return y;
    const auto k = static_cast<Index>(free.size());
    VectorXd yf;
    if (kind_ == LsqSubsolver::kNormalEquations) {
      MatrixXd hf(k, k);
      VectorXd cf(k);
      for (Index i = 0; i < k; ++i) {
        cf(i) = c_(free[i]);
        for (Index j = 0; j < k; ++j) hf(i, j) = H_(free[i], free[j]);
      }
      yf = hf.ldlt().solve(cf);
    } else {
      MatrixXd af(A_.rows(), k);
      for (Index j = 0; j < k; ++j) af.col(j) = A_.col(free[j]);
      yf = af.completeOrthogonalDecomposition().solve(b_);
    }
    for (Index i = 0; i < k; ++i) y(free[i]) = yf(i);
    return y;
  }

 private:
  const MatrixXd& A_;
  const VectorXd& b_;
  LsqSubsolver kind_;
  MatrixXd H_;
  VectorXd c_;
};

}  // namespace

BoundedLsqResult solve_bounded_lsq(const MatrixXd& A, const VectorXd& b, const std::vector<bool>& nonneg,
                                   VectorXd start, int max_iters, LsqSubsolver subsolver) {
  const Index n = A.cols();
  VectorXd z = std::move(start);
  std::vector<char> active(static_cast<std::size_t>(n), 0);
  for (Index i = 0; i < n; ++i) {
    if (nonneg[static_cast<std::size_t>(i)] && z(i) <= 0.0) {
      z(i) = 0.0;
      active[static_cast<std::size_t>(i)] = 1;
    }
  }

  const FreeSetSolver solver(A, b, subsolver);
  const double grad_tol = 1e-12 * std::max(1.0, (A.transpose() * b).cwiseAbs().maxCoeff());

  BoundedLsqResult result;
  Index last_released = -1;
  for (int iter = 0; iter < max_iters; ++iter) {
    result.iterations = iter + 1;
    std::vector<Index> free;
    for (Index i = 0; i < n; ++i)
      if (!active[static_cast<std::size_t>(i)]) free.push_back(i);
    const VectorXd y = solver.solve(free);

    double alpha = 1.0;
    Index blocking = -1;
    for (Index i : free) {
      if (!nonneg[static_cast<std::size_t>(i)] || y(i) >= 0.0) continue;
      const double step = z(i) / (z(i) - y(i));
      if (step < alpha) {
        alpha = step;
        blocking = i;
      }
    }

    if (blocking < 0) {
      z = y;
      const VectorXd grad = A.transpose() * (A * z - b);
      Index release = -1;
      double most_negative = -grad_tol;
      for (Index i = 0; i < n; ++i) {
        if (active[static_cast<std::size_t>(i)] && grad(i) < most_negative) {
          most_negative = grad(i);
          release = i;
        }
      }
      if (release < 0) {
        result.converged = true;
        break;
      }
      active[static_cast<std::size_t>(release)] = 0;
      last_released = release;
      continue;
    }

    if (alpha <= 0.0 && blocking == last_released) {
      // The released coordinate cannot move: KKT holds to rounding.
      active[static_cast<std::size_t>(blocking)] = 1;
      result.converged = true;
      break;
    }
    z += alpha * (y - z);
    for (Index i : free) {
      if (!nonneg[static_cast<std::size_t>(i)]) continue;
      if (i == blocking || z(i) <= 0.0) {
        z(i) = 0.0;
        active[static_cast<std::size_t>(i)] = 1;
      }
    }
    last_released = -1;
  }
  for (Index i = 0; i < n; ++i)
    if (nonneg[static_cast<std::size_t>(i)] && z(i) < 0.0) z(i) = 0.0;  // rounding in the solve
  result.objective = (A * z - b).squaredNorm();
  result.z = std::move(z);
  return result;
}

}  // namespace waylab::detail
