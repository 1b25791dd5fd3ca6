#pragma once

// Search for approximate schemes with a smaller undetermined probability than
// the canonical construction, over the same sector windows.

#include <cstdint>
#include <string>
#include <vector>

#include "waylab/random.hpp"
#include "waylab/scheme.hpp"

namespace waylab {

struct OptimizerOptions {
  int max_iters = 20000;         // L-BFGS iterations per penalty stage
  double tol_constraint = 1e-8;  // accepted max residual of validate_scheme
  double tol_objective = 1e-10;  // stop when a stage improves by less than this
  int starts = 8;                // start 0 is always the canonical scheme
  std::uint64_t seed = kDefaultSeed;

  void check() const;
};

struct OptimizationResult {
  ApproxScheme scheme;
  double error = 0.0;                // scheme_error(scheme)
  double constraint_residual = 0.0;  // validate_scheme(scheme).max_residual()
  int iters = 0;                     // iterations spent on the winning start
  int start = 0;
};

/// Minimizes (eta, eta) subject to every condition checked by
/// validate_scheme(). The canonical scheme competes as an untouched
/// candidate, so the result never exceeds 1/(2n-1). Throws DomainError for
/// n < 2, StructuralError for d < 2, and
/// ConvergenceErrorWith<ApproxScheme> if no candidate meets tol_constraint.
OptimizationResult optimize_scheme_detailed(int n, int d = 2, const OptimizerOptions& opts = {});

inline ApproxScheme optimize_scheme(int n, int d = 2, const OptimizerOptions& opts = {}) {
  return optimize_scheme_detailed(n, d, opts).scheme;
}

struct SweepRow {
  int n = 0;
  double error_wigner = 0.0;
  double error_optimized = 0.0;
  double constraint_residual = 0.0;
  int iters = 0;
  std::string annotation;  // non-empty when the row's optimization failed

  bool ok() const { return annotation.empty(); }
};

struct SweepTable {
  std::vector<SweepRow> rows;
};

/// One optimization per n, each seeded with derive_seed(opts.seed, n).
/// Failures are recorded in the row annotation (error_optimized is NaN).
/// Rows run concurrently on up to `threads` workers (0 = hardware).
SweepTable sweep(const std::vector<int>& n_values, int d = 2, const OptimizerOptions& opts = {},
                 unsigned threads = 0);

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares of log(error_optimized) on log(n). Throws
/// DomainError with fewer than 3 rows or any nonpositive error.
ScalingFit fit_scaling(const SweepTable& table);

}  // namespace waylab
