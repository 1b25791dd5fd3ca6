#pragma once

// Exact-measurement constraint system and its infeasibility.
//
// An exact measurement of the pair (psi_0 +- psi_1) with an apparatus whose
// state xi spreads over charge sectors 1..n is described, sector by sector,
// by the real data
//   x_nu = |xi_nu|^2, s_nu = |sigma_nu|^2, t_nu = |tau_nu|^2,
//   a_nu + i b_nu = (sigma_nu, tau_nu),
// where sigma, tau are the sector decompositions of (chi +- chi')/sqrt(2).
// Unitarity of the charge-conserving interaction and normalization of
// xi, chi, chi' give a linear system in this data that has no solution for
// any finite n. This module measures how far the system is from solvable
// and records the symbolic reason it is not.

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "waylab/graded.hpp"
#include "waylab/random.hpp"
#include "waylab/report.hpp"

namespace waylab {

/// Real sequence over the integer window [first, first + size).
struct Sequence {
  int first = 0;
  Eigen::VectorXd values;

  static Sequence zeros(int first, int last) {
    return {first, Eigen::VectorXd::Zero(last - first + 1)};
  }
  int last() const { return first + static_cast<int>(values.size()) - 1; }
  bool covers(int nu) const { return nu >= first && nu <= last(); }
  double at(int nu) const { return covers(nu) ? values(nu - first) : 0.0; }
  double& operator[](int nu) { return values(nu - first); }
  double sum() const { return values.sum(); }
};

/// x, s, a, b live on 1..n; t lives on 0..n+1 (tau_{nu-1} for nu = 1 and
/// tau_{n+1} reach one sector past the apparatus support on each side).
struct ExactSchemeData {
  int n = 1;
  Sequence x, s, t, a, b;

  static ExactSchemeData zeros(int n);
  // Throws StructuralError when a window does not match n.
  void check_windows() const;
};

/// Coefficients of the constraint system for the rotated pair
/// alpha psi_0 + beta psi_1, -conj(beta) psi_0 + conj(alpha) psi_1.
/// Only delta = |alpha|^2 - |beta|^2 and coupling = |alpha beta| enter.
struct RotationParameters {
  double delta = 0.0;
  double coupling = 0.5;

  static RotationParameters from_state(const ObjectState& obj);
  bool is_balanced(double tol = 1e-14) const;
};

/// Residual report for the balanced pair (psi_0 +- psi_1)/sqrt(2). Entry ids:
///   unitarity.first[nu]   x_nu - s_nu/2 - t_{nu-1}/2
///   unitarity.second[nu]  x_{nu-1} - t_nu/2 - s_{nu-1}/2
///   unitarity.cross_re[nu], unitarity.cross_im[nu]
///                         real and imaginary parts of
///                         a_nu - i b_nu + a_{nu-1} + i b_{nu-1}
///   normalization.x, .s, .t   |sum - 1|
///   orthogonality.a, .b       |sum|
/// Throws DomainError if x, s or t has a negative entry.
ConstraintReport exact_constraint_residual(const ExactSchemeData& data);

/// Same system with rotated-basis coefficients.
ConstraintReport exact_constraint_residual(const ExactSchemeData& data, const RotationParameters& rot);

struct NoGoOptions {
  int starts = 16;
  std::uint64_t seed = kDefaultSeed;
  int max_iters = 5000;
  // Weight on the unitarity rows for the pinned minimizer.
  double pin_weight = 1e6;
};

struct InfeasibilityCertificate {
  int n = 1;
  // min over nonnegative data of the sum of squared residuals.
  double min_violation = 0.0;
  ExactSchemeData minimizer;
  std::vector<std::string> witness;
  // Minimizer with the unitarity rows (nearly) enforced exactly.
  ExactSchemeData pinned_minimizer;
  double pinned_violation = 0.0;
  int best_start = 0;
};

/// Minimal violation of the exact-measurement system with support n.
/// Throws DomainError for n < 1 and ConvergenceErrorWith<ExactSchemeData>
/// if no start converges.
InfeasibilityCertificate infeasibility_certificate(int n, const NoGoOptions& opts = {});

/// Same analysis for an arbitrary normalized eigenbasis of the measured
/// observable; obj = (alpha, beta). Throws DomainError if obj is not
/// normalized.
InfeasibilityCertificate rotated_basis_residual(int n, const ObjectState& obj, const NoGoOptions& opts = {});

/// True when t restricted to even and to odd indices is constant within tol.
bool parity_constant(const Sequence& t, double tol);

}  // namespace waylab
