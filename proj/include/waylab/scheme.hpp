#pragma once

// Approximate measurement with a third, "undetermined" outcome.
//
// The interaction is fixed on measurement inputs by
//   psi_0 xi -> psi_0 sigma + psi_1 rho
//   psi_1 xi -> psi_0 tau   + psi_1 sigma
// and charge conservation sends psi_0 xi_nu to sector nu and psi_1 xi_{nu-1}
// to sector nu as well. Pointer states follow from
//   chi = sigma + (rho + tau)/2,  chi' = sigma - (rho + tau)/2,
//   eta = (tau - rho)/2 = -eta',
// and the probability of the undetermined outcome is (eta, eta).

#include <map>
#include <optional>

#include "waylab/graded.hpp"
#include "waylab/rational.hpp"
#include "waylab/report.hpp"

namespace waylab {

/// Sector windows: xi and sigma on 1..n, tau on 2..n+1, rho on 0..n-1.
struct ApproxScheme {
  int n = 1;
  int d = 2;
  double c = 0.0;       // mean |sigma_nu|^2
  double cprime = 0.0;  // mean |rho_nu|^2
  GradedVector xi{2}, sigma{2}, tau{2}, rho{2};

  // Throws StructuralError on wrong dimensions or weight outside a window.
  void check_structure(double tol = 0.0) const;
};

struct CanonicalWeights {
  Rational c;
  Rational cprime;
};

/// Solves n(c + c') = 1 and 4nc = 4(n-1)c' exactly.
CanonicalWeights canonical_weights(int n);

/// The simple construction: sigma_nu = sqrt(c) e_0, every rho_nu and tau_nu
/// inside its window sqrt(c') e_1 (so rho = tau on the overlap), and
/// |xi_nu|^2 = c + c' along e_0. Throws DomainError for n < 1 and
/// StructuralError for d < 2.
ApproxScheme build_wigner_scheme(int n, int d = 2);

/// (eta, eta) = |tau - rho|^2 / 4.
double scheme_error(const ApproxScheme& s);

/// Interaction restricted to span{psi_0 xi_N, psi_1 xi_{N-1}} per total
/// sector N, as a block map on the joint space (joint dimension 2d).
BlockMap induced_block_map(const ApproxScheme& s);

/// Residuals of every orthogonality and normalization condition on the
/// scheme, plus the grading/isometry report of induced_block_map() under the
/// "map." prefix. Entry ids:
///   orthogonality[nu]        |(sigma_nu,tau_nu) + (rho_{nu-1},sigma_{nu-1})|
///   normalization.rho[nu]    ||xi_nu|^2 - |sigma_nu|^2 - |rho_{nu-1}|^2|
///   normalization.tau[nu]    ||xi_nu|^2 - |sigma_nu|^2 - |tau_{nu+1}|^2|
///   xi_norm                  |sum |xi_nu|^2 - 1|
///   pointer_orthogonality    |4 sum|sigma|^2 - sum|rho+tau|^2|      (chi, chi')
///   eta_orthogonality.sigma  |sum (sigma_nu, tau_nu - rho_nu)|
///   eta_orthogonality.sum    |sum (tau_nu + rho_nu, tau_nu - rho_nu)|
ConstraintReport validate_scheme(const ApproxScheme& s);

struct DerivedPointers {
  GradedVector chi{2}, chiprime{2}, eta{2};
};

DerivedPointers derived_pointers(const ApproxScheme& s);

/// Joint output amp0 (psi_0 sigma + psi_1 rho) + amp1 (psi_0 tau + psi_1 sigma).
/// Throws DomainError if obj is not normalized.
GradedVector apply_interaction(const ApproxScheme& s, const ObjectState& obj);

/// Full unitary per total sector extending the interaction (deterministic
/// orthonormal completion of each block of induced_block_map()).
std::map<int, MatrixXc> interaction_unitaries(const ApproxScheme& s);

}  // namespace waylab
