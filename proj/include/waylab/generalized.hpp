#pragma once

// Measurements whose final states are products of an object part and an
// apparatus part, with the apparatus starting in a state of sharp charge 0.
//
// For the pair of inputs (psi_0 +- psi_1) xi the two outputs are
//   P = (sum_mu psi'_mu)(sum_lambda chi'_lambda),
//   M = (sum_mu psi''_mu)(sum_lambda chi''_lambda).
// Conservation confines both to total charge 0 and 1, and unitarity fixes
//   (P + M) has no total-charge-1 part, (P - M) has no total-charge-0 part,
//   (P, M) = 0.

#include <string>
#include <utility>
#include <vector>

#include "waylab/graded.hpp"

namespace waylab {

/// One output branch: object factor (sectors = object charge mu) times
/// apparatus factor (sectors = apparatus charge lambda).
struct BranchSpec {
  GradedVector object_part{1};
  GradedVector apparatus_part{2};
};

struct SupportViolation {
  int nu = 0;  // total charge, outside {0, 1}
  int mu = 0;  // object charge; the apparatus carries nu - mu
  bool operator==(const SupportViolation&) const = default;
  auto operator<=>(const SupportViolation&) const = default;
};

enum class CaseKind { Case1, Case2, Infeasible };

std::string to_string(CaseKind k);
CaseKind case_kind_from_string(const std::string& s);

struct CaseVerdict {
  CaseKind kind = CaseKind::Infeasible;
  // Labels like "plus.psi[0]" or "minus.chi[1]" for every factor component
  // above the finite threshold.
  std::vector<std::string> finite_components;
  double cross_condition_residual = 0.0;
  std::vector<SupportViolation> violations;  // sorted, both branches merged
  std::string note;
};

struct ClassifyOptions {
  double finite_tol = 1e-9;  // component norm cutoff after normalizing each factor
  double cross_tol = 1e-9;
};

/// Every (nu, mu) with nu outside {0, 1} where both psi_mu and chi_{nu-mu}
/// are finite, for either branch.
std::vector<SupportViolation> support_check(const BranchSpec& plus_branch, const BranchSpec& minus_branch,
                                            double finite_tol = 1e-9);

/// Largest of |(P+M)_1| and |(P-M)_0| (relative to sqrt(|P||M|)) and
/// |(P,M)|/(|P||M|). A vanishing branch gives 1.
double cross_condition_residual(const BranchSpec& plus_branch, const BranchSpec& minus_branch);

/// Case1: object finite in two adjacent charges, apparatus in one (the
/// apparatus is left with sharp charge). Case2: object finite in one charge,
/// apparatus in two (the quantum is exchanged with the apparatus).
/// Infeasible when the support condition fails, the cross conditions fail,
/// or the two branches follow different patterns.
CaseVerdict classify(const BranchSpec& plus_branch, const BranchSpec& minus_branch,
                     const ClassifyOptions& opts = {});

struct ExchangeForm {
  GradedVector object;  // unit object factor psi'_0
  GradedVector chi0;    // apparatus part reached from psi_0
  GradedVector chi1;    // apparatus part reached from psi_1
  double reproduction_residual = 0.0;  // max branch mismatch of psi'_0 (chi0 +- chi1)
};

/// Writes both branches of a Case2 verdict as psi'_0 (chi0 + chi1) and
/// psi'_0 (chi0 - chi1). Throws DomainError unless verdict.kind == Case2.
ExchangeForm exchange_form(const CaseVerdict& verdict, const BranchSpec& plus_branch,
                           const BranchSpec& minus_branch);

}  // namespace waylab
