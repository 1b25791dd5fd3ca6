#pragma once

// Measurement postulate: outcome probabilities, post-measurement states and
// seeded sampling.

#include <cstdint>
#include <string>
#include <vector>

#include "waylab/graded.hpp"
#include "waylab/random.hpp"
#include "waylab/scheme.hpp"

namespace waylab {

/// Eigenvalue q_k with an orthonormal family of eigenvectors (the columns of
/// eigenspaces[k]) over a common finite-dimensional space.
struct Observable {
  std::vector<double> eigenvalues;
  std::vector<MatrixXc> eigenspaces;

  Eigen::Index dim() const { return eigenspaces.empty() ? 0 : eigenspaces.front().rows(); }
  // Throws StructuralError unless families are nonempty, equally sized and
  // mutually orthonormal within tol.
  void check(double tol = 1e-10) const;
};

struct Outcome {
  std::string label;
  double probability = 0.0;
  GradedVector post_state{1};  // normalized when probability > 0
};

struct OutcomeDistribution {
  std::vector<Outcome> outcomes;

  double total() const;
  const Outcome* find(const std::string& label) const;
};

inline constexpr const char* kOutsideSpanLabel = "outside-span";

/// Probability of q_k is w_k = sum_kappa |(psi_k,kappa, phi)|^2 and the state
/// afterwards is w_k^{-1/2} sum_kappa (psi_k,kappa, phi) psi_k,kappa. If the
/// eigenvectors miss more than span_tol of phi, an "outside-span" outcome
/// carries the remainder. Labels are "q=<eigenvalue>". Post states live in
/// sector 0. Throws DomainError if phi is not normalized.
OutcomeDistribution born_distribution(const Observable& obs, const VectorXc& phi, double span_tol = 1e-10);

/// Runs the scheme on obj and reads the pointer: "plus" for chi, "minus" for
/// chi', "undetermined" for the orthogonal remainder. Post states are joint
/// object+apparatus vectors. Throws DomainError if the scheme fails
/// validation at tol or obj is not normalized.
OutcomeDistribution three_outcome_stats(const ApproxScheme& s, const ObjectState& obj,
                                        double tol = kDefaultTolerance);

struct OutcomeCount {
  std::string label;
  std::uint64_t count = 0;
  double probability = 0.0;
};

/// Identifies the sampling algorithm: one std::mt19937_64 draw per shot,
/// top 53 bits as a uniform in [0,1), inverse CDF over outcomes in order.
inline constexpr const char* kSamplerVersion = "mt19937_64-invcdf-v1";

/// Multinomial sample of `shots` outcomes. Throws DomainError for shots < 1
/// or an empty distribution.
std::vector<OutcomeCount> sample_outcomes(const OutcomeDistribution& dist, std::uint64_t shots,
                                          std::uint64_t seed);

}  // namespace waylab
