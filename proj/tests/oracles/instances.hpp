#pragma once

// Random test instances built from first principles.

#include <random>

#include "waylab/born.hpp"
#include "waylab/generalized.hpp"
#include "waylab/graded.hpp"

namespace oracle {

using waylab::Complex;
using waylab::MatrixXc;
using waylab::VectorXc;

VectorXc random_vector(std::mt19937_64& rng, int dim);
// Haar-distributed unitary via QR with phase fix.
MatrixXc random_unitary(std::mt19937_64& rng, int dim);

// Block map with random domain columns per total charge and image = U * domain
// for a random unitary U, so every block is an isometry on its domain.
waylab::BlockMap random_isometry(std::mt19937_64& rng, int joint_dim, int lo, int hi);
// Random joint vector inside the declared domain of m.
waylab::GradedVector random_domain_vector(std::mt19937_64& rng, const waylab::BlockMap& m);

struct BranchPair {
  waylab::BranchSpec plus, minus;
  int pattern = 0;  // 1: object carries both charges, 2: apparatus does
};

// Outputs of a charge-conserving unitary acting on (psi_0 +- psi_1) xi with a
// sharp-charge apparatus, written in product form. Each factor carries an
// arbitrary rescaling compensated by the other factor.
BranchPair random_clean_branches(std::mt19937_64& rng, int pattern, int object_dim, int apparatus_dim);

// Random observable on C^dim: eigenspaces from a random unitary's columns,
// split into random family sizes.
waylab::Observable random_observable(std::mt19937_64& rng, int dim);

}  // namespace oracle
