#include <doctest.h>

#include <random>

#include "nogo_oracle.hpp"
#include "waylab/nogo.hpp"

using namespace waylab;

namespace {

// Minimal sums of squared residuals at n = 1..4, n = 64 from an external
// bounded least-squares solve (scipy bvls), frozen here.
constexpr double kFrozen[] = {0.0, 0.14457831325301204, 0.08917197452229303, 0.04266666666666665,
                              0.028081123244929798};
constexpr double kFrozen64 = 2.0886934934624653e-05;

ExactSchemeData uniform_xs(int n) {
  ExactSchemeData d = ExactSchemeData::zeros(n);
  for (int nu = 1; nu <= n; ++nu) {
    d.x[nu] = 1.0 / n;
    d.s[nu] = 1.0 / n;
  }
  return d;
}

}  // namespace

TEST_CASE("residual of all-zero data") {
  const ConstraintReport r = exact_constraint_residual(ExactSchemeData::zeros(3));
  CHECK(r.max_residual("unitarity.") == 0.0);
  CHECK(r.find("normalization.x")->residual == 1.0);
  CHECK(r.find("normalization.s")->residual == 1.0);
  CHECK(r.find("normalization.t")->residual == 1.0);
  CHECK(r.find("orthogonality.a")->residual == 0.0);
  CHECK(r.find("orthogonality.b")->residual == 0.0);
}

TEST_CASE("residual of uniform x = s with t = 0") {
  for (int n : {2, 5}) {
    const ConstraintReport r = exact_constraint_residual(uniform_xs(n));
    CHECK(r.find("normalization.t")->residual == doctest::Approx(1.0));
    CHECK(r.find("normalization.x")->residual == doctest::Approx(0.0));
    for (int nu = 1; nu <= n; ++nu)
      CHECK(r.find("unitarity.first[" + std::to_string(nu) + "]")->residual == doctest::Approx(0.5 / n));
  }
}

TEST_CASE("residual rejects negative norms and wrong windows") {
  ExactSchemeData d = ExactSchemeData::zeros(2);
  d.t[3] = -0.1;
  CHECK_THROWS_AS(exact_constraint_residual(d), DomainError);
  ExactSchemeData w = ExactSchemeData::zeros(2);
  w.t = Sequence::zeros(1, 3);
  CHECK_THROWS_AS(exact_constraint_residual(w), StructuralError);
  CHECK_THROWS_AS(infeasibility_certificate(0), DomainError);
}

TEST_CASE("unitarity rows vanish on data from a genuine isometry") {
  // psi_0 xi_nu -> psi_0 sigma_nu / sqrt2 with sigma = sqrt2 xi (and the same
  // for psi_1) is isometric and conserves charge; it measures nothing.
  std::mt19937_64 rng(9);
  for (int n : {1, 3, 8}) {
    ExactSchemeData d = ExactSchemeData::zeros(n);
    double total = 0.0;
    for (int nu = 1; nu <= n; ++nu) total += (d.x[nu] = std::uniform_real_distribution<double>(0.1, 1.0)(rng));
    for (int nu = 1; nu <= n; ++nu) {
      d.x[nu] /= total;
      d.s[nu] = 2.0 * d.x[nu];
    }
    const ConstraintReport r = exact_constraint_residual(d);
    CHECK(r.max_residual("unitarity.") < 1e-15);
    CHECK(r.find("normalization.s")->residual == doctest::Approx(1.0));
  }
}

TEST_CASE("minimal violation matches frozen values and the independent oracle") {
  for (int n = 1; n <= 4; ++n) {
    CAPTURE(n);
    const InfeasibilityCertificate c = infeasibility_certificate(n);
    const double ref = oracle::nogo_minimum(n).value;
    CHECK(c.min_violation > 0.0);
    CHECK(c.min_violation == doctest::Approx(kFrozen[n]).epsilon(1e-9));
    CHECK(ref == doctest::Approx(kFrozen[n]).epsilon(1e-9));
    CHECK(std::abs(c.min_violation - ref) / ref < 1e-4);
    CHECK(exact_constraint_residual(c.minimizer).sum_of_squares() == doctest::Approx(c.min_violation).epsilon(1e-9));
  }
  CHECK(infeasibility_certificate(64).min_violation == doctest::Approx(kFrozen64).epsilon(1e-8));
}

TEST_CASE("minimizer structure: a = b = 0, pinned t constant per parity") {
  for (int n : {1, 2, 3, 6, 11}) {
    CAPTURE(n);
    const InfeasibilityCertificate c = infeasibility_certificate(n);
    CHECK(c.minimizer.a.values.cwiseAbs().maxCoeff() < 1e-8);
    CHECK(c.minimizer.b.values.cwiseAbs().maxCoeff() < 1e-8);
    const ConstraintReport pinned = exact_constraint_residual(c.pinned_minimizer);
    CHECK(pinned.max_residual("unitarity.") < 1e-8);
    CHECK(parity_constant(c.pinned_minimizer.t, 1e-6));
  }
}

TEST_CASE("min_violation decreases with n") {
  double prev = infeasibility_certificate(1).min_violation;
  for (int n = 2; n <= 16; ++n) {
    const double v = infeasibility_certificate(n).min_violation;
    CHECK(v > 0.0);
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("witness lists the four steps of the argument") {
  for (int n : {1, 4, 9}) {
    const InfeasibilityCertificate c = infeasibility_certificate(n);
    REQUIRE(c.witness.size() == 5);
    CHECK(c.witness[1].rfind("(i) forced a = b = 0", 0) == 0);
    CHECK(c.witness[2].rfind("(ii) parity constancy", 0) == 0);
    CHECK(c.witness[3].rfind("(iii) boundary zeros", 0) == 0);
    CHECK(c.witness[4].rfind("(iv) conflict", 0) == 0);
    CHECK(c.witness[4].find("verified exactly") != std::string::npos);
  }
}

TEST_CASE("deterministic for a fixed seed") {
  const InfeasibilityCertificate a = infeasibility_certificate(5);
  const InfeasibilityCertificate b = infeasibility_certificate(5);
  CHECK(a.min_violation == b.min_violation);
  CHECK(a.minimizer.t.values == b.minimizer.t.values);
}

TEST_CASE("rotated basis") {
  const double h = 1.0 / std::sqrt(2.0);
  CHECK(rotated_basis_residual(2, ObjectState{1, 0}).min_violation < 1e-20);
  const double balanced = infeasibility_certificate(2).min_violation;
  CHECK(rotated_basis_residual(2, ObjectState{h, h}).min_violation == doctest::Approx(balanced).epsilon(1e-12));
  CHECK(rotated_basis_residual(2, ObjectState{Complex(h), Complex(0, h)}).min_violation ==
        doctest::Approx(balanced).epsilon(1e-12));
  // phase covariance: only |alpha|^2 - |beta|^2 and |alpha beta| enter
  const double real_rot = rotated_basis_residual(3, ObjectState{0.6, 0.8}).min_violation;
  CHECK(real_rot > 0.0);
  CHECK(rotated_basis_residual(3, ObjectState{Complex(0, 0.6), std::polar(0.8, 2.1)}).min_violation ==
        doctest::Approx(real_rot).epsilon(1e-10));
  for (int n : {1, 4, 10}) CHECK(rotated_basis_residual(n, ObjectState{0.28, 0.96}).min_violation > 0.0);
  const InfeasibilityCertificate c = rotated_basis_residual(2, ObjectState{0.6, 0.8});
  REQUIRE(c.witness.size() == 2);
  CHECK(c.witness[1].find("no exact scheme exists") != std::string::npos);
  CHECK_THROWS_AS(rotated_basis_residual(2, ObjectState{1, 1}), DomainError);
}

TEST_CASE("parity_constant") {
  Sequence t = Sequence::zeros(0, 5);
  CHECK(parity_constant(t, 1e-12));
  for (int nu = 0; nu <= 5; ++nu) t[nu] = nu % 2 ? 0.3 : 0.1;
  CHECK(parity_constant(t, 1e-12));
  t[4] = 0.2;
  CHECK_FALSE(parity_constant(t, 1e-3));
}
