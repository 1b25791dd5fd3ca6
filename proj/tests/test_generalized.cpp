#include <doctest.h>

#include <random>

#include "instances.hpp"
#include "waylab/generalized.hpp"

using namespace waylab;

namespace {

GradedVector one_sector(int d, int nu, const VectorXc& v) {
  GradedVector g(d);
  g.set(nu, v);
  return g;
}

VectorXc e(int d, int k, double scale = 1.0) {
  VectorXc v = VectorXc::Zero(d);
  v(k) = scale;
  return v;
}

}  // namespace

TEST_CASE("random clean branches classify as their pattern") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const int pattern = 1 + trial % 2;
    const oracle::BranchPair b = oracle::random_clean_branches(rng, pattern, 2 + trial % 3, 2 + trial % 2);
    const CaseVerdict v = classify(b.plus, b.minus);
    CAPTURE(trial);
    CHECK(v.kind == (pattern == 1 ? CaseKind::Case1 : CaseKind::Case2));
    CHECK(v.violations.empty());
    CHECK(v.cross_condition_residual < 1e-12);
    CHECK(v.finite_components.size() == 6);
    if (pattern == 2) {
      const ExchangeForm ex = exchange_form(v, b.plus, b.minus);
      CHECK(ex.reproduction_residual < 1e-12);
      CHECK(ex.object.norm() == doctest::Approx(1.0));
      CHECK(ex.object.support(1e-12) == std::pair{0, 0});
      CHECK(ex.chi0.support(1e-12) == std::pair{0, 0});
      CHECK(ex.chi1.support(1e-12) == std::pair{1, 1});
    } else {
      CHECK_THROWS_AS(exchange_form(v, b.plus, b.minus), DomainError);
    }
  }
}

TEST_CASE("support outside total charge 0 and 1 is reported") {
  const double h = 1.0 / std::sqrt(2.0);
  GradedVector obj(2);
  obj.set(0, e(2, 0, h));
  obj.set(1, e(2, 1, h));
  const BranchSpec plus{obj, one_sector(2, 2, e(2, 0))};
  const BranchSpec minus{obj, one_sector(2, 0, e(2, 0))};
  const std::vector<SupportViolation> v = support_check(plus, minus);
  CHECK(v == std::vector<SupportViolation>{{2, 0}, {3, 1}});
  const CaseVerdict verdict = classify(plus, minus);
  CHECK(verdict.kind == CaseKind::Infeasible);
  CHECK(verdict.violations == v);
}

TEST_CASE("identical branches fail the cross condition") {
  std::mt19937_64 rng(1);
  const oracle::BranchPair b = oracle::random_clean_branches(rng, 2, 2, 2);
  const CaseVerdict v = classify(b.plus, b.plus);
  CHECK(v.kind == CaseKind::Infeasible);
  CHECK(v.violations.empty());
  CHECK(v.cross_condition_residual == doctest::Approx(std::sqrt(2.0)));  // |(P+M)_1| = 2|P_1|
}

TEST_CASE("a vanishing branch gives residual 1") {
  std::mt19937_64 rng(2);
  const oracle::BranchPair b = oracle::random_clean_branches(rng, 1, 2, 2);
  const BranchSpec zero{GradedVector(2), b.minus.apparatus_part};
  CHECK(cross_condition_residual(b.plus, zero) == 1.0);
}

TEST_CASE("a perturbed branch fails by about the perturbation") {
  std::mt19937_64 rng(3);
  oracle::BranchPair b = oracle::random_clean_branches(rng, 2, 2, 3);
  const double before = cross_condition_residual(b.plus, b.minus);
  b.minus.apparatus_part.set(0, b.minus.apparatus_part.sector(0) * 1.01);
  const double after = cross_condition_residual(b.plus, b.minus);
  CHECK(before < 1e-12);
  CHECK(after > 1e-3);
  CHECK(after < 0.05);
  CHECK(classify(b.plus, b.minus).kind == CaseKind::Infeasible);
  ClassifyOptions loose;
  loose.cross_tol = 0.1;
  CHECK(classify(b.plus, b.minus, loose).kind == CaseKind::Case2);
}

TEST_CASE("sub-threshold components are ignored") {
  std::mt19937_64 rng(4);
  oracle::BranchPair b = oracle::random_clean_branches(rng, 1, 2, 2);
  b.plus.apparatus_part.set(5, VectorXc::Constant(2, Complex(1e-13)));
  const CaseVerdict v = classify(b.plus, b.minus);
  CHECK(v.violations.empty());
  CHECK(v.kind == CaseKind::Case1);
  ClassifyOptions strict;
  strict.finite_tol = 1e-15;
  CHECK_FALSE(support_check(b.plus, b.minus, strict.finite_tol).empty());
}

TEST_CASE("case kind names round trip") {
  for (CaseKind k : {CaseKind::Case1, CaseKind::Case2, CaseKind::Infeasible})
    CHECK(case_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(case_kind_from_string("Case3"), StructuralError);
}
