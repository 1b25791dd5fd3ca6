#include <doctest.h>

#include <cmath>

#include "rayleigh_oracle.hpp"
#include "waylab/optimizer.hpp"

using namespace waylab;

TEST_CASE("Rayleigh oracle: frozen values") {
  // The canonical scheme is already optimal at n = 2; from n = 3 on it is not.
  CHECK(oracle::optimal_error(2) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(oracle::optimal_error(3) == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
  CHECK(oracle::optimal_error(4) == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
  CHECK(oracle::optimal_error(8) == doctest::Approx(0.050139709512215622).epsilon(1e-10));
  CHECK(oracle::optimal_error(16) == doctest::Approx(0.015307635650534716).epsilon(1e-10));
}

TEST_CASE("n = 2 never exceeds the canonical error") {
  const OptimizationResult r = optimize_scheme_detailed(2);
  CHECK(r.error <= 1.0 / 3.0 + 1e-12);
  CHECK(r.constraint_residual < 1e-8);
  CHECK(validate_scheme(r.scheme).max_residual() < 1e-8);
}

TEST_CASE("optimized error tracks the independent optimum") {
  for (int n : {3, 4, 8}) {
    CAPTURE(n);
    const OptimizationResult r = optimize_scheme_detailed(n);
    CHECK(r.error == doctest::Approx(oracle::optimal_error(n)).epsilon(1e-6));
    CHECK(r.constraint_residual < 1e-8);
    CHECK(scheme_error(r.scheme) == doctest::Approx(r.error).epsilon(1e-14));
  }
}

TEST_CASE("n = 16 beats the canonical scheme") {
  const OptimizationResult r = optimize_scheme_detailed(16);
  CHECK(r.error < 1.0 / 31.0);
  CHECK(r.error == doctest::Approx(oracle::optimal_error(16)).epsilon(1e-5));
  CHECK(r.constraint_residual < 1e-8);
  CHECK(r.start > 0);
}

TEST_CASE("same seed, same result") {
  OptimizerOptions o;
  o.seed = 77;
  o.starts = 3;
  const OptimizationResult a = optimize_scheme_detailed(6, 3, o);
  const OptimizationResult b = optimize_scheme_detailed(6, 3, o);
  CHECK(a.error == b.error);
  CHECK(a.start == b.start);
  CHECK(approx_equal(a.scheme.tau, b.scheme.tau, 0.0));
  CHECK(a.scheme.d == 3);
}

TEST_CASE("argument checking") {
  CHECK_THROWS_AS(optimize_scheme(1), DomainError);
  CHECK_THROWS_AS(optimize_scheme(4, 1), StructuralError);
  OptimizerOptions o;
  o.starts = 0;
  CHECK_THROWS_AS(optimize_scheme(4, 2, o), DomainError);
  CHECK_THROWS_AS(sweep({}), DomainError);
}

TEST_CASE("sweep rows are seeded per n and independent of thread count") {
  OptimizerOptions o;
  o.starts = 3;
  const SweepTable one = sweep({2, 3, 5}, 2, o, 1);
  const SweepTable many = sweep({2, 3, 5}, 2, o, 3);
  REQUIRE(one.rows.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(one.rows[k].n == many.rows[k].n);
    CHECK(one.rows[k].error_optimized == many.rows[k].error_optimized);
    CHECK(one.rows[k].ok());
    CHECK(one.rows[k].error_optimized <= one.rows[k].error_wigner + 1e-12);
    CHECK(one.rows[k].error_wigner == doctest::Approx(1.0 / (2 * one.rows[k].n - 1)));
  }
  const SweepTable alone = sweep({5}, 2, o, 1);
  CHECK(alone.rows[0].error_optimized == one.rows[2].error_optimized);
}

TEST_CASE("sweep rejects sizes below 2 up front") {
  CHECK_THROWS_AS(sweep({1, 3}, 2, OptimizerOptions{}, 1), DomainError);
}

TEST_CASE("fit_scaling") {
  SweepTable canon, square;
  for (int n : {4, 8, 16, 32, 64}) {
    SweepRow r;
    r.n = n;
    r.error_optimized = 1.0 / (2 * n - 1);
    if (n < 64) canon.rows.push_back(r);
    r.error_optimized = 1.0 / (n * n);
    square.rows.push_back(r);
  }
  CHECK(fit_scaling(canon).slope == doctest::Approx(-1.0557080719105287).epsilon(1e-12));
  CHECK(fit_scaling(square).slope == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(fit_scaling(square).r2 == doctest::Approx(1.0));

  SweepTable short_table;
  short_table.rows.assign(canon.rows.begin(), canon.rows.begin() + 2);
  CHECK_THROWS_AS(fit_scaling(short_table), DomainError);
  SweepTable zero = canon;
  zero.rows[1].error_optimized = 0.0;
  CHECK_THROWS_AS(fit_scaling(zero), DomainError);
}
