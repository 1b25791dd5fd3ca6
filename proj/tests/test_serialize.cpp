#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <unistd.h>

#include "instances.hpp"
#include "waylab/serialize.hpp"

using namespace waylab;

TEST_CASE("graded vector round trip is exact") {
  std::mt19937_64 rng(8);
  GradedVector v(3);
  for (int nu : {-4, 0, 7}) v.set(nu, oracle::random_vector(rng, 3));
  const GradedVector w = graded_from_json(Json::parse(graded_to_json(v).dump()));
  REQUIRE(w.sectors().size() == v.sectors().size());
  for (const auto& [nu, b] : v.sectors()) CHECK(w.sector(nu) == b);
}

TEST_CASE("graded vector loader rejects malformed input") {
  CHECK_THROWS_AS(graded_from_json(Json::parse(R"({"d": 2})")), StructuralError);
  CHECK_THROWS_AS(graded_from_json(Json::parse(R"({"d": 2, "sectors": [{"nu": 0, "amp": [[1, 0]]}]})")),
                  StructuralError);
  CHECK_THROWS_AS(graded_from_json(Json::parse(R"({"d": 1, "sectors": [{"nu": 0, "amp": [[1, 0]]},
                                                  {"nu": 0, "amp": [[1, 0]]}]})")),
                  StructuralError);
  CHECK_THROWS_AS(graded_from_json(Json::parse(R"({"d": 1, "sectors": [{"nu": 0, "amp": ["x"]}]})")),
                  StructuralError);
}

TEST_CASE("scheme round trip and window check on load") {
  const ApproxScheme s = build_wigner_scheme(7, 3);
  const ApproxScheme t = scheme_from_json(Json::parse(scheme_to_json(s).dump()));
  CHECK(t.n == 7);
  CHECK(t.d == 3);
  CHECK(t.c == s.c);
  CHECK(scheme_error(t) == scheme_error(s));
  CHECK(scheme_to_json(t).dump() == scheme_to_json(s).dump());

  Json bad = scheme_to_json(s);
  bad["n"] = 5;
  CHECK_THROWS_AS(scheme_from_json(bad), StructuralError);
}

TEST_CASE("certificate round trip") {
  const InfeasibilityCertificate c = infeasibility_certificate(3);
  const InfeasibilityCertificate r = certificate_from_json(Json::parse(certificate_to_json(c).dump()));
  CHECK(r.n == 3);
  CHECK(r.min_violation == c.min_violation);
  CHECK(r.witness == c.witness);
  CHECK(r.minimizer.t.values == c.minimizer.t.values);
  CHECK(r.pinned_minimizer.s.values == c.pinned_minimizer.s.values);
  CHECK(r.best_start == c.best_start);
}

TEST_CASE("verdict and distribution round trips") {
  std::mt19937_64 rng(12);
  const oracle::BranchPair b = oracle::random_clean_branches(rng, 2, 2, 2);
  const CaseVerdict v = classify(b.plus, b.minus);
  const CaseVerdict w = verdict_from_json(Json::parse(verdict_to_json(v).dump()));
  CHECK(w.kind == v.kind);
  CHECK(w.finite_components == v.finite_components);
  CHECK(w.cross_condition_residual == v.cross_condition_residual);
  CHECK(w.violations == v.violations);
  CHECK(w.note == v.note);

  const OutcomeDistribution d = three_outcome_stats(build_wigner_scheme(3), ObjectState::balanced(-1));
  const OutcomeDistribution e = distribution_from_json(Json::parse(distribution_to_json(d).dump()));
  REQUIRE(e.outcomes.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(e.outcomes[k].label == d.outcomes[k].label);
    CHECK(e.outcomes[k].probability == d.outcomes[k].probability);
    CHECK(approx_equal(e.outcomes[k].post_state, d.outcomes[k].post_state, 0.0));
  }
}

TEST_CASE("number formatting") {
  CHECK(format_shortest(0.2) == "0.2");
  CHECK(format_shortest(1.0 / 3.0) == "0.3333333333333333");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1e-300) == "1e-300");
  CHECK(format_double(2.0 / 3.0) == "0.66666666666666663");
  CHECK(parse_double("+1.5") == 1.5);
  CHECK(parse_double(format_double(std::acos(-1.0))) == std::acos(-1.0));
  CHECK_THROWS_AS(parse_double("1.5x"), StructuralError);
  CHECK_THROWS_AS(parse_double(""), StructuralError);
}

TEST_CASE("sweep CSV: header, round trip, NaN rows") {
  SweepTable t;
  t.rows.push_back({2, 1.0 / 3.0, 1.0 / 3.0, 1e-17, 0, ""});
  t.rows.push_back({3, 0.2, std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(), 4,
                    "did not converge"});
  const std::string csv = sweep_to_csv(t);
  CHECK(csv.rfind(std::string(kSweepCsvHeader) + "\n", 0) == 0);
  CHECK(std::string(kSweepCsvHeader) == "n,error_wigner,error_optimized,constraint_residual,iters");
  const SweepTable r = sweep_from_csv(csv);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].error_optimized == 1.0 / 3.0);
  CHECK(r.rows[0].ok());
  CHECK(std::isnan(r.rows[1].error_optimized));
  CHECK_FALSE(r.rows[1].ok());
  CHECK(r.rows[1].iters == 4);
  CHECK_THROWS_AS(sweep_from_csv("n,error\n2,0.3\n"), StructuralError);
  CHECK_THROWS_AS(sweep_from_csv(std::string(kSweepCsvHeader) + "\n2,0.3\n"), StructuralError);
}

TEST_CASE("counts CSV round trip") {
  const std::vector<OutcomeCount> c{{"plus", 80, 0.8}, {"minus", 0, 0.0}, {"undetermined", 20, 0.2}};
  const std::string csv = counts_to_csv(c);
  CHECK(csv == "label,count,probability\nplus,80,0.80000000000000004\nminus,0,0\nundetermined,20,0.20000000000000001\n");
  const std::vector<OutcomeCount> r = counts_from_csv(csv);
  REQUIRE(r.size() == 3);
  CHECK(r[2].label == "undetermined");
  CHECK(r[2].count == 20);
  CHECK(r[0].probability == 0.8);
  CHECK_THROWS_AS(counts_from_csv("label,count,probability\nplus,-1,0.5\n"), StructuralError);
}

TEST_CASE("atomic write replaces the target and leaves no temporary") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("waylab_ser_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string path = (dir / "out.json").string();
  atomic_write(path, "first");
  atomic_write(path, "second");
  CHECK(read_file(path) == "second");
  int files = 0;
  for ([[maybe_unused]] const auto& entry : fs::directory_iterator(dir)) ++files;
  CHECK(files == 1);
  CHECK_THROWS_AS(atomic_write((dir / "missing" / "x").string(), "y"), std::runtime_error);
  CHECK_THROWS_AS(read_file((dir / "nope").string()), std::runtime_error);
  fs::remove_all(dir);
}
