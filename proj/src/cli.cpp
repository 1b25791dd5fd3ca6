#include "waylab/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>

#include "waylab/born.hpp"
#include "waylab/nogo.hpp"
#include "waylab/optimizer.hpp"
#include "waylab/scheme.hpp"
#include "waylab/serialize.hpp"

namespace waylab {

namespace {

// Operation-level failure: exit code 1.
struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ApproxScheme load_scheme(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(path + ": " + e.what());
  }
  return scheme_from_json(j);
}

Complex parse_complex_pair(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) return {parse_double(text), 0.0};
  return {parse_double(text.substr(0, comma)), parse_double(text.substr(comma + 1))};
}

ObjectState parse_state(const std::string& text) {
  if (text == "plus") return ObjectState::balanced(+1);
  if (text == "minus") return ObjectState::balanced(-1);
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw StructuralError("--state must be plus, minus or a,b");
  ObjectState s{Complex(parse_double(text.substr(0, comma))), Complex(parse_double(text.substr(comma + 1)))};
  const double len = std::sqrt(s.squared_norm());
  if (!(len > 0.0)) throw DomainError("--state: zero vector");
  s.amp0 /= len;
  s.amp1 /= len;
  return s;
}

std::vector<int> sweep_sizes(int lo, int hi, bool geometric) {
  if (lo < 2 || hi < lo) throw DomainError("sweep: need 2 <= n-min <= n-max");
  std::vector<int> ns;
  if (geometric) {
    for (long long n = lo; n <= hi; n *= 2) ns.push_back(static_cast<int>(n));
  } else {
    for (int n = lo; n <= hi; ++n) ns.push_back(n);
  }
  return ns;
}

}  // namespace

CommandResult run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conservation-constrained measurement models: build, validate, optimize, simulate.", "waylab"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  int n = 0, d = 2, max_iters = OptimizerOptions{}.max_iters, starts = 0;
  int n_min = 0, n_max = 0;
  unsigned threads = 0;
  std::uint64_t seed = kDefaultSeed, shots = 0;
  double tol = kDefaultTolerance;
  bool geometric = false, verbose = false;
  std::string out_path, scheme_path, state, alpha, beta;

  auto* build = app.add_subcommand("build", "Write the canonical scheme of size n as JSON");
  build->add_option("--n", n, "Apparatus size")->required()->check(CLI::PositiveNumber);
  build->add_option("--d", d, "Per-sector dimension")->capture_default_str();
  build->add_option("--out", out_path, "Output JSON file")->required();

  auto* validate = app.add_subcommand("validate", "Check every constraint of a scheme JSON");
  validate->add_option("--scheme", scheme_path, "Scheme JSON file")->required();
  validate->add_option("--tol", tol, "Residual tolerance")->capture_default_str();
  validate->add_flag("--verbose", verbose, "List every residual, not only failing ones");

  auto* optimize = app.add_subcommand("optimize", "Minimize the undetermined probability for size n");
  optimize->add_option("--n", n, "Apparatus size (>= 2)")->required();
  optimize->add_option("--d", d, "Per-sector dimension")->capture_default_str();
  optimize->add_option("--seed", seed, "Random seed")->capture_default_str();
  optimize->add_option("--max-iters", max_iters, "L-BFGS iterations per penalty stage")->capture_default_str();
  optimize->add_option("--starts", starts, "Number of starts (canonical scheme included)");
  optimize->add_option("--out", out_path, "Output JSON file")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "Optimize over a range of sizes and fit the scaling exponent");
  sweep_cmd->add_option("--n-min", n_min, "Smallest n")->required();
  sweep_cmd->add_option("--n-max", n_max, "Largest n")->required();
  sweep_cmd->add_flag("--geometric", geometric, "Double n from n-min instead of stepping by one");
  sweep_cmd->add_option("--d", d, "Per-sector dimension")->capture_default_str();
  sweep_cmd->add_option("--seed", seed, "Master random seed")->capture_default_str();
  sweep_cmd->add_option("--max-iters", max_iters, "L-BFGS iterations per penalty stage")->capture_default_str();
  sweep_cmd->add_option("--starts", starts, "Starts per size");
  sweep_cmd->add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
  sweep_cmd->add_option("--out", out_path, "Output CSV file")->required();

  auto* sample = app.add_subcommand("sample", "Sample the three-outcome statistics of a scheme");
  sample->add_option("--scheme", scheme_path, "Scheme JSON file")->required();
  sample->add_option("--state", state, "plus, minus, or amplitudes a,b (normalized on input)")->required();
  sample->add_option("--shots", shots, "Number of shots")->required()->check(CLI::PositiveNumber);
  sample->add_option("--seed", seed, "Random seed")->capture_default_str();
  sample->add_option("--out", out_path, "Also write the counts CSV here");

  auto* nogo = app.add_subcommand("nogo", "Certificate that exact measurement is impossible with support n");
  nogo->add_option("--n", n, "Support size")->required()->check(CLI::PositiveNumber);
  auto* alpha_opt = nogo->add_option("--alpha", alpha, "Coefficient of psi_0 as RE,IM");
  auto* beta_opt = nogo->add_option("--beta", beta, "Coefficient of psi_1 as RE,IM");
  alpha_opt->needs(beta_opt);
  beta_opt->needs(alpha_opt);
  nogo->add_option("--seed", seed, "Random seed")->capture_default_str();
  nogo->add_option("--starts", starts, "Number of starts");
  nogo->add_option("--out", out_path, "Also write the certificate JSON here");

  CommandResult result;
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    result.exit_code = code == 0 ? 0 : 2;
    return result;
  }

  auto finish = [&](const std::string& summary) {
    result.summary = summary;
    out << summary << "\n";
  };

  try {
    if (*build) {
      const ApproxScheme s = build_wigner_scheme(n, d);
      atomic_write(out_path, scheme_to_json(s).dump(2) + "\n");
      result.artifacts.push_back(out_path);
      finish("error = " + format_shortest(canonical_weights(n).cprime.to_double()));
    } else if (*validate) {
      const ApproxScheme s = load_scheme(scheme_path);
      const ConstraintReport r = validate_scheme(s);
      out << format_report(r, tol, !verbose);
      const bool ok = r.max_residual() < tol;
      const ConstraintEntry* w = r.worst();
      finish(std::string(ok ? "PASS" : "FAIL") + ": max_residual = " + format_double(r.max_residual()) +
             (w ? " (" + w->id + ")" : ""));
      if (!ok) result.exit_code = 1;
    } else if (*optimize) {
      OptimizerOptions o;
      o.seed = seed;
      o.max_iters = max_iters;
      if (starts > 0) o.starts = starts;
      const OptimizationResult r = optimize_scheme_detailed(n, d, o);
      atomic_write(out_path, scheme_to_json(r.scheme).dump(2) + "\n");
      result.artifacts.push_back(out_path);
      finish("error = " + format_double(r.error) + " (canonical " +
             format_double(canonical_weights(n).cprime.to_double()) +
             ", constraint residual " + format_double(r.constraint_residual) + ")");
    } else if (*sweep_cmd) {
      OptimizerOptions o;
      o.seed = seed;
      o.max_iters = max_iters;
      if (starts > 0) o.starts = starts;
      const SweepTable t = sweep(sweep_sizes(n_min, n_max, geometric), d, o, threads);
      atomic_write(out_path, sweep_to_csv(t));
      result.artifacts.push_back(out_path);
      bool all_ok = true;
      for (const SweepRow& row : t.rows) {
        if (row.ok()) continue;
        all_ok = false;
        err << "n = " << row.n << ": " << row.annotation << "\n";
      }
      std::string summary;
      if (t.rows.size() >= 3 && all_ok) {
        const ScalingFit fit = fit_scaling(t);
        summary = "slope = " + format_double(fit.slope) + " (intercept " + format_double(fit.intercept) +
                  ", r2 " + format_double(fit.r2) + ")";
      } else {
        summary = all_ok ? "slope = n/a (fewer than 3 sizes)" : "slope = n/a (some sizes failed)";
      }
      finish(summary);
      if (!all_ok) result.exit_code = 1;
    } else if (*sample) {
      const ApproxScheme s = load_scheme(scheme_path);
      const OutcomeDistribution dist = three_outcome_stats(s, parse_state(state));
      const std::string csv = counts_to_csv(sample_outcomes(dist, shots, seed));
      out << csv;
      if (!out_path.empty()) {
        atomic_write(out_path, csv);
        result.artifacts.push_back(out_path);
      }
      result.summary = "sampled " + std::to_string(shots) + " shots with " + kSamplerVersion;
    } else if (*nogo) {
      NoGoOptions o;
      o.seed = seed;
      if (starts > 0) o.starts = starts;
      const InfeasibilityCertificate c =
          alpha.empty() ? infeasibility_certificate(n, o)
                        : rotated_basis_residual(n, ObjectState{parse_complex_pair(alpha), parse_complex_pair(beta)}, o);
      const std::string text = certificate_to_json(c).dump(2) + "\n";
      out << text;
      if (!out_path.empty()) {
        atomic_write(out_path, text);
        result.artifacts.push_back(out_path);
      }
      result.summary = "min_violation = " + format_double(c.min_violation);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    result.exit_code = 1;
    result.summary = e.what();
  }
  return result;
}

}  // namespace waylab
