#pragma once

// JSON and CSV forms of the library's values. Loaders throw StructuralError
// on malformed input.

#include <json.hpp>

#include <string>
#include <vector>

#include "waylab/born.hpp"
#include "waylab/generalized.hpp"
#include "waylab/graded.hpp"
#include "waylab/nogo.hpp"
#include "waylab/optimizer.hpp"
#include "waylab/scheme.hpp"

namespace waylab {

using Json = nlohmann::json;

// {"d": int, "sectors": [{"nu": int, "amp": [[re, im], ...]}]}, sorted by nu.
Json graded_to_json(const GradedVector& v);
GradedVector graded_from_json(const Json& j);

// {"n", "d", "c", "cprime", "xi", "sigma", "tau", "rho"}; loading checks the
// sector windows.
Json scheme_to_json(const ApproxScheme& s);
ApproxScheme scheme_from_json(const Json& j);

// Sequences are {"first": int, "values": [...]}.
Json exact_data_to_json(const ExactSchemeData& d);
ExactSchemeData exact_data_from_json(const Json& j);

// {"n", "min_violation", "minimizer", "witness", "pinned_minimizer",
//  "pinned_violation", "best_start"}
Json certificate_to_json(const InfeasibilityCertificate& c);
InfeasibilityCertificate certificate_from_json(const Json& j);

// {"kind", "finite_components", "cross_condition_residual", "violations": [[nu, mu], ...], "note"}
Json verdict_to_json(const CaseVerdict& v);
CaseVerdict verdict_from_json(const Json& j);

// {"outcomes": [{"label", "probability", "post_state"}]}
Json distribution_to_json(const OutcomeDistribution& d);
OutcomeDistribution distribution_from_json(const Json& j);

/// 17 significant digits, '.' separator, locale independent.
std::string format_double(double v);
/// Shortest representation that reads back to the same double.
std::string format_shortest(double v);
double parse_double(const std::string& s);

inline constexpr const char* kSweepCsvHeader = "n,error_wigner,error_optimized,constraint_residual,iters";

std::string sweep_to_csv(const SweepTable& t);
SweepTable sweep_from_csv(const std::string& text);

std::string counts_to_csv(const std::vector<OutcomeCount>& counts);  // label,count,probability
std::vector<OutcomeCount> counts_from_csv(const std::string& text);

/// Writes through a temporary file in the same directory and renames it
/// into place. Throws std::runtime_error on I/O failure.
void atomic_write(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace waylab
