#include "waylab/report.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace waylab {

void ConstraintReport::add(std::string id, double residual) {
  entries_.push_back({std::move(id), std::abs(residual)});
}

void ConstraintReport::merge(const ConstraintReport& other, std::string_view prefix) {
  for (const auto& e : other.entries_) entries_.push_back({std::string(prefix) + e.id, e.residual});
}

double ConstraintReport::max_residual() const { return max_residual(std::string_view{}); }

double ConstraintReport::max_residual(std::string_view prefix) const {
  double worst = 0.0;
  for (const auto& e : entries_) {
    if (!e.id.starts_with(prefix)) continue;
    if (std::isnan(e.residual)) return std::numeric_limits<double>::quiet_NaN();
    if (e.residual > worst) worst = e.residual;
  }
  return worst;
}

double ConstraintReport::sum_of_squares() const {
  double sum = 0.0;
  for (const auto& e : entries_) sum += e.residual * e.residual;
  return sum;
}

bool ConstraintReport::passes(double tolerance) const {
  const double m = max_residual();
  return !std::isnan(m) && m < tolerance;
}

const ConstraintEntry* ConstraintReport::worst() const {
  const ConstraintEntry* best = nullptr;
  for (const auto& e : entries_) {
    if (best == nullptr || std::isnan(e.residual) || e.residual > best->residual) best = &e;
    if (std::isnan(best->residual)) break;
  }
  return best;
}

const ConstraintEntry* ConstraintReport::find(std::string_view id) const {
  for (const auto& e : entries_)
    if (e.id == id) return &e;
  return nullptr;
}

std::string format_report(const ConstraintReport& report, double tolerance, bool only_failing) {
  std::ostringstream out;
  out.precision(6);
  out << std::scientific;
  for (const auto& e : report.entries()) {
    const bool ok = !std::isnan(e.residual) && e.residual < tolerance;
    if (only_failing && ok) continue;
    out << (ok ? "  ok    " : "  FAIL  ") << e.id << " = " << e.residual << '\n';
  }
  out << "max_residual = " << report.max_residual() << " (tolerance " << tolerance << ")\n";
  return out.str();
}

}  // namespace waylab
