#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace waylab {

struct ConstraintEntry {
  std::string id;
  double residual = 0.0;
};

/// Named residuals of a constraint system. A residual of 0 means the
/// constraint holds exactly; NaN entries poison max_residual().
class ConstraintReport {
 public:
  void add(std::string id, double residual);
  // Appends every entry of other, prefixing ids with `prefix`.
  void merge(const ConstraintReport& other, std::string_view prefix = {});

  const std::vector<ConstraintEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  double max_residual() const;
  double sum_of_squares() const;
  bool passes(double tolerance) const;

  // Largest residual whose id starts with `prefix`; 0 when none match.
  double max_residual(std::string_view prefix) const;
  // Entry with the largest residual, or nullptr for an empty report.
  const ConstraintEntry* worst() const;
  const ConstraintEntry* find(std::string_view id) const;

 private:
  std::vector<ConstraintEntry> entries_;
};

std::string format_report(const ConstraintReport& report, double tolerance,
                          bool only_failing = false);

}  // namespace waylab
