#include "waylab/generalized.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace waylab {

namespace {

// Joint product state keyed by (object charge, apparatus charge).
using Product = std::map<std::pair<int, int>, VectorXc>;

Product product(const BranchSpec& b) {
  Product out;
  const int da = b.apparatus_part.dim();
  for (const auto& [mu, psi] : b.object_part.sectors()) {
    for (const auto& [lam, chi] : b.apparatus_part.sectors()) {
      VectorXc v(psi.size() * da);
      for (Eigen::Index i = 0; i < psi.size(); ++i) v.segment(i * da, da) = psi(i) * chi;
      out.emplace(std::pair{mu, lam}, std::move(v));
    }
  }
  return out;
}

// a + sign * b restricted to total charge `total` (all totals if total is unset).
double combo_norm(const Product& a, const Product& b, double sign, const int* total) {
  std::map<std::pair<int, int>, VectorXc> acc;
  auto add = [&](const Product& p, double s) {
    for (const auto& [key, v] : p) {
      if (total && key.first + key.second != *total) continue;
      auto [it, inserted] = acc.try_emplace(key, s * v);
      if (!inserted) it->second += s * v;
    }
  };
  add(a, 1.0);
  add(b, sign);
  double sq = 0.0;
  for (const auto& [key, v] : acc) sq += v.squaredNorm();
  return std::sqrt(sq);
}

Complex product_inner(const Product& a, const Product& b) {
  Complex acc(0.0);
  for (const auto& [key, v] : a) {
    auto it = b.find(key);
    if (it != b.end()) acc += v.dot(it->second);
  }
  return acc;
}

double product_norm(const Product& a) { return std::sqrt(std::abs(product_inner(a, a))); }

// Sectors whose share of the factor's norm exceeds tol.
std::vector<int> finite_sectors(const GradedVector& v, double tol) {
  std::vector<int> out;
  const double total = v.norm();
  if (!(total > 0.0)) return out;
  for (const auto& [nu, b] : v.sectors())
    if (b.norm() / total > tol) out.push_back(nu);
  return out;
}

enum class Pattern { ObjectSplit, ApparatusSplit, Other };

Pattern pattern_of(const std::vector<int>& obj, const std::vector<int>& app) {
  auto adjacent_pair = [](const std::vector<int>& s) { return s.size() == 2 && s[1] == s[0] + 1; };
  if (adjacent_pair(obj) && app.size() == 1) return Pattern::ObjectSplit;
  if (obj.size() == 1 && adjacent_pair(app)) return Pattern::ApparatusSplit;
  return Pattern::Other;
}

}  // namespace

std::string to_string(CaseKind k) {
  switch (k) {
    case CaseKind::Case1: return "Case1";
    case CaseKind::Case2: return "Case2";
    case CaseKind::Infeasible: return "Infeasible";
  }
  return "Infeasible";
}

CaseKind case_kind_from_string(const std::string& s) {
  if (s == "Case1") return CaseKind::Case1;
  if (s == "Case2") return CaseKind::Case2;
  if (s == "Infeasible") return CaseKind::Infeasible;
  throw StructuralError("unknown case kind '" + s + "'");
}

std::vector<SupportViolation> support_check(const BranchSpec& plus_branch, const BranchSpec& minus_branch,
                                            double finite_tol) {
  std::set<SupportViolation> found;
  for (const BranchSpec* b : {&plus_branch, &minus_branch}) {
    const std::vector<int> obj = finite_sectors(b->object_part, finite_tol);
    const std::vector<int> app = finite_sectors(b->apparatus_part, finite_tol);
    for (int mu : obj)
      for (int lam : app) {
        const int nu = mu + lam;
        if (nu != 0 && nu != 1) found.insert({nu, mu});
      }
  }
  return {found.begin(), found.end()};
}

double cross_condition_residual(const BranchSpec& plus_branch, const BranchSpec& minus_branch) {
  const Product p = product(plus_branch);
  const Product m = product(minus_branch);
  const double np = product_norm(p), nm = product_norm(m);
  if (!(np > 0.0) || !(nm > 0.0)) return 1.0;  // a vanishing branch cannot come from a unitary
  const double scale = std::sqrt(np * nm);
  const int one = 1, zero = 0;
  const double sum_one = combo_norm(p, m, 1.0, &one) / scale;
  const double diff_zero = combo_norm(p, m, -1.0, &zero) / scale;
  const double overlap = std::abs(product_inner(p, m)) / (np * nm);
  return std::max({sum_one, diff_zero, overlap});
}

CaseVerdict classify(const BranchSpec& plus_branch, const BranchSpec& minus_branch, const ClassifyOptions& opts) {
  CaseVerdict v;
  v.violations = support_check(plus_branch, minus_branch, opts.finite_tol);
  v.cross_condition_residual = cross_condition_residual(plus_branch, minus_branch);

  Pattern patterns[2];
  int i = 0;
  for (const auto& [name, b] : {std::pair{"plus", &plus_branch}, std::pair{"minus", &minus_branch}}) {
    const std::vector<int> obj = finite_sectors(b->object_part, opts.finite_tol);
    const std::vector<int> app = finite_sectors(b->apparatus_part, opts.finite_tol);
    for (int mu : obj) v.finite_components.push_back(std::string(name) + ".psi[" + std::to_string(mu) + "]");
    for (int lam : app) v.finite_components.push_back(std::string(name) + ".chi[" + std::to_string(lam) + "]");
    patterns[i++] = pattern_of(obj, app);
  }

  if (!v.violations.empty()) {
    v.kind = CaseKind::Infeasible;
    v.note = "final states carry total charge outside {0, 1}";
  } else if (!(v.cross_condition_residual <= opts.cross_tol)) {
    v.kind = CaseKind::Infeasible;
    v.note = "branches are not images of orthonormal inputs under a charge-conserving unitary";
  } else if (patterns[0] == Pattern::ObjectSplit && patterns[1] == Pattern::ObjectSplit) {
    v.kind = CaseKind::Case1;
    v.note = "apparatus keeps a sharp charge; this is the modified exact measurement ruled out by the no-go analysis";
  } else if (patterns[0] == Pattern::ApparatusSplit && patterns[1] == Pattern::ApparatusSplit) {
    v.kind = CaseKind::Case2;
    v.note = "the quantum is exchanged with the apparatus; distinguishing the branches means distinguishing chi0 + chi1 from chi0 - chi1";
  } else {
    v.kind = CaseKind::Infeasible;
    v.note = "support pattern matches neither case";
  }
  return v;
}

ExchangeForm exchange_form(const CaseVerdict& verdict, const BranchSpec& plus_branch,
                           const BranchSpec& minus_branch) {
  if (verdict.kind != CaseKind::Case2)
    throw DomainError("exchange_form: verdict is " + to_string(verdict.kind) + ", expected Case2");
  const GradedVector& op = plus_branch.object_part;
  const double len = op.norm();
  if (!(len > 0.0)) throw DomainError("exchange_form: plus branch has a zero object factor");

  ExchangeForm ex;
  ex.object = (1.0 / len) * op;
  // Partial inner products with the unit object factor.
  const Complex kp = inner(ex.object, plus_branch.object_part);
  const Complex km = inner(ex.object, minus_branch.object_part);
  const GradedVector ap = kp * plus_branch.apparatus_part;
  const GradedVector am = km * minus_branch.apparatus_part;
  ex.chi0 = 0.5 * (ap + am);
  ex.chi1 = 0.5 * (ap - am);

  const BranchSpec rp{ex.object, ex.chi0 + ex.chi1};
  const BranchSpec rm{ex.object, ex.chi0 - ex.chi1};
  ex.reproduction_residual = std::max(combo_norm(product(plus_branch), product(rp), -1.0, nullptr),
                                      combo_norm(product(minus_branch), product(rm), -1.0, nullptr));
  return ex;
}

}  // namespace waylab
