#include "waylab/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace waylab {

namespace {

struct Window {
  int lo, hi;
};

void check_window(const GradedVector& v, const char* name, Window w, int d, double tol) {
  if (v.dim() != d)
    throw StructuralError(std::string("scheme: ") + name + " has sector dimension " + std::to_string(v.dim()) +
                          ", expected " + std::to_string(d));
  for (const auto& [nu, b] : v.sectors()) {
    if ((nu < w.lo || nu > w.hi) && b.norm() > tol)
      throw StructuralError(std::string("scheme: ") + name + " has weight in sector " + std::to_string(nu) +
                            " outside " + std::to_string(w.lo) + ".." + std::to_string(w.hi));
  }
}

// Union of sector indices carried by the scheme's vectors.
std::pair<int, int> sector_span(const ApproxScheme& s) {
  int lo = 0, hi = 0;
  bool any = false;
  for (const GradedVector* v : {&s.xi, &s.sigma, &s.tau, &s.rho}) {
    for (const auto& [nu, b] : v->sectors()) {
      if (!any) lo = hi = nu;
      lo = std::min(lo, nu);
      hi = std::max(hi, nu);
      any = true;
    }
  }
  if (!any) return {0, -1};
  return {lo, hi};
}

std::string idx(const char* name, int nu) { return std::string(name) + "[" + std::to_string(nu) + "]"; }

}  // namespace

void ApproxScheme::check_structure(double tol) const {
  if (n < 1) throw StructuralError("scheme: n must be >= 1");
  if (d < 2) throw StructuralError("scheme: sector dimension must be >= 2");
  check_window(xi, "xi", {1, n}, d, tol);
  check_window(sigma, "sigma", {1, n}, d, tol);
  check_window(tau, "tau", {2, n + 1}, d, tol);
  check_window(rho, "rho", {0, n - 1}, d, tol);
}

CanonicalWeights canonical_weights(int n) {
  if (n < 1) throw DomainError("canonical_weights: n must be >= 1");
  // [ n      n      ] [c ]   [1]
  // [ 4n  -4(n-1)   ] [c'] = [0]
  const Rational a11(n), a12(n), a21(4 * static_cast<std::int64_t>(n)), a22(-4 * (static_cast<std::int64_t>(n) - 1));
  const Rational det = a11 * a22 - a12 * a21;
  return {(Rational(1) * a22 - a12 * Rational(0)) / det, (a11 * Rational(0) - Rational(1) * a21) / det};
}

ApproxScheme build_wigner_scheme(int n, int d) {
  if (n < 1) throw DomainError("build_wigner_scheme: n must be >= 1");
  if (d < 2) throw StructuralError("build_wigner_scheme: sector dimension d must be >= 2 so sigma can be orthogonal to tau");
  const CanonicalWeights w = canonical_weights(n);
  ApproxScheme s;
  s.n = n;
  s.d = d;
  s.c = w.c.to_double();
  s.cprime = w.cprime.to_double();
  s.xi = s.sigma = s.tau = s.rho = GradedVector(d);

  const double sc = std::sqrt(s.c);
  const double scp = std::sqrt(s.cprime);
  const double sx = std::sqrt((w.c + w.cprime).to_double());
  for (int nu = 1; nu <= n; ++nu) {
    s.xi.set(nu, GradedVector::basis(d, nu, 0, sx).sector(nu));
    s.sigma.set(nu, GradedVector::basis(d, nu, 0, sc).sector(nu));
  }
  for (int nu = 0; nu <= n - 1; ++nu) s.rho.set(nu, GradedVector::basis(d, nu, 1, scp).sector(nu));
  for (int nu = 2; nu <= n + 1; ++nu) s.tau.set(nu, GradedVector::basis(d, nu, 1, scp).sector(nu));
  return s;
}

double scheme_error(const ApproxScheme& s) { return 0.25 * (s.tau - s.rho).squared_norm(); }

BlockMap induced_block_map(const ApproxScheme& s) {
  const int d = s.d;
  BlockMap m(2 * d);
  const auto [lo, hi] = sector_span(s);
  for (int N = lo; N <= hi + 1; ++N) {
    MatrixXc dom = MatrixXc::Zero(2 * d, 2);
    MatrixXc img = MatrixXc::Zero(2 * d, 2);
    // psi_0 xi_N -> psi_0 sigma_N + psi_1 rho_{N-1}
    dom.col(0).head(d) = s.xi.sector(N);
    img.col(0).head(d) = s.sigma.sector(N);
    img.col(0).tail(d) = s.rho.sector(N - 1);
    // psi_1 xi_{N-1} -> psi_0 tau_N + psi_1 sigma_{N-1}
    dom.col(1).tail(d) = s.xi.sector(N - 1);
    img.col(1).head(d) = s.tau.sector(N);
    img.col(1).tail(d) = s.sigma.sector(N - 1);
    if (dom.norm() == 0.0 && img.norm() == 0.0) continue;
    m.add_block(N, std::move(dom), std::move(img), {idx("psi0 xi", N), idx("psi1 xi", N - 1)});
  }
  return m;
}

ConstraintReport validate_scheme(const ApproxScheme& s) {
  ConstraintReport r;
  const auto [lo, hi] = sector_span(s);
  for (int nu = lo; nu <= hi + 1; ++nu) {
    const Complex o = s.sigma.sector(nu).dot(s.tau.sector(nu)) + s.rho.sector(nu - 1).dot(s.sigma.sector(nu - 1));
    r.add(idx("orthogonality", nu), std::abs(o));
  }
  for (int nu = lo; nu <= hi; ++nu) {
    const double x = s.xi.sector_squared_norm(nu);
    const double sg = s.sigma.sector_squared_norm(nu);
    r.add(idx("normalization.rho", nu), x - sg - s.rho.sector_squared_norm(nu - 1));
    r.add(idx("normalization.tau", nu), x - sg - s.tau.sector_squared_norm(nu + 1));
  }
  r.add("xi_norm", s.xi.squared_norm() - 1.0);
  r.add("pointer_orthogonality", 4.0 * s.sigma.squared_norm() - (s.rho + s.tau).squared_norm());
  const GradedVector diff = s.tau - s.rho;
  r.add("eta_orthogonality.sigma", std::abs(inner(s.sigma, diff)));
  r.add("eta_orthogonality.sum", std::abs(inner(s.tau + s.rho, diff)));
  r.merge(check_conserving(induced_block_map(s)), "map.");
  return r;
}

DerivedPointers derived_pointers(const ApproxScheme& s) {
  const GradedVector half_sum = 0.5 * (s.rho + s.tau);
  DerivedPointers p;
  p.chi = s.sigma + half_sum;
  p.chiprime = s.sigma - half_sum;
  p.eta = 0.5 * (s.tau - s.rho);
  return p;
}

GradedVector apply_interaction(const ApproxScheme& s, const ObjectState& obj) {
  obj.require_normalized("apply_interaction");
  return tensor(ObjectState{obj.amp0, obj.amp1}, s.sigma) + tensor(ObjectState{Complex(0), obj.amp0}, s.rho) +
         tensor(ObjectState{obj.amp1, Complex(0)}, s.tau);
}

std::map<int, MatrixXc> interaction_unitaries(const ApproxScheme& s) {
  std::map<int, MatrixXc> out;
  const BlockMap m = induced_block_map(s);
  for (const auto& [N, blk] : m.blocks()) out.emplace(N, unitary_completion<double>(blk));
  return out;
}

}  // namespace waylab
