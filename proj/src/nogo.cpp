#include "waylab/nogo.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "bounded_lsq.hpp"

namespace waylab {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Signed residual rows, in a fixed order shared with row_ids().
void row_values(const ExactSchemeData& d, const RotationParameters& rot, std::vector<double>& out) {
  const int n = d.n;
  const double dl = rot.delta;
  const double g2 = 2.0 * rot.coupling * rot.coupling;
  const double g = 2.0 * rot.coupling;
  out.clear();
  for (int nu = 0; nu <= n + 2; ++nu) {
    out.push_back(d.x.at(nu) - 0.5 * (d.s.at(nu) + dl * dl * d.t.at(nu) + 2.0 * dl * d.a.at(nu)) -
                  g2 * d.t.at(nu - 1));
    out.push_back(d.x.at(nu - 1) - g2 * d.t.at(nu) -
                  0.5 * (d.s.at(nu - 1) + dl * dl * d.t.at(nu - 1) - 2.0 * dl * d.a.at(nu - 1)));
  }
  for (int nu = 0; nu <= n + 2; ++nu) {
    out.push_back(g * (d.a.at(nu) + d.a.at(nu - 1) + dl * (d.t.at(nu) - d.t.at(nu - 1))));
    out.push_back(g * (d.b.at(nu - 1) - d.b.at(nu)));
  }
  out.push_back(d.x.sum() - 1.0);
  out.push_back(d.s.sum() - 1.0);
  out.push_back(d.t.sum() - 1.0);
  out.push_back(d.a.sum());
  out.push_back(d.b.sum());
}

std::vector<std::string> row_ids(int n) {
  std::vector<std::string> ids;
  for (int nu = 0; nu <= n + 2; ++nu) {
    ids.push_back("unitarity.first[" + std::to_string(nu) + "]");
    ids.push_back("unitarity.second[" + std::to_string(nu) + "]");
  }
  for (int nu = 0; nu <= n + 2; ++nu) {
    ids.push_back("unitarity.cross_re[" + std::to_string(nu) + "]");
    ids.push_back("unitarity.cross_im[" + std::to_string(nu) + "]");
  }
  for (const char* id : {"normalization.x", "normalization.s", "normalization.t", "orthogonality.a",
                         "orthogonality.b"})
    ids.emplace_back(id);
  return ids;
}

// z = [x | s | t | a | b]
ExactSchemeData unpack(int n, const VectorXd& z) {
  ExactSchemeData d = ExactSchemeData::zeros(n);
  d.x.values = z.segment(0, n);
  d.s.values = z.segment(n, n);
  d.t.values = z.segment(2 * n, n + 2);
  d.a.values = z.segment(3 * n + 2, n);
  d.b.values = z.segment(4 * n + 2, n);
  return d;
}

std::vector<bool> nonneg_mask(int n) {
  std::vector<bool> mask(static_cast<std::size_t>(5 * n + 2), false);
  for (int i = 0; i < 3 * n + 2; ++i) mask[static_cast<std::size_t>(i)] = true;
  return mask;
}

struct AffineSystem {
  MatrixXd A;
  VectorXd rhs;
};

// The residual map is affine in z: r(z) = A z - rhs.
AffineSystem linearize(int n, const RotationParameters& rot) {
  const int dim = 5 * n + 2;
  std::vector<double> r0, rj;
  row_values(ExactSchemeData::zeros(n), rot, r0);
  AffineSystem sys{MatrixXd(static_cast<Eigen::Index>(r0.size()), dim),
                   VectorXd(static_cast<Eigen::Index>(r0.size()))};
  for (std::size_t i = 0; i < r0.size(); ++i) sys.rhs(static_cast<Eigen::Index>(i)) = -r0[i];
  VectorXd e = VectorXd::Zero(dim);
  for (int j = 0; j < dim; ++j) {
    e(j) = 1.0;
    row_values(unpack(n, e), rot, rj);
    e(j) = 0.0;
    for (std::size_t i = 0; i < rj.size(); ++i) sys.A(static_cast<Eigen::Index>(i), j) = rj[i] - r0[i];
  }
  return sys;
}

// ---- symbolic witness for the balanced pair ---------------------------------

// Integer linear forms over the scheme variables; coefficients are doubled so
// that every unitarity row has integer entries.
using Var = std::pair<char, int>;
using Form = std::map<Var, long long>;

class WitnessBuilder {
 public:
  explicit WitnessBuilder(int n) : n_(n) {}

  bool in_window(char v, int nu) const {
    if (v == 't') return nu >= 0 && nu <= n_ + 1;
    return nu >= 1 && nu <= n_;
  }
  void add(Form& f, char v, int nu, long long c) const {
    if (!in_window(v, nu) || c == 0) return;
    auto& slot = f[{v, nu}];
    slot += c;
    if (slot == 0) f.erase({v, nu});
  }
  void add(Form& f, const Form& g, long long c) const {
    for (const auto& [var, k] : g) add(f, var.first, var.second, c * k);
  }
  Form first(int k) const {  // 2 * (x_k - s_k/2 - t_{k-1}/2)
    Form f;
    add(f, 'x', k, 2);
    add(f, 's', k, -1);
    add(f, 't', k - 1, -1);
    return f;
  }
  Form second(int k) const {  // 2 * (x_{k-1} - t_k/2 - s_{k-1}/2)
    Form f;
    add(f, 'x', k - 1, 2);
    add(f, 't', k, -1);
    add(f, 's', k - 1, -1);
    return f;
  }
  Form cross_re(int k) const {
    Form f;
    add(f, 'a', k, 1);
    add(f, 'a', k - 1, 1);
    return f;
  }
  Form cross_im(int k) const {
    Form f;
    add(f, 'b', k - 1, 1);
    add(f, 'b', k, -1);
    return f;
  }
  Form single(char v, int nu) const {
    Form f;
    add(f, v, nu, 1);
    return f;
  }

  std::vector<std::string> build() const {
    const int n = n_;
    // (i) a and b vanish: explicit combinations of the cross rows.
    for (int nu = 1; nu <= n; ++nu) {
      Form fa, fb;
      for (int j = 1; j <= nu; ++j) {
        add(fa, cross_re(j), ((nu - j) % 2 == 0) ? 1 : -1);
        add(fb, cross_im(j), -1);
      }
      if (fa != single('a', nu) || fb != single('b', nu))
        throw std::logic_error("no-go witness: cross-row identity failed");
    }
    // (ii)+(iii) t_nu telescopes down its parity class to the boundary.
    std::map<std::string, long long> multipliers;
    for (int nu = 0; nu <= n + 1; ++nu) {
      Form acc;
      for (int j = nu; j >= 0; j -= 2) {
        add(acc, first(j - 1), 1);
        add(acc, second(j), -1);
        if (j - 1 >= 0) multipliers["first[" + std::to_string(j - 1) + "]"] += 2;
        multipliers["second[" + std::to_string(j) + "]"] -= 2;
      }
      if (acc != single('t', nu)) throw std::logic_error("no-go witness: parity telescoping failed");
    }
    int terms = 0;
    for (const auto& [row, k] : multipliers)
      if (k != 0) ++terms;

    std::vector<std::string> w;
    std::ostringstream head;
    head << "support n = " << n << ": x, s, a, b on 1.." << n << ", t on 0.." << n + 1
         << "; F[k] = x_k - s_k/2 - t_{k-1}/2 and G[k] = x_{k-1} - t_k/2 - s_{k-1}/2 are the"
         << " unitarity norm rows, R[k] = a_k + a_{k-1} and S[k] = b_{k-1} - b_k the cross rows";
    w.push_back(head.str());
    std::ostringstream i;
    i << "(i) forced a = b = 0: a_nu = sum_{j=1..nu} (-1)^(nu-j) R[j] and b_nu = -sum_{j=1..nu} S[j] hold"
      << " identically for nu = 1.." << n << " because a_0 = b_0 = 0 outside the support";
    w.push_back(i.str());
    w.push_back(
        "(ii) parity constancy: t_nu - t_{nu-2} = 2 F[nu-1] - 2 G[nu] identically, so an exact scheme has t"
        " constant on even indices and constant on odd indices");
    w.push_back(
        "(iii) boundary zeros: x and s vanish outside the support, giving t_0 = -2 G[0] and"
        " t_1 = 2 F[0] - 2 G[1]; both parity constants are therefore 0");
    std::ostringstream iv;
    iv << "(iv) conflict: sum_{nu=0.." << n + 1 << "} t_nu equals an integer combination of " << terms
       << " unitarity rows (verified exactly), so every exact scheme has sum t = 0, while normalization of"
       << " chi and chi' requires sum t = 1";
    w.push_back(iv.str());
    return w;
  }

 private:
  int n_;
};

std::vector<std::string> fredholm_witness(const AffineSystem& sys, const RotationParameters& rot) {
  // Residual of the unconstrained least-squares problem: A^T y = 0 and
  // rhs . y = |y|^2, so y > 0 certifies that the equalities are inconsistent
  // even without sign constraints.
  const VectorXd z = sys.A.completeOrthogonalDecomposition().solve(sys.rhs);
  const VectorXd y = sys.rhs - sys.A * z;
  const double gap = sys.rhs.dot(y);
  const double stationarity = (sys.A.transpose() * y).cwiseAbs().maxCoeff();
  std::vector<std::string> w;
  std::ostringstream head;
  head.precision(17);
  head << "rotated pair: delta = |alpha|^2 - |beta|^2 = " << rot.delta << ", |alpha beta| = " << rot.coupling;
  w.push_back(head.str());
  std::ostringstream cert;
  cert.precision(6);
  cert << std::scientific;
  if (gap > 1e-12) {
    cert << "linear obstruction: y = rhs - A z_ls has |A^T y|_inf = " << stationarity << " and rhs . y = " << gap
         << " > 0, so no exact scheme exists";
  } else {
    cert << "no linear obstruction (rhs . y = " << gap << "): the equalities admit an exact solution";
  }
  w.push_back(cert.str());
  return w;
}

InfeasibilityCertificate minimize(int n, const RotationParameters& rot, const NoGoOptions& opts) {
  if (n < 1) throw DomainError("no-go: support size n must be >= 1");
  if (opts.starts < 1) throw DomainError("no-go: at least one start is required");
  const AffineSystem sys = linearize(n, rot);
  const std::vector<bool> mask = nonneg_mask(n);
  const Eigen::Index dim = sys.A.cols();

  Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(n)));
  bool have = false;
  detail::BoundedLsqResult best;
  int best_start = -1;
  detail::BoundedLsqResult best_any;
  for (int k = 0; k < opts.starts; ++k) {
    Rng start_rng(derive_seed(rng(), static_cast<std::uint64_t>(k)));
    VectorXd z0(dim);
    const double scale = 2.0 / (n + 1);
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double u = uniform01(start_rng);
      z0(i) = mask[static_cast<std::size_t>(i)] ? scale * u : scale * (2.0 * u - 1.0);
    }
    detail::BoundedLsqResult r = detail::solve_bounded_lsq(sys.A, sys.rhs, mask, z0, opts.max_iters);
    if (k == 0 || r.objective < best_any.objective) best_any = r;
    if (!r.converged) continue;
    if (!have || r.objective < best.objective) {
      best = std::move(r);
      best_start = k;
      have = true;
    }
  }
  if (!have)
    throw ConvergenceErrorWith<ExactSchemeData>("no-go: no start converged for n = " + std::to_string(n),
                                                unpack(n, best_any.z));

  InfeasibilityCertificate cert;
  cert.n = n;
  cert.best_start = best_start;
  cert.minimizer = unpack(n, best.z);
  cert.min_violation = exact_constraint_residual(cert.minimizer, rot).sum_of_squares();

  // Pinned variant: unitarity rows weighted so their residuals become tiny.
  const std::vector<std::string> ids = row_ids(n);
  MatrixXd aw = sys.A;
  VectorXd bw = sys.rhs;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!ids[i].starts_with("unitarity.")) continue;
    aw.row(static_cast<Eigen::Index>(i)) *= opts.pin_weight;
    bw(static_cast<Eigen::Index>(i)) *= opts.pin_weight;
  }
  const detail::BoundedLsqResult pinned = detail::solve_bounded_lsq(
      aw, bw, mask, best.z, opts.max_iters, detail::LsqSubsolver::kOrthogonal);
  cert.pinned_minimizer = unpack(n, pinned.z);
  cert.pinned_violation = exact_constraint_residual(cert.pinned_minimizer, rot).sum_of_squares();

  if (rot.is_balanced())
    cert.witness = WitnessBuilder(n).build();
  else
    cert.witness = fredholm_witness(sys, rot);
  return cert;
}

}  // namespace

ExactSchemeData ExactSchemeData::zeros(int n) {
  if (n < 1) throw DomainError("exact scheme data: n must be >= 1");
  ExactSchemeData d;
  d.n = n;
  d.x = Sequence::zeros(1, n);
  d.s = Sequence::zeros(1, n);
  d.t = Sequence::zeros(0, n + 1);
  d.a = Sequence::zeros(1, n);
  d.b = Sequence::zeros(1, n);
  return d;
}

void ExactSchemeData::check_windows() const {
  auto expect = [](const Sequence& q, int first, int last, const char* name) {
    if (q.first != first || q.last() != last)
      throw StructuralError(std::string("exact scheme data: sequence ") + name + " must cover " +
                            std::to_string(first) + ".." + std::to_string(last));
  };
  if (n < 1) throw StructuralError("exact scheme data: n must be >= 1");
  expect(x, 1, n, "x");
  expect(s, 1, n, "s");
  expect(t, 0, n + 1, "t");
  expect(a, 1, n, "a");
  expect(b, 1, n, "b");
}

RotationParameters RotationParameters::from_state(const ObjectState& obj) {
  obj.require_normalized("rotated_basis_residual");
  return {std::norm(obj.amp0) - std::norm(obj.amp1), std::abs(obj.amp0) * std::abs(obj.amp1)};
}

bool RotationParameters::is_balanced(double tol) const {
  return std::abs(delta) <= tol && std::abs(coupling - 0.5) <= tol;
}

ConstraintReport exact_constraint_residual(const ExactSchemeData& data) {
  return exact_constraint_residual(data, RotationParameters{});
}

ConstraintReport exact_constraint_residual(const ExactSchemeData& data, const RotationParameters& rot) {
  data.check_windows();
  for (const auto* q : {&data.x, &data.s, &data.t}) {
    for (int nu = q->first; nu <= q->last(); ++nu)
      if ((*q).at(nu) < 0.0)
        throw DomainError("exact_constraint_residual: negative squared norm at sector " + std::to_string(nu));
  }
  std::vector<double> values;
  row_values(data, rot, values);
  const std::vector<std::string> ids = row_ids(data.n);
  ConstraintReport report;
  for (std::size_t i = 0; i < values.size(); ++i) report.add(ids[i], values[i]);
  return report;
}

InfeasibilityCertificate infeasibility_certificate(int n, const NoGoOptions& opts) {
  return minimize(n, RotationParameters{}, opts);
}

InfeasibilityCertificate rotated_basis_residual(int n, const ObjectState& obj, const NoGoOptions& opts) {
  return minimize(n, RotationParameters::from_state(obj), opts);
}

bool parity_constant(const Sequence& t, double tol) {
  for (int parity = 0; parity < 2; ++parity) {
    bool seen = false;
    double lo = 0.0, hi = 0.0;
    for (int nu = t.first; nu <= t.last(); ++nu) {
      if (((nu % 2) + 2) % 2 != parity) continue;
      const double v = t.at(nu);
      lo = seen ? std::min(lo, v) : v;
      hi = seen ? std::max(hi, v) : v;
      seen = true;
    }
    if (seen && hi - lo > tol) return false;
  }
  return true;
}

}  // namespace waylab
