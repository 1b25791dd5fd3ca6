#include "waylab/optimizer.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <future>
#include <limits>
#include <thread>

namespace waylab {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Real parameter vector z = [sigma | tau | rho | x]. The three amplitude
// blocks hold n sectors of d complex numbers each (re, im interleaved):
// sigma on 1..n, tau on 2..n+1, rho on 0..n-1. x_nu = |xi_nu|^2 on 1..n.
class Problem {
 private:
  static auto col(MatrixXc& m, int nu) { return m.col(nu + 1); }
  static auto col(const MatrixXc& m, int nu) { return m.col(nu + 1); }

 public:
  Problem(int n, int d) : n_(n), d_(d), block_(static_cast<Index>(2 * n * d)) {}

  Index size() const { return 3 * block_ + n_; }
  Index rows() const { return 4 * static_cast<Index>(n_) + 4; }
  int n() const { return n_; }
  int d() const { return d_; }

  // Sector-padded copies: column nu + 1 holds sector nu for nu in -1..n+2.
  struct Fields {
    MatrixXc sig, tau, rho;
    VectorXd x;
  };

  Fields unpack(const VectorXd& z) const {
    Fields f{MatrixXc::Zero(d_, n_ + 4), MatrixXc::Zero(d_, n_ + 4), MatrixXc::Zero(d_, n_ + 4), z.tail(n_)};
    for (int k = 0; k < n_; ++k) {
      f.sig.col(k + 2) = sector(z, 0, k);  // nu = k + 1
      f.tau.col(k + 3) = sector(z, 1, k);  // nu = k + 2
      f.rho.col(k + 1) = sector(z, 2, k);  // nu = k
    }
    return f;
  }

  // Inverse of unpack for gradients (entries outside the windows dropped).
  VectorXd pack(const Fields& g) const {
    VectorXd z(size());
    for (int k = 0; k < n_; ++k) {
      put(z, 0, k, g.sig.col(k + 2));
      put(z, 1, k, g.tau.col(k + 3));
      put(z, 2, k, g.rho.col(k + 1));
    }
    z.tail(n_) = g.x;
    return z;
  }

  VectorXd from_scheme(const ApproxScheme& s) const {
    VectorXd z(size());
    for (int k = 0; k < n_; ++k) {
      put(z, 0, k, s.sigma.sector(k + 1));
      put(z, 1, k, s.tau.sector(k + 2));
      put(z, 2, k, s.rho.sector(k));
    }
    for (int nu = 1; nu <= n_; ++nu) z(size() - n_ + nu - 1) = s.xi.sector_squared_norm(nu);
    return z;
  }

  ApproxScheme to_scheme(const VectorXd& z) const {
    const Fields f = unpack(z);
    ApproxScheme s;
    s.n = n_;
    s.d = d_;
    s.xi = s.sigma = s.tau = s.rho = GradedVector(d_);
    for (int nu = 1; nu <= n_; ++nu) {
      VectorXc xi = VectorXc::Zero(d_);
      xi(0) = std::sqrt(std::max(0.0, f.x(nu - 1)));
      s.xi.set(nu, xi);
      s.sigma.set(nu, f.sig.col(nu + 1));
    }
    for (int nu = 2; nu <= n_ + 1; ++nu) s.tau.set(nu, f.tau.col(nu + 1));
    for (int nu = 0; nu <= n_ - 1; ++nu) s.rho.set(nu, f.rho.col(nu + 1));
    s.c = s.sigma.squared_norm() / n_;
    s.cprime = s.rho.squared_norm() / n_;
    return s;
  }

  double objective(const Fields& f) const { return 0.25 * (f.tau - f.rho).squaredNorm(); }

  void objective_gradient(const Fields& f, Fields& g) const {
    const MatrixXc diff = 0.5 * (f.tau - f.rho);
    g.tau += diff;
    g.rho -= diff;
  }

  // Constraint rows, in order:
  //   orthogonality nu = 2..n (re, im), normalization via rho nu = 1..n,
  //   normalization via tau nu = 1..n, xi norm, pointer orthogonality,
  //   eta/sigma (re, im), eta/sum (re, im).
  VectorXd residuals(const Fields& f) const {
    VectorXd c(rows());
    Index r = 0;
    for (int nu = 2; nu <= n_; ++nu) {
      const Complex o = col(f.sig, nu).dot(col(f.tau, nu)) + col(f.rho, nu - 1).dot(col(f.sig, nu - 1));
      c(r++) = o.real();
      c(r++) = o.imag();
    }
    for (int nu = 1; nu <= n_; ++nu)
      c(r++) = f.x(nu - 1) - col(f.sig, nu).squaredNorm() - col(f.rho, nu - 1).squaredNorm();
    for (int nu = 1; nu <= n_; ++nu)
      c(r++) = f.x(nu - 1) - col(f.sig, nu).squaredNorm() - col(f.tau, nu + 1).squaredNorm();
    c(r++) = f.x.sum() - 1.0;
    c(r++) = 4.0 * f.sig.squaredNorm() - (f.rho + f.tau).squaredNorm();
    const MatrixXc diff = f.tau - f.rho;
    const MatrixXc sum = f.tau + f.rho;
    const Complex es = frob_dot(f.sig, diff);
    const Complex ed = frob_dot(sum, diff);
    c(r++) = es.real();
    c(r++) = es.imag();
    c(r++) = ed.real();
    c(r++) = ed.imag();
    return c;
  }

  // g += sum_i w_i grad c_i. For C = u^H v with weights (w_re, w_im) on its
  // real and imaginary part, the gradient with respect to u (as re + i im) is
  // conj(W) v and with respect to v it is W u, where W = w_re + i w_im.
  void accumulate(const Fields& f, const VectorXd& w, Fields& g) const {
    Index r = 0;
    for (int nu = 2; nu <= n_; ++nu) {
      const Complex W(w(r), w(r + 1));
      r += 2;
      col(g.sig, nu) += std::conj(W) * col(f.tau, nu);
      col(g.tau, nu) += W * col(f.sig, nu);
      col(g.rho, nu - 1) += std::conj(W) * col(f.sig, nu - 1);
      col(g.sig, nu - 1) += W * col(f.rho, nu - 1);
    }
    for (int nu = 1; nu <= n_; ++nu, ++r) {
      g.x(nu - 1) += w(r);
      col(g.sig, nu) -= 2.0 * w(r) * col(f.sig, nu);
      col(g.rho, nu - 1) -= 2.0 * w(r) * col(f.rho, nu - 1);
    }
    for (int nu = 1; nu <= n_; ++nu, ++r) {
      g.x(nu - 1) += w(r);
      col(g.sig, nu) -= 2.0 * w(r) * col(f.sig, nu);
      col(g.tau, nu + 1) -= 2.0 * w(r) * col(f.tau, nu + 1);
    }
    g.x.array() += w(r++);
    {
      const double wp = w(r++);
      g.sig += 8.0 * wp * f.sig;
      const MatrixXc u = f.rho + f.tau;
      g.rho -= 2.0 * wp * u;
      g.tau -= 2.0 * wp * u;
    }
    const MatrixXc diff = f.tau - f.rho;
    const MatrixXc sum = f.tau + f.rho;
    {
      const Complex W(w(r), w(r + 1));
      r += 2;
      g.sig += std::conj(W) * diff;
      const MatrixXc gv = W * f.sig;
      g.tau += gv;
      g.rho -= gv;
    }
    {
      const Complex W(w(r), w(r + 1));
      r += 2;
      const MatrixXc gu = std::conj(W) * diff;
      const MatrixXc gv = W * sum;
      g.tau += gu + gv;
      g.rho += gu - gv;
    }
  }

  Fields zero_fields() const {
    return {MatrixXc::Zero(d_, n_ + 4), MatrixXc::Zero(d_, n_ + 4), MatrixXc::Zero(d_, n_ + 4),
            VectorXd::Zero(n_)};
  }

  MatrixXd jacobian(const Fields& f) const {
    MatrixXd J(rows(), size());
    VectorXd w = VectorXd::Zero(rows());
    for (Index i = 0; i < rows(); ++i) {
      w(i) = 1.0;
      Fields g = zero_fields();
      accumulate(f, w, g);
      J.row(i) = pack(g).transpose();
      w(i) = 0.0;
    }
    return J;
  }

 private:
  static Complex frob_dot(const MatrixXc& a, const MatrixXc& b) {
    return (a.adjoint() * b).trace();
  }

  VectorXc sector(const VectorXd& z, int blk, int k) const {
    VectorXc v(d_);
    const Index base = blk * block_ + 2 * static_cast<Index>(k) * d_;
    for (int j = 0; j < d_; ++j) v(j) = Complex(z(base + 2 * j), z(base + 2 * j + 1));
    return v;
  }
  template <typename V>
  void put(VectorXd& z, int blk, int k, const V& v) const {
    const Index base = blk * block_ + 2 * static_cast<Index>(k) * d_;
    for (int j = 0; j < d_; ++j) {
      z(base + 2 * j) = v(j).real();
      z(base + 2 * j + 1) = v(j).imag();
    }
  }

  int n_, d_;
  Index block_;
};

struct Penalized {
  const Problem& p;
  double mu;

  double operator()(const VectorXd& z, VectorXd& grad) const {
    const Problem::Fields f = p.unpack(z);
    const VectorXd c = p.residuals(f);
    Problem::Fields g = p.zero_fields();
    p.objective_gradient(f, g);
    p.accumulate(f, 2.0 * mu * c, g);
    grad = p.pack(g);
    return p.objective(f) + mu * c.squaredNorm();
  }
};

// Limited-memory BFGS with backtracking (Armijo) line search. Stops when the
// gradient vanishes, when `window` consecutive iterations improve f by less
// than ftol in total, or after max_iters.
template <typename F>
int lbfgs(const F& fn, VectorXd& z, int max_iters, double ftol) {
  constexpr int kMemory = 12;
  constexpr int kWindow = 25;
  std::deque<VectorXd> S, Y;
  std::deque<double> rhos;
  VectorXd g;
  double f = fn(z, g);
  std::deque<double> history{f};
  int it = 0;
  for (; it < max_iters; ++it) {
    if (g.lpNorm<Eigen::Infinity>() < 1e-15) break;
    // two-loop recursion
    VectorXd q = g;
    std::vector<double> alpha(S.size());
    for (int i = static_cast<int>(S.size()) - 1; i >= 0; --i) {
      alpha[static_cast<std::size_t>(i)] = rhos[static_cast<std::size_t>(i)] * S[static_cast<std::size_t>(i)].dot(q);
      q -= alpha[static_cast<std::size_t>(i)] * Y[static_cast<std::size_t>(i)];
    }
    if (!S.empty()) q *= S.back().dot(Y.back()) / Y.back().squaredNorm();
    else q /= std::max(1.0, g.norm());
    for (std::size_t i = 0; i < S.size(); ++i) {
      const double beta = rhos[i] * Y[i].dot(q);
      q += (alpha[i] - beta) * S[i];
    }
    VectorXd dir = -q;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      S.clear();
      Y.clear();
      rhos.clear();
      dir = -g / std::max(1.0, g.norm());
      slope = g.dot(dir);
    }
    double step = 1.0;
    VectorXd zn, gn;
    double fn_val = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      zn = z + step * dir;
      fn_val = fn(zn, gn);
      if (std::isfinite(fn_val) && fn_val <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    VectorXd s = zn - z;
    VectorXd y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      S.push_back(std::move(s));
      Y.push_back(std::move(y));
      rhos.push_back(1.0 / sy);
      if (S.size() > kMemory) {
        S.pop_front();
        Y.pop_front();
        rhos.pop_front();
      }
    }
    z = std::move(zn);
    g = std::move(gn);
    f = fn_val;
    history.push_back(f);
    if (history.size() > kWindow + 1) history.pop_front();
    if (history.size() == kWindow + 1 && history.front() - f <= ftol) {
      ++it;
      break;
    }
  }
  return it;
}

// Gauss-Newton steps toward the constraint set with minimum-norm updates.
int polish(const Problem& p, VectorXd& z, double target, int max_steps) {
  int steps = 0;
  double cur = p.residuals(p.unpack(z)).lpNorm<Eigen::Infinity>();
  for (; steps < max_steps && cur > target; ++steps) {
    const Problem::Fields f = p.unpack(z);
    const VectorXd c = p.residuals(f);
    const MatrixXd J = p.jacobian(f);
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(J);
    cod.setThreshold(1e-10);
    const VectorXd dz = cod.solve(c);
    const VectorXd zn = z - dz;
    const double next = p.residuals(p.unpack(zn)).lpNorm<Eigen::Infinity>();
    if (!(next < cur)) break;
    z = zn;
    cur = next;
  }
  return steps;
}

struct Candidate {
  ApproxScheme scheme;
  double error = std::numeric_limits<double>::infinity();
  double residual = std::numeric_limits<double>::infinity();
  int iters = 0;
  int start = -1;
};

Candidate run_start(const Problem& p, VectorXd z, const OptimizerOptions& opts, int start) {
  Candidate cand;
  cand.start = start;
  for (double mu : {1e1, 1e2, 1e3, 1e4, 1e5}) {
    cand.iters += lbfgs(Penalized{p, mu}, z, opts.max_iters, opts.tol_objective * 1e-2);
  }
  cand.iters += polish(p, z, 1e-3 * opts.tol_constraint, 50);
  cand.scheme = p.to_scheme(z);
  cand.error = scheme_error(cand.scheme);
  cand.residual = validate_scheme(cand.scheme).max_residual();
  return cand;
}

VectorXd random_start(const Problem& p, Rng& rng) {
  VectorXd z(p.size());
  const double amp = 1.0 / std::sqrt(static_cast<double>(p.n()));
  for (Index i = 0; i < z.size(); ++i) z(i) = amp * (2.0 * uniform01(rng) - 1.0);
  z.tail(p.n()).setConstant(1.0 / p.n());
  return z;
}

}  // namespace

void OptimizerOptions::check() const {
  if (max_iters < 1 || starts < 1 || !(tol_constraint > 0.0) || !(tol_objective > 0.0))
    throw DomainError("optimizer options: max_iters, starts and tolerances must be positive");
}

OptimizationResult optimize_scheme_detailed(int n, int d, const OptimizerOptions& opts) {
  if (n < 2) throw DomainError("optimize_scheme: n must be >= 2");
  if (d < 2) throw StructuralError("optimize_scheme: sector dimension d must be >= 2");
  opts.check();
  const Problem p(n, d);

  Candidate best;
  best.scheme = build_wigner_scheme(n, d);
  best.error = scheme_error(best.scheme);
  best.residual = validate_scheme(best.scheme).max_residual();
  best.start = 0;
  const bool canonical_ok = best.residual <= opts.tol_constraint;
  Candidate fallback = best;  // lowest residual seen, for diagnostics
  bool have = canonical_ok;

  Rng master(derive_seed(opts.seed, static_cast<std::uint64_t>(n)));
  for (int k = 0; k < opts.starts; ++k) {
    Rng rng(derive_seed(master(), static_cast<std::uint64_t>(k)));
    VectorXd z0 = k == 0 ? p.from_scheme(best.scheme) : random_start(p, rng);
    Candidate c = run_start(p, std::move(z0), opts, k);
    if (c.residual < fallback.residual) fallback = c;
    if (!(c.residual <= opts.tol_constraint)) continue;
    // Ties keep the earlier start so the canonical scheme wins when nothing improves.
    if (!have || c.error < best.error) {
      best = std::move(c);
      have = true;
    }
  }
  if (!have)
    throw ConvergenceErrorWith<ApproxScheme>(
        "optimize_scheme: no candidate reached constraint tolerance " + std::to_string(opts.tol_constraint) +
            " for n = " + std::to_string(n) + " (best residual " + std::to_string(fallback.residual) + ")",
        fallback.scheme);
  return {std::move(best.scheme), best.error, best.residual, best.iters, best.start};
}

SweepTable sweep(const std::vector<int>& n_values, int d, const OptimizerOptions& opts, unsigned threads) {
  if (n_values.empty()) throw DomainError("sweep: n_values is empty");
  for (int n : n_values)
    if (n < 2) throw DomainError("sweep: every n must be >= 2");
  opts.check();

  auto row_for = [&](int n) {
    SweepRow row;
    row.n = n;
    row.error_wigner = canonical_weights(n).cprime.to_double();
    OptimizerOptions o = opts;
    o.seed = derive_seed(opts.seed, static_cast<std::uint64_t>(n));
    try {
      const OptimizationResult r = optimize_scheme_detailed(n, d, o);
      row.error_optimized = r.error;
      row.constraint_residual = r.constraint_residual;
      row.iters = r.iters;
    } catch (const std::exception& e) {
      row.error_optimized = std::numeric_limits<double>::quiet_NaN();
      row.constraint_residual = std::numeric_limits<double>::quiet_NaN();
      row.annotation = e.what();
    }
    return row;
  };

  SweepTable table;
  table.rows.resize(n_values.size());
  unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(n_values.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n_values.size(); ++i) table.rows[i] = row_for(n_values[i]);
    return table;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n_values.size();) table.rows[i] = row_for(n_values[i]);
    });
  for (auto& t : pool) t.join();
  return table;
}

ScalingFit fit_scaling(const SweepTable& table) {
  if (table.rows.size() < 3) throw DomainError("fit_scaling: need at least 3 rows");
  const auto m = static_cast<Index>(table.rows.size());
  VectorXd lx(m), ly(m);
  for (Index i = 0; i < m; ++i) {
    const SweepRow& r = table.rows[static_cast<std::size_t>(i)];
    if (!(r.error_optimized > 0.0) || r.n <= 0)
      throw DomainError("fit_scaling: row n = " + std::to_string(r.n) + " has a nonpositive error");
    lx(i) = std::log(static_cast<double>(r.n));
    ly(i) = std::log(r.error_optimized);
  }
  const double mx = lx.mean(), my = ly.mean();
  const VectorXd dx = lx.array() - mx, dy = ly.array() - my;
  const double sxx = dx.squaredNorm();
  if (!(sxx > 0.0)) throw DomainError("fit_scaling: all n are equal");
  ScalingFit fit;
  fit.slope = dx.dot(dy) / sxx;
  fit.intercept = my - fit.slope * mx;
  const double ss_res = (dy - fit.slope * dx).squaredNorm();
  const double ss_tot = dy.squaredNorm();
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace waylab
