#include "instances.hpp"

#include <cmath>

namespace oracle {

namespace {

double gauss(std::mt19937_64& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }
double uniform(std::mt19937_64& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
Complex phase(std::mt19937_64& rng) { return std::polar(1.0, uniform(rng, 0.0, 2.0 * M_PI)); }

waylab::GradedVector single(int dim, int nu, const VectorXc& v) {
  waylab::GradedVector g(dim);
  g.set(nu, v);
  return g;
}

}  // namespace

VectorXc random_vector(std::mt19937_64& rng, int dim) {
  VectorXc v(dim);
  for (int i = 0; i < dim; ++i) v(i) = Complex(gauss(rng), gauss(rng));
  return v;
}

MatrixXc random_unitary(std::mt19937_64& rng, int dim) {
  MatrixXc a(dim, dim);
  for (int j = 0; j < dim; ++j) a.col(j) = random_vector(rng, dim);
  Eigen::HouseholderQR<MatrixXc> qr(a);
  MatrixXc q = qr.householderQ();
  const MatrixXc r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) q.col(j) *= r(j, j) / std::abs(r(j, j));
  return q;
}

waylab::BlockMap random_isometry(std::mt19937_64& rng, int joint_dim, int lo, int hi) {
  waylab::BlockMap m(joint_dim);
  for (int total = lo; total <= hi; ++total) {
    const int cols = std::uniform_int_distribution<int>(1, joint_dim)(rng);
    MatrixXc dom(joint_dim, cols);
    for (int j = 0; j < cols; ++j) dom.col(j) = random_vector(rng, joint_dim);
    const MatrixXc img = random_unitary(rng, joint_dim) * dom;
    m.add_block(total, dom, img);
  }
  return m;
}

waylab::GradedVector random_domain_vector(std::mt19937_64& rng, const waylab::BlockMap& m) {
  waylab::GradedVector v(m.joint_dim());
  for (const auto& [total, blk] : m.blocks())
    v.set(total, blk.domain * random_vector(rng, static_cast<int>(blk.domain.cols())));
  return v;
}

BranchPair random_clean_branches(std::mt19937_64& rng, int pattern, int object_dim, int apparatus_dim) {
  // The unitary sends psi_0 xi -> A (total charge 0) and psi_1 xi -> B
  // (total 1) with |A| = |B| = 1; branches are (A +- B)/sqrt2. Product form
  // forces a shared factor on one side.
  BranchPair out;
  out.pattern = pattern;
  const double h = 1.0 / std::sqrt(2.0);
  const double w = uniform(rng, 0.2, 5.0);  // factor rescaling
  const double wm = uniform(rng, 0.2, 5.0);
  if (pattern == 1) {
    // A = phi_0 chi, B = phi_1 chi: object charges {0,1}, apparatus sharp at 0.
    const VectorXc chi = random_vector(rng, apparatus_dim).normalized();
    const VectorXc p0 = random_vector(rng, object_dim).normalized();
    const VectorXc p1 = random_vector(rng, object_dim).normalized();
    waylab::GradedVector plus_obj(object_dim), minus_obj(object_dim);
    plus_obj.set(0, h * w * p0);
    plus_obj.set(1, h * w * p1);
    minus_obj.set(0, h * wm * p0);
    minus_obj.set(1, -h * wm * p1);
    out.plus = {plus_obj, single(apparatus_dim, 0, chi / w)};
    out.minus = {minus_obj, single(apparatus_dim, 0, chi / wm)};
  } else {
    // A = phi chi_0, B = phi chi_1: object sharp at 0, apparatus charges {0,1}.
    const VectorXc phi = random_vector(rng, object_dim).normalized();
    const VectorXc c0 = random_vector(rng, apparatus_dim).normalized();
    const VectorXc c1 = random_vector(rng, apparatus_dim).normalized();
    const Complex g = phase(rng);
    waylab::GradedVector plus_app(apparatus_dim), minus_app(apparatus_dim);
    plus_app.set(0, h * c0 / (w * g));
    plus_app.set(1, h * c1 / (w * g));
    minus_app.set(0, h * c0 / wm);
    minus_app.set(1, -h * c1 / wm);
    out.plus = {single(object_dim, 0, w * g * phi), plus_app};
    out.minus = {single(object_dim, 0, wm * phi), minus_app};
  }
  return out;
}

waylab::Observable random_observable(std::mt19937_64& rng, int dim) {
  const MatrixXc u = random_unitary(rng, dim);
  waylab::Observable obs;
  int at = 0;
  while (at < dim) {
    const int k = std::uniform_int_distribution<int>(1, dim - at)(rng);
    obs.eigenspaces.push_back(u.middleCols(at, k));
    obs.eigenvalues.push_back(static_cast<double>(obs.eigenvalues.size()) + uniform(rng, 0.0, 0.5));
    at += k;
  }
  return obs;
}

}  // namespace oracle
