#pragma once

// Charge-graded complex vectors and conservation-respecting linear maps.
//
// A GradedVector stores one amplitude block of fixed dimension d per sector
// index nu (the eigenvalue of the conserved quantity, in units of its
// quantum). Absent sectors are zero. Joint object+apparatus states use the
// layout produced by tensor(): the total-charge-N sector has dimension 2d,
// rows [0, d) hold object charge 0 with apparatus sector N and rows [d, 2d)
// hold object charge 1 with apparatus sector N - 1.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "waylab/errors.hpp"
#include "waylab/report.hpp"

namespace waylab {

template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

using Complex = std::complex<double>;
using VectorXc = CVector<double>;
using MatrixXc = CMatrix<double>;

inline constexpr double kDefaultTolerance = 1e-10;

template <typename Real>
class BasicGradedVector {
 public:
  using RealScalar = Real;
  using Scalar = std::complex<Real>;
  using Block = CVector<Real>;
  using SectorMap = std::map<int, Block>;

  explicit BasicGradedVector(int d = 2) : d_(d) {
    if (d < 1) throw StructuralError("graded vector: sector dimension must be >= 1");
  }

  // amp * e_k in sector nu.
  static BasicGradedVector basis(int d, int nu, int k, Scalar amp = Scalar(1)) {
    BasicGradedVector v(d);
    if (k < 0 || k >= d) throw StructuralError("graded vector: basis index out of range");
    Block b = Block::Zero(d);
    b(k) = amp;
    v.set(nu, std::move(b));
    return v;
  }

  int dim() const noexcept { return d_; }
  const SectorMap& sectors() const noexcept { return sectors_; }
  bool empty() const noexcept { return sectors_.empty(); }
  bool contains(int nu) const { return sectors_.count(nu) != 0; }

  const Block* find(int nu) const {
    auto it = sectors_.find(nu);
    return it == sectors_.end() ? nullptr : &it->second;
  }

  Block sector(int nu) const {
    const Block* b = find(nu);
    return b ? *b : Block(Block::Zero(d_));
  }

  void set(int nu, Block v) {
    if (v.size() != d_)
      throw StructuralError("graded vector: sector " + std::to_string(nu) + " has dimension " +
                            std::to_string(v.size()) + ", expected " + std::to_string(d_));
    sectors_[nu] = std::move(v);
  }

  void accumulate(int nu, const Block& v) {
    if (v.size() != d_)
      throw StructuralError("graded vector: sector " + std::to_string(nu) + " dimension mismatch");
    auto [it, inserted] = sectors_.try_emplace(nu, v);
    if (!inserted) it->second += v;
  }

  void erase(int nu) { sectors_.erase(nu); }

  Real sector_squared_norm(int nu) const {
    const Block* b = find(nu);
    return b ? b->squaredNorm() : Real(0);
  }

  Real squared_norm() const {
    Real s(0);
    for (const auto& [nu, b] : sectors_) s += b.squaredNorm();
    return s;
  }
  Real norm() const { return std::sqrt(squared_norm()); }

  // Smallest / largest sector carrying squared norm above tol.
  std::pair<int, int> support(Real tol = Real(0)) const {
    bool any = false;
    int lo = 0, hi = 0;
    for (const auto& [nu, b] : sectors_) {
      if (b.squaredNorm() <= tol * tol) continue;
      if (!any) lo = nu;
      hi = nu;
      any = true;
    }
    if (!any) throw DomainError("graded vector: empty support");
    return {lo, hi};
  }

  // Copy with sectors of norm <= tol removed.
  BasicGradedVector pruned(Real tol = Real(0)) const {
    BasicGradedVector out(d_);
    for (const auto& [nu, b] : sectors_)
      if (b.norm() > tol) out.sectors_.emplace(nu, b);
    return out;
  }

  BasicGradedVector& operator+=(const BasicGradedVector& o) {
    require_same_dim(o);
    for (const auto& [nu, b] : o.sectors_) accumulate(nu, b);
    return *this;
  }
  BasicGradedVector& operator-=(const BasicGradedVector& o) {
    require_same_dim(o);
    for (const auto& [nu, b] : o.sectors_) accumulate(nu, -b);
    return *this;
  }
  BasicGradedVector& operator*=(Scalar a) {
    for (auto& [nu, b] : sectors_) b *= a;
    return *this;
  }

  void require_same_dim(const BasicGradedVector& o) const {
    if (o.d_ == d_) return;
    int nu = !o.sectors_.empty() ? o.sectors_.begin()->first
                                 : (!sectors_.empty() ? sectors_.begin()->first : 0);
    throw StructuralError("graded vector: dimension mismatch in sector " + std::to_string(nu) +
                          " (" + std::to_string(d_) + " vs " + std::to_string(o.d_) + ")");
  }

 private:
  int d_;
  SectorMap sectors_;
};

using GradedVector = BasicGradedVector<double>;

template <typename Real>
BasicGradedVector<Real> operator+(BasicGradedVector<Real> a, const BasicGradedVector<Real>& b) {
  a += b;
  return a;
}
template <typename Real>
BasicGradedVector<Real> operator-(BasicGradedVector<Real> a, const BasicGradedVector<Real>& b) {
  a -= b;
  return a;
}
template <typename Real>
BasicGradedVector<Real> operator-(BasicGradedVector<Real> a) {
  a *= std::complex<Real>(-1);
  return a;
}
template <typename Real>
BasicGradedVector<Real> operator*(std::complex<Real> s, BasicGradedVector<Real> a) {
  a *= s;
  return a;
}
template <typename Real>
BasicGradedVector<Real> operator*(Real s, BasicGradedVector<Real> a) {
  a *= std::complex<Real>(s);
  return a;
}
template <typename Real>
BasicGradedVector<Real> operator*(BasicGradedVector<Real> a, Real s) {
  a *= std::complex<Real>(s);
  return a;
}

/// Hermitian scalar product, conjugate-linear in the first argument.
template <typename Real>
std::complex<Real> inner(const BasicGradedVector<Real>& u, const BasicGradedVector<Real>& v) {
  u.require_same_dim(v);
  std::complex<Real> acc(0);
  const auto& small = u.sectors().size() <= v.sectors().size() ? u.sectors() : v.sectors();
  for (const auto& [nu, block] : small) {
    const auto* a = u.find(nu);
    const auto* b = v.find(nu);
    if (a && b) acc += a->dot(*b);  // Eigen's dot conjugates the left operand
  }
  return acc;
}

// Equality up to absent-vs-explicit-zero sectors.
template <typename Real>
bool approx_equal(const BasicGradedVector<Real>& u, const BasicGradedVector<Real>& v,
                  Real tol = Real(kDefaultTolerance)) {
  if (u.dim() != v.dim()) return false;
  return (u - v).norm() <= tol;
}

template <typename Real>
Real charge_expectation(const BasicGradedVector<Real>& v) {
  const Real total = v.squared_norm();
  if (!(total > Real(0))) throw DomainError("charge_expectation: zero vector");
  Real acc(0);
  for (const auto& [nu, b] : v.sectors()) acc += Real(nu) * b.squaredNorm();
  return acc / total;
}

/// State a0*psi_0 + a1*psi_1 of the two-level measured object; psi_k carries
/// k units of the conserved quantity.
template <typename Real>
struct BasicObjectState {
  std::complex<Real> amp0{1};
  std::complex<Real> amp1{0};

  Real squared_norm() const { return std::norm(amp0) + std::norm(amp1); }
  bool is_normalized(Real tol = Real(kDefaultTolerance)) const {
    return std::abs(squared_norm() - Real(1)) <= tol;
  }
  void require_normalized(const char* where, Real tol = Real(kDefaultTolerance)) const {
    if (!is_normalized(tol))
      throw DomainError(std::string(where) + ": object state is not normalized (|a0|^2+|a1|^2 = " +
                        std::to_string(static_cast<double>(squared_norm())) + ")");
  }

  // (psi_0 + sign*psi_1)/sqrt(2)
  static BasicObjectState balanced(int sign) {
    const Real h = Real(1) / std::sqrt(Real(2));
    return {std::complex<Real>(h), std::complex<Real>(sign < 0 ? -h : h)};
  }
};

using ObjectState = BasicObjectState<double>;

/// Joint grading: object charge k in {0,1} plus apparatus sector.
template <typename Real>
BasicGradedVector<Real> tensor(const BasicObjectState<Real>& obj, const BasicGradedVector<Real>& app) {
  const int d = app.dim();
  BasicGradedVector<Real> out(2 * d);
  for (const auto& [nu, b] : app.sectors()) {
    if (obj.amp0 != std::complex<Real>(0)) {
      CVector<Real> slot = CVector<Real>::Zero(2 * d);
      slot.head(d) = obj.amp0 * b;
      out.accumulate(nu, slot);
    }
    if (obj.amp1 != std::complex<Real>(0)) {
      CVector<Real> slot = CVector<Real>::Zero(2 * d);
      slot.tail(d) = obj.amp1 * b;
      out.accumulate(nu + 1, slot);
    }
  }
  return out;
}

// Apparatus block of a joint vector for a given object charge (0 or 1) in
// total sector N.
template <typename Real>
CVector<Real> object_slot(const BasicGradedVector<Real>& joint, int total, int object_charge) {
  const int d = joint.dim() / 2;
  const auto* b = joint.find(total);
  if (b == nullptr) return CVector<Real>::Zero(d);
  return b->segment(object_charge * d, d);
}

// Amplitudes (c0, c1) with (I (x) |p><p|) joint = tensor((c0, c1), p) for a
// unit apparatus vector p.
template <typename Real>
BasicObjectState<Real> pointer_amplitudes(const BasicGradedVector<Real>& joint,
                                          const BasicGradedVector<Real>& pointer) {
  if (joint.dim() != 2 * pointer.dim())
    throw StructuralError("pointer_amplitudes: joint dimension must be twice the pointer dimension");
  BasicObjectState<Real> c{std::complex<Real>(0), std::complex<Real>(0)};
  for (const auto& [nu, p] : pointer.sectors()) {
    c.amp0 += p.dot(object_slot(joint, nu, 0));
    c.amp1 += p.dot(object_slot(joint, nu + 1, 1));
  }
  return c;
}

/// Linear map commuting with the conserved quantity, stored block by block:
/// within total sector N it sends each domain column to the matching image
/// column. The map is only defined on the span of the domain columns.
template <typename Real>
class BasicBlockMap {
 public:
  using Matrix = CMatrix<Real>;
  using Vector = CVector<Real>;

  struct Block {
    Matrix domain;
    Matrix image;
    std::vector<std::string> labels;
  };

  explicit BasicBlockMap(int joint_dim) : joint_dim_(joint_dim) {
    if (joint_dim < 1) throw StructuralError("block map: joint dimension must be >= 1");
  }

  int joint_dim() const noexcept { return joint_dim_; }
  const std::map<int, Block>& blocks() const noexcept { return blocks_; }

  void add_block(int total_charge, Matrix domain, Matrix image, std::vector<std::string> labels = {}) {
    if (domain.rows() != joint_dim_ || image.rows() != joint_dim_)
      throw StructuralError("block map: block " + std::to_string(total_charge) +
                            " rows differ from the joint dimension");
    if (domain.cols() != image.cols())
      throw StructuralError("block map: block " + std::to_string(total_charge) +
                            " has mismatched domain/image column counts");
    if (labels.empty())
      for (Eigen::Index j = 0; j < domain.cols(); ++j) labels.push_back("col" + std::to_string(j));
    if (static_cast<Eigen::Index>(labels.size()) != domain.cols())
      throw StructuralError("block map: label count differs from column count");
    if (blocks_.count(total_charge))
      throw StructuralError("block map: duplicate block " + std::to_string(total_charge));
    blocks_.emplace(total_charge, Block{std::move(domain), std::move(image), std::move(labels)});
  }

  // Image of a joint vector lying in the declared domain.
  BasicGradedVector<Real> apply(const BasicGradedVector<Real>& in, Real tol = Real(kDefaultTolerance)) const {
    if (in.dim() != joint_dim_) throw StructuralError("block map: input dimension mismatch");
    BasicGradedVector<Real> out(joint_dim_);
    for (const auto& [total, v] : in.sectors()) {
      auto it = blocks_.find(total);
      if (it == blocks_.end()) {
        if (v.norm() > tol)
          throw DomainError("block map: input has weight in sector " + std::to_string(total) +
                            " which has no block");
        continue;
      }
      const Block& blk = it->second;
      Vector coeff = blk.domain.completeOrthogonalDecomposition().solve(v);
      const Real miss = (blk.domain * coeff - v).norm();
      if (miss > tol * std::max(Real(1), v.norm()))
        throw DomainError("block map: input leaves the declared domain in sector " +
                          std::to_string(total));
      out.set(total, blk.image * coeff);
    }
    return out;
  }

 private:
  int joint_dim_;
  std::map<int, Block> blocks_;
};

using BlockMap = BasicBlockMap<double>;

/// Residuals certifying that a block map commutes with the conserved
/// quantity ("grading") and is an isometry on its domain ("isometry[N]",
/// max-abs entry of image Gram minus domain Gram).
template <typename Real>
ConstraintReport check_conserving(const BasicBlockMap<Real>& m) {
  ConstraintReport report;
  Real leakage(0);
  for (const auto& [total, blk] : m.blocks()) {
    const Eigen::Index extra = blk.image.rows() - m.joint_dim();
    if (extra > 0) leakage = std::max(leakage, blk.image.bottomRows(extra).norm());
  }
  report.add("grading", static_cast<double>(leakage));
  for (const auto& [total, blk] : m.blocks()) {
    const CMatrix<Real> g_dom = blk.domain.adjoint() * blk.domain;
    const CMatrix<Real> g_img = blk.image.adjoint() * blk.image;
    const Real defect = blk.domain.cols() == 0 ? Real(0) : (g_img - g_dom).cwiseAbs().maxCoeff();
    report.add("isometry[" + std::to_string(total) + "]", static_cast<double>(defect));
  }
  return report;
}

template <typename Real>
CMatrix<Real> gram(const std::vector<BasicGradedVector<Real>>& vs) {
  const auto k = static_cast<Eigen::Index>(vs.size());
  CMatrix<Real> g(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) g(i, j) = inner(vs[i], vs[j]);
  return g;
}

/// Gram matrix of the inputs and of their images. For an isometric map the
/// two agree, so orthogonality of the outputs forces orthogonality of the
/// inputs.
template <typename Real>
std::pair<CMatrix<Real>, CMatrix<Real>> orthogonality_transfer_check(
    const BasicBlockMap<Real>& m, const std::vector<BasicGradedVector<Real>>& inputs,
    Real tol = Real(kDefaultTolerance)) {
  std::vector<BasicGradedVector<Real>> images;
  images.reserve(inputs.size());
  for (const auto& v : inputs) images.push_back(m.apply(v, tol));
  return {gram(inputs), gram(images)};
}

/// Unitary W on the joint sector with W * domain == image, built by
/// Gram-Schmidt over the domain columns (in order) and then over the
/// standard basis vectors (in order). Requires an isometric block.
template <typename Real>
CMatrix<Real> unitary_completion(const typename BasicBlockMap<Real>::Block& blk,
                                 Real tol = Real(kDefaultTolerance)) {
  const Eigen::Index m = blk.domain.rows();
  std::vector<CVector<Real>> es, fs;
  auto reduce = [&](CVector<Real> w, CVector<Real> wf) {
    for (std::size_t i = 0; i < es.size(); ++i) {
      const std::complex<Real> c = es[i].dot(w);
      w -= c * es[i];
      wf -= c * fs[i];
    }
    return std::pair{std::move(w), std::move(wf)};
  };
  for (Eigen::Index j = 0; j < blk.domain.cols(); ++j) {
    auto [w, wf] = reduce(blk.domain.col(j), blk.image.col(j));
    const Real len = w.norm();
    if (len <= tol) continue;
    es.push_back(w / len);
    fs.push_back(wf / len);
  }
  const std::size_t rank = es.size();
  auto extend = [&](std::vector<CVector<Real>>& basis) {
    for (Eigen::Index k = 0; k < m && static_cast<Eigen::Index>(basis.size()) < m; ++k) {
      CVector<Real> w = CVector<Real>::Unit(m, k);
      for (const auto& b : basis) w -= b.dot(w) * b;
      for (const auto& b : basis) w -= b.dot(w) * b;  // second pass for stability
      const Real len = w.norm();
      if (len > Real(1e-8)) basis.push_back(w / len);
    }
  };
  extend(es);
  std::vector<CVector<Real>> fs_full(fs.begin(), fs.begin() + static_cast<std::ptrdiff_t>(rank));
  extend(fs_full);
  CMatrix<Real> E(m, m), F(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    E.col(i) = es[static_cast<std::size_t>(i)];
    F.col(i) = fs_full[static_cast<std::size_t>(i)];
  }
  return F * E.adjoint();
}

}  // namespace waylab
