#include "waylab/born.hpp"

#include <charconv>
#include <cmath>

namespace waylab {

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

GradedVector in_sector0(const VectorXc& v) {
  GradedVector g(static_cast<int>(v.size()));
  g.set(0, v);
  return g;
}

}  // namespace

void Observable::check(double tol) const {
  if (eigenvalues.size() != eigenspaces.size())
    throw StructuralError("observable: eigenvalue and eigenspace counts differ");
  if (eigenspaces.empty()) throw StructuralError("observable: no eigenspaces");
  const Eigen::Index n = dim();
  if (n < 1) throw StructuralError("observable: zero-dimensional state space");
  Eigen::Index cols = 0;
  for (std::size_t k = 0; k < eigenspaces.size(); ++k) {
    if (eigenspaces[k].cols() == 0) throw StructuralError("observable: eigenspace " + std::to_string(k) + " is empty");
    if (eigenspaces[k].rows() != n) throw StructuralError("observable: eigenspace dimensions differ");
    cols += eigenspaces[k].cols();
  }
  MatrixXc all(n, cols);
  Eigen::Index at = 0;
  for (const MatrixXc& e : eigenspaces) {
    all.middleCols(at, e.cols()) = e;
    at += e.cols();
  }
  const double defect = (all.adjoint() * all - MatrixXc::Identity(cols, cols)).cwiseAbs().maxCoeff();
  if (defect > tol)
    throw StructuralError("observable: eigenvectors are not orthonormal (defect " + std::to_string(defect) + ")");
}

double OutcomeDistribution::total() const {
  double t = 0.0;
  for (const Outcome& o : outcomes) t += o.probability;
  return t;
}

const Outcome* OutcomeDistribution::find(const std::string& label) const {
  for (const Outcome& o : outcomes)
    if (o.label == label) return &o;
  return nullptr;
}

OutcomeDistribution born_distribution(const Observable& obs, const VectorXc& phi, double span_tol) {
  obs.check();
  if (phi.size() != obs.dim()) throw StructuralError("born_distribution: state dimension differs from observable");
  const double nn = phi.squaredNorm();
  if (std::abs(nn - 1.0) > kDefaultTolerance)
    throw DomainError("born_distribution: state is not normalized (|phi|^2 = " + std::to_string(nn) + ")");

  OutcomeDistribution dist;
  VectorXc remainder = phi;
  for (std::size_t k = 0; k < obs.eigenspaces.size(); ++k) {
    const MatrixXc& e = obs.eigenspaces[k];
    const VectorXc amps = e.adjoint() * phi;
    const double w = amps.squaredNorm();
    const VectorXc proj = e * amps;
    remainder -= proj;
    Outcome o;
    o.label = "q=" + shortest(obs.eigenvalues[k]);
    o.probability = w;
    o.post_state = in_sector0(w > 0.0 ? VectorXc(proj / std::sqrt(w)) : VectorXc(VectorXc::Zero(phi.size())));
    dist.outcomes.push_back(std::move(o));
  }
  const double rn = remainder.norm();
  if (rn > span_tol) {
    Outcome o;
    o.label = kOutsideSpanLabel;
    o.probability = rn * rn;
    o.post_state = in_sector0(remainder / rn);
    dist.outcomes.push_back(std::move(o));
  }
  return dist;
}

OutcomeDistribution three_outcome_stats(const ApproxScheme& s, const ObjectState& obj, double tol) {
  const ConstraintReport report = validate_scheme(s);
  if (!report.passes(tol)) {
    const ConstraintEntry* w = report.worst();
    throw DomainError("three_outcome_stats: scheme fails validation (" + w->id + " = " + std::to_string(w->residual) +
                      ")");
  }
  const GradedVector joint = apply_interaction(s, obj);
  const DerivedPointers ptr = derived_pointers(s);

  OutcomeDistribution dist;
  GradedVector remainder = joint;
  for (const auto& [label, pointer] : {std::pair{"plus", &ptr.chi}, std::pair{"minus", &ptr.chiprime}}) {
    Outcome o;
    o.label = label;
    o.post_state = GradedVector(joint.dim());
    const double len = pointer->norm();
    if (len > 0.0) {
      const GradedVector unit = (1.0 / len) * *pointer;
      const ObjectState c = pointer_amplitudes(joint, unit);
      const GradedVector part = tensor(c, unit);
      remainder -= part;
      o.probability = c.squared_norm();
      if (o.probability > 0.0) o.post_state = (1.0 / std::sqrt(o.probability)) * part;
    }
    dist.outcomes.push_back(std::move(o));
  }
  Outcome u;
  u.label = "undetermined";
  u.probability = remainder.squared_norm();
  u.post_state = u.probability > 0.0 ? (1.0 / std::sqrt(u.probability)) * remainder : GradedVector(joint.dim());
  dist.outcomes.push_back(std::move(u));
  return dist;
}

std::vector<OutcomeCount> sample_outcomes(const OutcomeDistribution& dist, std::uint64_t shots, std::uint64_t seed) {
  if (shots < 1) throw DomainError("sample_outcomes: shots must be >= 1");
  if (dist.outcomes.empty()) throw DomainError("sample_outcomes: empty distribution");
  std::vector<double> cdf;
  double acc = 0.0;
  for (const Outcome& o : dist.outcomes) {
    if (!(o.probability >= 0.0)) throw DomainError("sample_outcomes: negative probability for " + o.label);
    acc += o.probability;
    cdf.push_back(acc);
  }
  if (!(acc > 0.0)) throw DomainError("sample_outcomes: probabilities sum to zero");

  std::vector<OutcomeCount> counts;
  for (const Outcome& o : dist.outcomes) counts.push_back({o.label, 0, o.probability});
  Rng rng(seed);
  for (std::uint64_t i = 0; i < shots; ++i) {
    const double u = uniform01(rng) * acc;
    std::size_t k = 0;
    while (k + 1 < cdf.size() && u >= cdf[k]) ++k;
    ++counts[k].count;
  }
  return counts;
}

}  // namespace waylab
