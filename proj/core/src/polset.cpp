#include "greenpol/polset.hpp"

#include <cmath>
#include <stdexcept>

#include "greenpol/errors.hpp"

namespace greenpol {

RelationPoint in_R(const SpacetimeModel& m, const PhasePoint& p, const PhasePoint& p_signed,
                   const RelationTolerances& tol, const StepControl& ctrl) {
  RelationPoint rp;
  rp.p = p;
  rp.p_signed = p_signed;

  PhasePoint second = rp.second_point();
  bool diagonal = (p.x - second.x).norm() <= tol.tol_pos &&
                  (p.k - second.k).norm() <= tol.tol_cov * std::max(1.0, p.k.norm());

  RelationResult rel = relation_check(m, p, second, tol, ctrl);
  switch (rel.status) {
    case RelationStatus::Related: rp.verdict = Verdict::In; break;
    case RelationStatus::NotRelated: rp.verdict = Verdict::Out; break;
    case RelationStatus::Unknown: rp.verdict = Verdict::Unknown; break;
  }
  rp.witness = std::move(rel.witness);
  rp.range_exhausted = rel.range_exhausted;
  rp.multiple_matches = rel.multiple_matches;

  if (diagonal) {
    rp.tag = CausalTag::Diagonal;
    return rp;
  }
  try {
    switch (causal_order(m, p.x, second.x)) {
      case CausalRelation::Future: rp.tag = CausalTag::Future; break;
      case CausalRelation::Past: rp.tag = CausalTag::Past; break;
      // Coincident base points with distinct covectors: not on the twisted
      // diagonal, and never related.
      case CausalRelation::FutureAndPast: rp.tag = CausalTag::None; break;
      case CausalRelation::Spacelike: rp.tag = CausalTag::None; break;
    }
  } catch (const UnsupportedSpacetimeError&) {
    rp.tag = CausalTag::Unknown;
  }
  return rp;
}

PolFibre PolFibre::zero_fibre(int rows, int cols, double tol) {
  PolFibre f;
  f.basis = Eigen::MatrixXcd::Zero(rows, cols);
  f.zero = true;
  f.tol = tol;
  return f;
}

PolFibre PolFibre::span_of(const Eigen::MatrixXcd& w, double tol) {
  double n = w.norm();
  if (n == 0.0)
    return zero_fibre(static_cast<int>(w.rows()), static_cast<int>(w.cols()), tol);
  PolFibre f;
  f.basis = w / n;
  f.zero = false;
  f.tol = tol;
  return f;
}

MembershipResult membership(const PolFibre& fibre, const Eigen::MatrixXcd& w) {
  double wn = w.norm();
  if (fibre.zero) return {wn == 0.0, wn == 0.0 ? 0.0 : 1.0};
  if (wn == 0.0) return {true, 0.0};  // the zero matrix lies in every fibre
  // Frobenius projection onto the unit basis.
  std::complex<double> coeff = (fibre.basis.conjugate().cwiseProduct(w)).sum();
  double dist = (w - coeff * fibre.basis).norm() / wn;
  return {dist <= fibre.tol, dist};
}

PolFibre fibre_EP(const NHOperatorSpec& op, const RelationPoint& rp, const StepControl& ctrl) {
  int r = op.rank;
  if (rp.verdict == Verdict::Out) return PolFibre::zero_fibre(r, r);
  if (rp.verdict == Verdict::Unknown)
    throw std::invalid_argument("polarisation fibre query on an undecided relation point");
  ConnectionForms forms = weitzenboeck_extract(op);
  Propagator prop = parallel_transport(forms, *rp.witness, ctrl);
  return PolFibre::span_of(prop.matrix);
}

PolFibre fibre_EPpm(const NHOperatorSpec& op, const RelationPoint& rp, int sign,
                    const StepControl& ctrl) {
  int r = op.rank;
  if (rp.tag == CausalTag::Unknown)
    throw UnsupportedSpacetimeError(
        "cannot split the relation into future/past parts without a causal order");
  // The twisted diagonal carries the identity span for every nonzero k.
  if (rp.tag == CausalTag::Diagonal)
    return PolFibre::span_of(Eigen::MatrixXcd::Identity(r, r));
  if (rp.verdict == Verdict::Unknown)
    throw std::invalid_argument("polarisation fibre query on an undecided relation point");
  if (rp.verdict == Verdict::Out) return PolFibre::zero_fibre(r, r);
  bool matches = (sign > 0 && rp.tag == CausalTag::Future) ||
                 (sign < 0 && rp.tag == CausalTag::Past);
  if (!matches) return PolFibre::zero_fibre(r, r);
  return fibre_EP(op, rp, ctrl);
}

CorollaryResult corollary_test(const SymbolFn& q, const SymbolFn& r, const NHOperatorSpec& op,
                               const RelationPoint& rp, double tol_rel, const StepControl& ctrl) {
  if (rp.verdict != Verdict::In)
    throw std::invalid_argument("the composition test needs a point of the relation");
  ConnectionForms forms = weitzenboeck_extract(op);
  Propagator prop = parallel_transport(forms, *rp.witness, ctrl);

  PhasePoint second = rp.second_point();
  Eigen::MatrixXcd qm = q(rp.p);
  Eigen::MatrixXcd rm = r(second);
  if (qm.cols() != prop.matrix.rows() || prop.matrix.cols() != rm.rows())
    throw std::invalid_argument("symbol shapes do not compose");

  CorollaryResult out;
  out.product = qm * prop.matrix * rm;
  out.norm = out.product.norm();
  out.threshold = tol_rel * qm.norm() * prop.matrix.norm() * rm.norm();
  out.nonzero = out.norm > out.threshold;
  return out;
}

}  // namespace greenpol
