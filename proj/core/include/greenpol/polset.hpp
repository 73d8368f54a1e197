#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "greenpol/bichar.hpp"

namespace greenpol {

enum class Verdict { In, Out, Unknown };
enum class CausalTag { Future, Past, Diagonal, None, Unknown };

// A point (x,k; x',-k') of the product phase space together with the
// outcome of the relation query on (x,k) ~ (x',k').
struct RelationPoint {
  PhasePoint p;          // (x, k)
  PhasePoint p_signed;   // (x', -k') as stored in the twisted convention
  Verdict verdict = Verdict::Unknown;
  CausalTag tag = CausalTag::None;
  std::optional<WitnessGeodesic> witness;
  bool range_exhausted = false;
  bool multiple_matches = false;

  PhasePoint second_point() const { return {p_signed.x, -p_signed.k}; }  // (x', k')
};

// Membership query for the twisted pair (x,k;x',-k'). The relation itself
// runs on (x',k'); the causal tag refines into the future/past components.
// Custom metrics yield CausalTag::Unknown.
RelationPoint in_R(const SpacetimeModel& m, const PhasePoint& p, const PhasePoint& p_signed,
                   const RelationTolerances& tol = {}, const StepControl& ctrl = {});

// Rank-one (or zero) subspace of B_x (x) B*_{x'}, stored as a unit-norm
// basis matrix with a projective comparison tolerance.
struct PolFibre {
  Eigen::MatrixXcd basis;
  bool zero = true;
  double tol = defaults::fibre_tol;

  static PolFibre zero_fibre(int rows, int cols, double tol = defaults::fibre_tol);
  static PolFibre span_of(const Eigen::MatrixXcd& w, double tol = defaults::fibre_tol);
};

struct MembershipResult {
  bool member = false;
  double distance = 0.0;
};

// Projective distance |w - <u,w> u|_F / |w|_F against the unit basis u;
// the zero fibre accepts only w = 0.
MembershipResult membership(const PolFibre& fibre, const Eigen::MatrixXcd& w);

// Fibre of the advanced-minus-retarded kernel over rp: the span of the
// parallel propagator under the Weitzenboeck connection of `op`, the zero
// fibre when the verdict is Out. Requires a decided verdict.
PolFibre fibre_EP(const NHOperatorSpec& op, const RelationPoint& rp, const StepControl& ctrl = {});

// Fibre of the retarded (+1) / advanced (-1) kernel: the twisted diagonal
// contributes the identity span for every nonzero k; off-diagonal points
// contribute the propagator span only when the causal tag matches `sign`.
PolFibre fibre_EPpm(const NHOperatorSpec& op, const RelationPoint& rp, int sign,
                    const StepControl& ctrl = {});

using SymbolFn = std::function<Eigen::MatrixXcd(const PhasePoint&)>;

struct CorollaryResult {
  bool nonzero = false;
  double norm = 0.0;
  double threshold = 0.0;
  Eigen::MatrixXcd product;
};

// Noncharacteristic-composition test: N = q(x,k) Pi r(x',k') is declared
// nonzero when |N|_F > tol_rel |q|_F |Pi|_F |r|_F. A nonzero verdict means
// the composed kernel stays singular at this point of the relation.
CorollaryResult corollary_test(const SymbolFn& q, const SymbolFn& r, const NHOperatorSpec& op,
                               const RelationPoint& rp,
                               double tol_rel = defaults::corollary_tol_rel,
                               const StepControl& ctrl = {});

}  // namespace greenpol
