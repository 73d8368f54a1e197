#pragma once

#include <Eigen/Dense>
#include <memory>

#include "greenpol/polset.hpp"

namespace greenpol {

// Christoffel symbols as Exprs: result[lam].at(mu,nu) = Gamma^lam_{mu nu}.
std::vector<ExprMat> christoffel_exprs(const SpacetimeModel& m);

// Mixed Ricci tensor R_mu^nu = R_{mu sigma} g^{sigma nu} as Exprs, with
// R_{sigma nu} = d_mu Gamma^mu_{nu sigma} - d_nu Gamma^mu_{mu sigma}
//              + Gamma^mu_{mu lam} Gamma^lam_{nu sigma}
//              - Gamma^mu_{nu lam} Gamma^lam_{mu sigma}.
ExprMat ricci_exprs(const SpacetimeModel& m);

// Pointwise mixed Ricci tensor, rows indexed by the lower slot.
Eigen::MatrixXd ricci_at(const SpacetimeModel& m, const Eigen::VectorXd& x);

// The massive 1-form wave operator on a 4-dimensional chart: Levi-Civita
// first-order terms on the coordinate coframe and potential m^2 id + Ricci.
struct ProcaContext {
  std::shared_ptr<const SpacetimeModel> spacetime;
  double mass = 0.0;
  NHOperatorSpec kg1;  // frame spec of the 1-form Klein-Gordon operator
};

ProcaContext make_proca_context(std::shared_ptr<const SpacetimeModel> spacetime, double mass);

// Levi-Civita connection 1-forms on the coordinate coframe:
// (Gamma_mu)^a_b = -Gamma^b_{mu a}.
ConnectionForms levi_civita_coframe_forms(const SpacetimeModel& m);

// Principal symbol of R = 1 - m^{-2} d delta at (x,k):
// v |-> -m^{-2} g^{-1}(k, v) k, i.e. the rank-<=1 matrix
// -m^{-2} k_a (k^sharp)^b.
Eigen::MatrixXcd r_symbol(const ProcaContext& ctx, const PhasePoint& p);

// Predicted polarisation fibre of the Proca advanced-minus-retarded
// kernel over a point of the relation: the span of k (x) (k')^sharp.
PolFibre predicted_proca_fibre(const ProcaContext& ctx, const RelationPoint& rp);

// Polarisation covector z = -v(k^sharp) dt + (dt)(k^sharp) v for spatial
// momentum k_spatial != 0, time sign `sign` (+1 future / -1 past) and
// spatial profile v: components (v.k, sign |k| v). Satisfies eta^{mu nu}
// k_mu z_nu = 0 with k = (sign |k|, k_spatial).
Eigen::Vector4d z_from_v(const Eigen::Vector3d& k_spatial, int sign,
                         const Eigen::Vector3d& v_spatial);

struct ProcaClaimReport {
  CorollaryResult corollary;
  bool nonzero = false;
};

// Runs the composition test with q = id and r the principal symbol of
// 1 - m^{-2} d delta at (x',k'); a nonzero result certifies that the
// composed kernel stays singular over this relation point.
ProcaClaimReport proca_wf_claim(const ProcaContext& ctx, const RelationPoint& rp,
                                const StepControl& ctrl = {});

}  // namespace greenpol
