#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "greenpol/spacetime.hpp"
#include "greenpol/symbol.hpp"

namespace greenpol {

// Connection 1-form matrices Gamma_mu(x) in a fixed bundle frame, with
// symbolic x-derivatives available through the Expr entries.
struct ConnectionForms {
  int dim = 0;
  int rank = 0;
  std::vector<ExprMat> gamma;  // gamma[mu] is rank x rank

  static ConnectionForms zero(int dim, int rank);
  Eigen::MatrixXd eval(int mu, const Eigen::VectorXd& x) const;
  // Gamma_mu(x) v^mu for a tangent vector v.
  Eigen::MatrixXd contract(const Eigen::VectorXd& x, const Eigen::VectorXd& v) const;
};

// Frame data of a normally hyperbolic operator on a rank-r bundle in the
// half-densitised picture:
//   P = id * Box + C^nu d_nu + V,
// with Box the half-density box of the chart. The principal symbol is
// structurally -g^{-1}(xi,xi) id.
struct NHOperatorSpec {
  std::shared_ptr<const SpacetimeModel> spacetime;
  int rank = 0;
  std::vector<ExprMat> first_order;  // C^nu, one rank x rank matrix per nu
  ExprMat potential;                 // V

  int dim() const { return spacetime->dim(); }
};

NHOperatorSpec make_nh_operator(std::shared_ptr<const SpacetimeModel> spacetime, int rank,
                                std::vector<ExprMat> first_order, ExprMat potential);

// Zero-order part of the half-density box
// (-g)^{-1/4} d_mu g^{mu nu} (-g)^{1/2} d_nu (-g)^{-1/4}, as an Expr.
Expr density_box_zero_order(const SpacetimeModel& m);

// Full chart symbol of P (order 2): g^{mu nu} at degree 2 times the
// identity, (d_mu g^{mu nu}) id + C^nu at degree 1, V + box zero-order at
// degree 0.
PolySymbol full_chart_symbol(const NHOperatorSpec& op);

// Weitzenboeck connection 1-forms: Gamma^B_mu = 1/2 g_{mu nu} C^nu.
ConnectionForms weitzenboeck_extract(const NHOperatorSpec& op);

// Rebuilds the first-order coefficients 2 g^{mu nu} Gamma_mu from forms;
// inverse of weitzenboeck_extract, used by reconstruction checks.
std::vector<ExprMat> first_order_from_connection(const SpacetimeModel& m,
                                                 const ConnectionForms& forms);

// Subprincipal symbol matrix p_sub(x,k) = 2i g^{mu nu} k_nu Gamma^B_mu(x).
Eigen::MatrixXcd nhop_subprincipal(const NHOperatorSpec& op, const PhasePoint& p);

// Two-path check of the subprincipal identity: the degree-1 layer of the
// refined principal symbol of the full chart symbol against
// 2i g^{mu nu} k_nu Gamma^B_mu, returned as |difference| / (1 + |k|).
double verify_psub_identity(const NHOperatorSpec& op, const PhasePoint& p);

// Dual connection on B*: Gamma^{B*}_mu = -(Gamma^B_mu)^T.
ConnectionForms dual_connection(const ConnectionForms& forms);

// Frame coefficients of (-g)^alpha P (-g)^{-alpha}, alpha in {+1/4, -1/4},
// re-expressed over the same half-density box (principal part unchanged,
// first-order and potential shift).
NHOperatorSpec half_density_conjugate(const NHOperatorSpec& op, double alpha);

}  // namespace greenpol
