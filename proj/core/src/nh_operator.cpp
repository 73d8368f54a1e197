#include "greenpol/nh_operator.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "greenpol/errors.hpp"

namespace greenpol {

ConnectionForms ConnectionForms::zero(int dim, int rank) {
  ConnectionForms f;
  f.dim = dim;
  f.rank = rank;
  f.gamma.assign(static_cast<std::size_t>(dim), ExprMat::zero(rank, rank));
  return f;
}

Eigen::MatrixXd ConnectionForms::eval(int mu, const Eigen::VectorXd& x) const {
  std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
  return gamma[static_cast<std::size_t>(mu)].eval(xs);
}

Eigen::MatrixXd ConnectionForms::contract(const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& v) const {
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(rank, rank);
  std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
  for (int mu = 0; mu < dim; ++mu)
    acc += v[mu] * gamma[static_cast<std::size_t>(mu)].eval(xs);
  return acc;
}

NHOperatorSpec make_nh_operator(std::shared_ptr<const SpacetimeModel> spacetime, int rank,
                                std::vector<ExprMat> first_order, ExprMat potential) {
  if (rank < 1) throw std::invalid_argument("bundle rank must be positive");
  int dim = spacetime->dim();
  if (static_cast<int>(first_order.size()) != dim)
    throw std::invalid_argument("expected one first-order matrix per coordinate");
  for (const auto& c : first_order)
    if (c.rows() != rank || c.cols() != rank)
      throw std::invalid_argument("first-order coefficient matrix has wrong shape");
  if (potential.rows() != rank || potential.cols() != rank)
    throw std::invalid_argument("potential matrix has wrong shape");
  return NHOperatorSpec{std::move(spacetime), rank, std::move(first_order), std::move(potential)};
}

Expr density_box_zero_order(const SpacetimeModel& m) {
  // Apply the divergence-form box to the constant function 1.
  Expr rho_m4 = pow(m.neg_det_expr(), -0.25);   // (-g)^{-1/4}
  Expr rho_p4 = pow(m.neg_det_expr(), 0.25);    // (-g)^{+1/4}
  Expr rho_h = pow(m.neg_det_expr(), 0.5);      // (-g)^{1/2}
  Expr z;
  for (int mu = 0; mu < m.dim(); ++mu) {
    Expr inner;
    for (int nu = 0; nu < m.dim(); ++nu)
      inner = inner + m.inverse_metric_exprs().at(mu, nu) * rho_h * diff(rho_m4, nu);
    z = z + diff(inner, mu);
  }
  return rho_m4 * z;
}

PolySymbol full_chart_symbol(const NHOperatorSpec& op) {
  const SpacetimeModel& m = *op.spacetime;
  int dim = m.dim();
  int r = op.rank;
  PolySymbol sym(dim, r, r, 2);
  ExprMat id = ExprMat::identity(r);

  for (int mu = 0; mu < dim; ++mu)
    for (int nu = mu; nu < dim; ++nu) {
      MultiIndex alpha(static_cast<std::size_t>(dim), 0);
      ++alpha[static_cast<std::size_t>(mu)];
      ++alpha[static_cast<std::size_t>(nu)];
      Expr c = (mu == nu) ? m.inverse_metric_exprs().at(mu, nu)
                          : Expr::number(2.0) * m.inverse_metric_exprs().at(mu, nu);
      sym.add_real_term(alpha, id.scaled(c));
    }

  for (int nu = 0; nu < dim; ++nu) {
    MultiIndex alpha(static_cast<std::size_t>(dim), 0);
    ++alpha[static_cast<std::size_t>(nu)];
    Expr div;
    for (int mu = 0; mu < dim; ++mu) div = div + m.inverse_metric_deriv_exprs(mu).at(mu, nu);
    sym.add_real_term(alpha, id.scaled(div) + op.first_order[static_cast<std::size_t>(nu)]);
  }

  MultiIndex zero(static_cast<std::size_t>(dim), 0);
  sym.add_real_term(zero, op.potential + id.scaled(density_box_zero_order(m)));
  return sym;
}

ConnectionForms weitzenboeck_extract(const NHOperatorSpec& op) {
  const SpacetimeModel& m = *op.spacetime;
  ConnectionForms forms;
  forms.dim = m.dim();
  forms.rank = op.rank;
  forms.gamma.reserve(static_cast<std::size_t>(forms.dim));
  for (int mu = 0; mu < forms.dim; ++mu) {
    ExprMat g(op.rank, op.rank);
    for (int nu = 0; nu < forms.dim; ++nu)
      g = g + op.first_order[static_cast<std::size_t>(nu)].scaled(
                  Expr::number(0.5) * m.metric_exprs().at(mu, nu));
    forms.gamma.push_back(std::move(g));
  }
  return forms;
}

std::vector<ExprMat> first_order_from_connection(const SpacetimeModel& m,
                                                 const ConnectionForms& forms) {
  std::vector<ExprMat> c;
  c.reserve(static_cast<std::size_t>(m.dim()));
  for (int nu = 0; nu < m.dim(); ++nu) {
    ExprMat acc(forms.rank, forms.rank);
    for (int mu = 0; mu < m.dim(); ++mu)
      acc = acc + forms.gamma[static_cast<std::size_t>(mu)].scaled(
                      Expr::number(2.0) * m.inverse_metric_exprs().at(mu, nu));
    c.push_back(std::move(acc));
  }
  return c;
}

Eigen::MatrixXcd nhop_subprincipal(const NHOperatorSpec& op, const PhasePoint& p) {
  ConnectionForms forms = weitzenboeck_extract(op);
  Eigen::VectorXd ksharp = op.spacetime->sharp(p.x, p.k);
  // 2i g^{mu nu} k_nu Gamma_mu = 2i Gamma_{k_sharp}
  Eigen::MatrixXd contracted = forms.contract(p.x, ksharp);
  return std::complex<double>(0.0, 2.0) * contracted.cast<std::complex<double>>();
}

double verify_psub_identity(const NHOperatorSpec& op, const PhasePoint& p) {
  PolySymbol full = full_chart_symbol(op);
  GradedSymbol refined = refined_principal(full);
  Eigen::MatrixXcd from_symbol = refined.layers[1].evaluate(p.x, p.k);
  Eigen::MatrixXcd direct = nhop_subprincipal(op, p);
  return (from_symbol - direct).norm() / (1.0 + p.k.norm());
}

ConnectionForms dual_connection(const ConnectionForms& forms) {
  ConnectionForms dual;
  dual.dim = forms.dim;
  dual.rank = forms.rank;
  dual.gamma.reserve(forms.gamma.size());
  for (const auto& g : forms.gamma) dual.gamma.push_back(-g.transpose());
  return dual;
}

NHOperatorSpec half_density_conjugate(const NHOperatorSpec& op, double alpha) {
  if (alpha != 0.25 && alpha != -0.25)
    throw std::invalid_argument("density weight shift must be +1/4 or -1/4");
  const SpacetimeModel& m = *op.spacetime;
  int dim = m.dim();
  int r = op.rank;
  ExprMat id = ExprMat::identity(r);

  Expr rho = pow(m.neg_det_expr(), alpha);
  Expr rho_inv = pow(m.neg_det_expr(), -alpha);

  // Conjugate the full operator table by the scalar rho:
  // rho A d^beta rho^{-1} = sum_{gamma<=beta} binom(beta,gamma)
  //                         A (rho d^{beta-gamma} rho^{-1}) d^gamma.
  PolySymbol full = full_chart_symbol(op);
  PolySymbol conj(dim, r, r, 2);
  for (const auto& [beta, A] : full.terms()) {
    std::vector<MultiIndex> gammas;
    MultiIndex cur(beta.size(), 0);
    auto rec = [&](auto&& self, std::size_t pos) -> void {
      if (pos == beta.size()) {
        gammas.push_back(cur);
        return;
      }
      for (int v = 0; v <= beta[pos]; ++v) {
        cur[pos] = v;
        self(self, pos + 1);
      }
    };
    rec(rec, 0);
    for (const auto& gamma : gammas) {
      MultiIndex rest = mi_sub(beta, gamma);
      Expr factor = rho_inv;
      for (std::size_t mu = 0; mu < rest.size(); ++mu)
        for (int j = 0; j < rest[mu]; ++j) factor = diff(factor, static_cast<int>(mu));
      factor = rho * factor;
      conj.add_term(gamma, A.scaled(mi_binomial(beta, gamma)).scaled(factor));
    }
  }

  // Re-express over the box basis: strip the box's own first- and
  // zero-order pieces back out.
  std::vector<ExprMat> c_new;
  c_new.reserve(static_cast<std::size_t>(dim));
  MultiIndex zero(static_cast<std::size_t>(dim), 0);
  for (int nu = 0; nu < dim; ++nu) {
    MultiIndex e_nu = zero;
    ++e_nu[static_cast<std::size_t>(nu)];
    ExprMat coef(r, r);
    auto it = conj.terms().find(e_nu);
    if (it != conj.terms().end()) coef = it->second.re;
    Expr div;
    for (int mu = 0; mu < dim; ++mu) div = div + m.inverse_metric_deriv_exprs(mu).at(mu, nu);
    c_new.push_back(coef - id.scaled(div));
  }
  ExprMat v_new(r, r);
  auto it0 = conj.terms().find(zero);
  if (it0 != conj.terms().end()) v_new = it0->second.re;
  v_new = v_new - id.scaled(density_box_zero_order(m));

  return NHOperatorSpec{op.spacetime, r, std::move(c_new), std::move(v_new)};
}

}  // namespace greenpol
