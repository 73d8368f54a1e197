#include "greenpol/proca.hpp"

#include <cmath>
#include <stdexcept>

#include "greenpol/errors.hpp"

namespace greenpol {

std::vector<ExprMat> christoffel_exprs(const SpacetimeModel& m) {
  int n = m.dim();
  std::vector<ExprMat> gamma(static_cast<std::size_t>(n), ExprMat(n, n));
  Expr half = Expr::number(0.5);
  for (int lam = 0; lam < n; ++lam)
    for (int mu = 0; mu < n; ++mu)
      for (int nu = mu; nu < n; ++nu) {
        Expr s;
        for (int sig = 0; sig < n; ++sig) {
          Expr grad = m.metric_deriv_exprs(mu).at(sig, nu) + m.metric_deriv_exprs(nu).at(sig, mu) -
                      m.metric_deriv_exprs(sig).at(mu, nu);
          s = s + m.inverse_metric_exprs().at(lam, sig) * grad;
        }
        gamma[static_cast<std::size_t>(lam)].at(mu, nu) = half * s;
        gamma[static_cast<std::size_t>(lam)].at(nu, mu) = gamma[static_cast<std::size_t>(lam)].at(mu, nu);
      }
  return gamma;
}

ExprMat ricci_exprs(const SpacetimeModel& m) {
  int n = m.dim();
  std::vector<ExprMat> gamma = christoffel_exprs(m);

  // d_mu Gamma^lam, computed once.
  std::vector<std::vector<ExprMat>> dgamma(static_cast<std::size_t>(n));
  for (int mu = 0; mu < n; ++mu) {
    dgamma[static_cast<std::size_t>(mu)].reserve(static_cast<std::size_t>(n));
    for (int lam = 0; lam < n; ++lam)
      dgamma[static_cast<std::size_t>(mu)].push_back(gamma[static_cast<std::size_t>(lam)].diff(mu));
  }

  ExprMat ricci_low(n, n);
  for (int sig = 0; sig < n; ++sig)
    for (int nu = 0; nu < n; ++nu) {
      Expr s;
      for (int mu = 0; mu < n; ++mu) {
        s = s + dgamma[static_cast<std::size_t>(mu)][static_cast<std::size_t>(mu)].at(nu, sig);
        s = s - dgamma[static_cast<std::size_t>(nu)][static_cast<std::size_t>(mu)].at(mu, sig);
        for (int lam = 0; lam < n; ++lam) {
          s = s + gamma[static_cast<std::size_t>(mu)].at(mu, lam) *
                      gamma[static_cast<std::size_t>(lam)].at(nu, sig);
          s = s - gamma[static_cast<std::size_t>(mu)].at(nu, lam) *
                      gamma[static_cast<std::size_t>(lam)].at(mu, sig);
        }
      }
      ricci_low.at(sig, nu) = s;
    }

  // Raise the second slot: R_mu^nu = R_{mu sig} g^{sig nu}.
  return ricci_low * m.inverse_metric_exprs();
}

Eigen::MatrixXd ricci_at(const SpacetimeModel& m, const Eigen::VectorXd& x) {
  ExprMat r = ricci_exprs(m);
  std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
  return r.eval(xs);
}

ConnectionForms levi_civita_coframe_forms(const SpacetimeModel& m) {
  int n = m.dim();
  std::vector<ExprMat> gamma = christoffel_exprs(m);
  ConnectionForms forms;
  forms.dim = n;
  forms.rank = n;
  forms.gamma.assign(static_cast<std::size_t>(n), ExprMat(n, n));
  for (int mu = 0; mu < n; ++mu)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        forms.gamma[static_cast<std::size_t>(mu)].at(a, b) =
            -gamma[static_cast<std::size_t>(b)].at(mu, a);
  return forms;
}

ProcaContext make_proca_context(std::shared_ptr<const SpacetimeModel> spacetime, double mass) {
  if (!(mass > 0.0)) throw std::invalid_argument("the field mass must be positive");
  if (spacetime->dim() != 4)
    throw std::invalid_argument("the massive 1-form operator is built on 4-dimensional charts");

  ProcaContext ctx;
  ctx.spacetime = spacetime;
  ctx.mass = mass;

  ConnectionForms lc = levi_civita_coframe_forms(*spacetime);
  std::vector<ExprMat> first = first_order_from_connection(*spacetime, lc);
  ExprMat potential = ExprMat::identity(4).scaled(mass * mass) + ricci_exprs(*spacetime);
  ctx.kg1 = make_nh_operator(spacetime, 4, std::move(first), std::move(potential));
  return ctx;
}

Eigen::MatrixXcd r_symbol(const ProcaContext& ctx, const PhasePoint& p) {
  Eigen::VectorXd ksharp = ctx.spacetime->sharp(p.x, p.k);
  Eigen::MatrixXd r = -(p.k * ksharp.transpose()) / (ctx.mass * ctx.mass);
  return r.cast<std::complex<double>>();
}

PolFibre predicted_proca_fibre(const ProcaContext& ctx, const RelationPoint& rp) {
  if (rp.verdict != Verdict::In)
    throw std::invalid_argument("the predicted fibre is defined over points of the relation");
  PhasePoint second = rp.second_point();
  Eigen::VectorXd kp_sharp = ctx.spacetime->sharp(second.x, second.k);
  Eigen::MatrixXd w = rp.p.k * kp_sharp.transpose();
  return PolFibre::span_of(w.cast<std::complex<double>>());
}

Eigen::Vector4d z_from_v(const Eigen::Vector3d& k_spatial, int sign,
                         const Eigen::Vector3d& v_spatial) {
  double kn = k_spatial.norm();
  if (kn == 0.0) throw std::invalid_argument("zero spatial momentum");
  double s = (sign >= 0) ? 1.0 : -1.0;
  Eigen::Vector4d z;
  z[0] = v_spatial.dot(k_spatial);
  z.tail<3>() = s * kn * v_spatial;
  return z;
}

ProcaClaimReport proca_wf_claim(const ProcaContext& ctx, const RelationPoint& rp,
                                const StepControl& ctrl) {
  SymbolFn q = [](const PhasePoint&) {
    return Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(4, 4));
  };
  SymbolFn r = [&ctx](const PhasePoint& p) { return r_symbol(ctx, p); };
  ProcaClaimReport rep;
  rep.corollary = corollary_test(q, r, ctx.kg1, rp, defaults::corollary_tol_rel, ctrl);
  rep.nonzero = rep.corollary.nonzero;
  return rep;
}

}  // namespace greenpol
