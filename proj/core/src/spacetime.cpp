#include "greenpol/spacetime.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>
#include <stdexcept>

#include "greenpol/errors.hpp"

namespace greenpol {

SpacetimeModel SpacetimeModel::minkowski(int dim,
                                         std::vector<std::pair<double, double>> chart_bounds) {
  if (dim < 2 || dim > 4) throw std::invalid_argument("Minkowski chart dimension must be 2..4");
  SpacetimeModel m;
  m.dim_ = dim;
  m.kind_ = SpacetimeKind::Minkowski;
  m.g_low_ = ExprMat(dim, dim);
  for (int i = 0; i < dim; ++i) m.g_low_.at(i, i) = Expr::number(i == 0 ? 1.0 : -1.0);
  m.bounds_ = std::move(chart_bounds);
  m.finalize();
  return m;
}

SpacetimeModel SpacetimeModel::flrw(const Expr& scale, int dim,
                                    std::vector<std::pair<double, double>> chart_bounds) {
  if (dim < 2 || dim > 4) throw std::invalid_argument("FLRW chart dimension must be 2..4");
  if (scale.variable_span() > 1)
    throw std::invalid_argument("FLRW scale factor may depend on x0 only");
  SpacetimeModel m;
  m.dim_ = dim;
  m.kind_ = SpacetimeKind::Flrw;
  m.g_low_ = ExprMat(dim, dim);
  Expr a2 = scale * scale;
  for (int i = 0; i < dim; ++i) m.g_low_.at(i, i) = (i == 0) ? a2 : -a2;
  m.bounds_ = std::move(chart_bounds);
  m.finalize();
  return m;
}

SpacetimeModel SpacetimeModel::custom(int dim, ExprMat g_low,
                                      std::vector<std::pair<double, double>> chart_bounds) {
  if (dim < 2 || dim > 4) throw std::invalid_argument("chart dimension must be 2..4");
  if (g_low.rows() != dim || g_low.cols() != dim)
    throw std::invalid_argument("metric component matrix has wrong shape");
  SpacetimeModel m;
  m.dim_ = dim;
  m.kind_ = SpacetimeKind::Custom;
  m.g_low_ = std::move(g_low);
  m.bounds_ = std::move(chart_bounds);
  m.finalize();
  return m;
}

void SpacetimeModel::finalize() {
  // Symmetrize: entries are taken from the lower triangle.
  for (int i = 0; i < dim_; ++i)
    for (int j = i + 1; j < dim_; ++j) g_low_.at(i, j) = g_low_.at(j, i);

  bool diagonal = true;
  for (int i = 0; i < dim_ && diagonal; ++i)
    for (int j = 0; j < dim_ && diagonal; ++j)
      if (i != j && !g_low_.at(i, j).is_number(0.0)) diagonal = false;

  Expr det;
  if (diagonal) {
    // Keep the inverse entries compact: the adjugate route would carry
    // uncancelled common factors through every later diff.
    g_inv_ = ExprMat(dim_, dim_);
    det = Expr::number(1.0);
    for (int i = 0; i < dim_; ++i) {
      g_inv_.at(i, i) = Expr::number(1.0) / g_low_.at(i, i);
      det = det * g_low_.at(i, i);
    }
  } else {
    auto inv = invert_exprmat(g_low_);
    g_inv_ = std::move(inv.inverse);
    det = std::move(inv.det);
  }
  // Lorentzian sign convention: det g < 0, so -det is the positive density.
  neg_det_ = -det;

  dg_low_.resize(static_cast<std::size_t>(dim_));
  dg_inv_.resize(static_cast<std::size_t>(dim_));
  for (int mu = 0; mu < dim_; ++mu) {
    dg_low_[static_cast<std::size_t>(mu)] = g_low_.diff(mu);
    dg_inv_[static_cast<std::size_t>(mu)] = g_inv_.diff(mu);
  }

  if (bounds_.empty())
    bounds_.assign(static_cast<std::size_t>(dim_), {-defaults::chart_bound, defaults::chart_bound});
  if (bounds_.size() != static_cast<std::size_t>(dim_))
    throw std::invalid_argument("chart bounds must list one interval per coordinate");
}

bool SpacetimeModel::in_chart(const Eigen::VectorXd& x) const {
  for (int i = 0; i < dim_; ++i) {
    const auto& [lo, hi] = bounds_[static_cast<std::size_t>(i)];
    if (!(x[i] > lo && x[i] < hi)) return false;
  }
  return true;
}

SpacetimeModel::MetricPair SpacetimeModel::metric_at(const Eigen::VectorXd& x) const {
  std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
  Eigen::MatrixXd lower = g_low_.eval(xs);
  double det = lower.determinant();
  if (std::abs(det) < 1e-14) throw SingularMetricError("metric is singular at the given point");
  Eigen::MatrixXd upper = g_inv_.eval(xs);
  return {std::move(lower), std::move(upper)};
}

std::vector<Eigen::MatrixXd> SpacetimeModel::christoffel_at(const Eigen::VectorXd& x) const {
  std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
  auto [lower, upper] = metric_at(x);
  std::vector<Eigen::MatrixXd> dg(static_cast<std::size_t>(dim_));
  for (int mu = 0; mu < dim_; ++mu) dg[static_cast<std::size_t>(mu)] = dg_low_[static_cast<std::size_t>(mu)].eval(xs);

  std::vector<Eigen::MatrixXd> gamma(static_cast<std::size_t>(dim_),
                                     Eigen::MatrixXd::Zero(dim_, dim_));
  for (int lam = 0; lam < dim_; ++lam)
    for (int mu = 0; mu < dim_; ++mu)
      for (int nu = mu; nu < dim_; ++nu) {
        double s = 0.0;
        for (int sig = 0; sig < dim_; ++sig)
          s += upper(lam, sig) * (dg[static_cast<std::size_t>(mu)](sig, nu) +
                                  dg[static_cast<std::size_t>(nu)](sig, mu) -
                                  dg[static_cast<std::size_t>(sig)](mu, nu));
        gamma[static_cast<std::size_t>(lam)](mu, nu) = 0.5 * s;
        gamma[static_cast<std::size_t>(lam)](nu, mu) = 0.5 * s;
      }
  return gamma;
}

double SpacetimeModel::q_value(const PhasePoint& p) const {
  auto [lower, upper] = metric_at(p.x);
  return -p.k.dot(upper * p.k);
}

bool SpacetimeModel::is_null(const PhasePoint& p, double tol_null) const {
  double k2 = p.k.squaredNorm();
  if (k2 == 0.0) return false;
  return std::abs(q_value(p)) <= tol_null * k2;
}

SpacetimeModel::PhaseVelocity SpacetimeModel::hamiltonian_field(const PhasePoint& p) const {
  std::span<const double> xs(p.x.data(), static_cast<std::size_t>(p.x.size()));
  auto [lower, upper] = metric_at(p.x);
  PhaseVelocity v;
  v.xdot = -2.0 * (upper * p.k);
  v.kdot = Eigen::VectorXd::Zero(dim_);
  for (int mu = 0; mu < dim_; ++mu) {
    Eigen::MatrixXd dginv = dg_inv_[static_cast<std::size_t>(mu)].eval(xs);
    v.kdot[mu] = p.k.dot(dginv * p.k);
  }
  return v;
}

Eigen::VectorXd SpacetimeModel::sharp(const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& covector) const {
  return metric_at(x).upper * covector;
}

Eigen::VectorXd SpacetimeModel::flat(const Eigen::VectorXd& x, const Eigen::VectorXd& vector) const {
  return metric_at(x).lower * vector;
}

double SpacetimeModel::metric_density_power(const Eigen::VectorXd& x, double alpha) const {
  std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
  double neg_det = eval(neg_det_, xs);
  if (std::abs(neg_det) < 1e-14)
    throw SingularMetricError("metric is singular at the given point");
  return std::pow(neg_det, alpha);
}

CausalRelation causal_order(const SpacetimeModel& m, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& x_ref) {
  if (m.kind() == SpacetimeKind::Custom)
    throw UnsupportedSpacetimeError(
        "causal order queries are only supported for the built-in conformally flat charts");
  int t = m.time_axis();
  double dt = x[t] - x_ref[t];
  double space2 = 0.0;
  for (int i = 0; i < m.dim(); ++i)
    if (i != t) space2 += (x[i] - x_ref[i]) * (x[i] - x_ref[i]);
  // Null-related points sit exactly on the cone; break rounding ties
  // toward causal.
  bool causal = dt * dt - space2 >= -1e-12 * (dt * dt + space2);
  if (!causal) return CausalRelation::Spacelike;
  if (dt > 0.0) return CausalRelation::Future;
  if (dt < 0.0) return CausalRelation::Past;
  return space2 == 0.0 ? CausalRelation::FutureAndPast : CausalRelation::Spacelike;
}

void validate_signature(const SpacetimeModel& m, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd x(m.dim());
    for (int i = 0; i < m.dim(); ++i) {
      auto [lo, hi] = m.chart_bounds()[static_cast<std::size_t>(i)];
      // Sample a bounded window inside very wide default charts.
      double a = std::max(lo, -2.0), b = std::min(hi, 2.0);
      std::uniform_real_distribution<double> u(a, b);
      x[i] = u(rng);
    }
    auto [lower, upper] = m.metric_at(x);
    if (!lower.isApprox(lower.transpose(), 1e-12))
      throw std::invalid_argument("metric is not symmetric at a sampled chart point");
    if ((lower * upper - Eigen::MatrixXd::Identity(m.dim(), m.dim())).norm() > 1e-10)
      throw SingularMetricError("metric inverse check failed at a sampled chart point");
    if (lower.determinant() >= 0.0)
      throw std::invalid_argument("det g must be negative at every sampled chart point");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lower);
    int plus = 0, minus = 0;
    for (int i = 0; i < m.dim(); ++i) {
      if (es.eigenvalues()[i] > 0.0) ++plus;
      if (es.eigenvalues()[i] < 0.0) ++minus;
    }
    if (plus != 1 || minus != m.dim() - 1)
      throw std::invalid_argument("metric signature is not (+,-,...,-) at a sampled chart point");
  }
}

}  // namespace greenpol
