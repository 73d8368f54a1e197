#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "greenpol/expr_matrix.hpp"

namespace greenpol {

namespace defaults {
inline constexpr double tol_null = 1e-10;
inline constexpr double tol_pos = 1e-6;
inline constexpr double tol_cov = 1e-6;
inline constexpr double lambda_max = 20.0;
inline constexpr double fibre_tol = 1e-6;
inline constexpr double corollary_tol_rel = 1e-8;
inline constexpr double chart_bound = 1e6;
}  // namespace defaults

// A point of T*M: base coordinates x and covector components k.
struct PhasePoint {
  Eigen::VectorXd x;
  Eigen::VectorXd k;
};

enum class SpacetimeKind { Minkowski, Flrw, Custom };

// One global chart with a Lorentzian metric of mostly-minus signature.
// Holds the metric components as Exprs together with their symbolic
// derivatives and the symbolic inverse, so that both pointwise numerics
// and symbol tables can be built from the same data.
class SpacetimeModel {
public:
  static SpacetimeModel minkowski(int dim,
                                  std::vector<std::pair<double, double>> chart_bounds = {});
  // Spatially flat FLRW in conformal time: g = a(x0)^2 * eta. `scale` is
  // an Expr in x0 only.
  static SpacetimeModel flrw(const Expr& scale, int dim = 4,
                             std::vector<std::pair<double, double>> chart_bounds = {});
  static SpacetimeModel custom(int dim, ExprMat g_low,
                               std::vector<std::pair<double, double>> chart_bounds = {});

  int dim() const { return dim_; }
  SpacetimeKind kind() const { return kind_; }
  int time_axis() const { return time_axis_; }
  void set_time_axis(int axis) { time_axis_ = axis; }

  const ExprMat& metric_exprs() const { return g_low_; }
  const ExprMat& inverse_metric_exprs() const { return g_inv_; }
  const Expr& neg_det_expr() const { return neg_det_; }
  const ExprMat& metric_deriv_exprs(int mu) const { return dg_low_[static_cast<std::size_t>(mu)]; }
  const ExprMat& inverse_metric_deriv_exprs(int mu) const {
    return dg_inv_[static_cast<std::size_t>(mu)];
  }

  const std::vector<std::pair<double, double>>& chart_bounds() const { return bounds_; }
  bool in_chart(const Eigen::VectorXd& x) const;

  struct MetricPair {
    Eigen::MatrixXd lower;  // g_{mu nu}
    Eigen::MatrixXd upper;  // g^{mu nu}
  };
  // Throws SingularMetricError if |det g| < 1e-14 at x.
  MetricPair metric_at(const Eigen::VectorXd& x) const;

  // Christoffel symbols of the Levi-Civita connection; result[lam](mu,nu)
  // = Gamma^lam_{mu nu}, symmetric in (mu,nu) by construction.
  std::vector<Eigen::MatrixXd> christoffel_at(const Eigen::VectorXd& x) const;

  // Principal symbol of the half-density box: q(x,k) = -g^{mu nu} k_mu k_nu.
  double q_value(const PhasePoint& p) const;
  // Null classification: |q| <= tol * |k|^2 (Euclidean) and k != 0.
  bool is_null(const PhasePoint& p, double tol_null = defaults::tol_null) const;

  struct PhaseVelocity {
    Eigen::VectorXd xdot;  // -2 g^{mu nu} k_nu
    Eigen::VectorXd kdot;  // k_a k_b  d g^{ab} / d x^mu
  };
  PhaseVelocity hamiltonian_field(const PhasePoint& p) const;

  Eigen::VectorXd sharp(const Eigen::VectorXd& x, const Eigen::VectorXd& covector) const;
  Eigen::VectorXd flat(const Eigen::VectorXd& x, const Eigen::VectorXd& vector) const;

  // (-det g)^alpha.
  double metric_density_power(const Eigen::VectorXd& x, double alpha) const;

private:
  SpacetimeModel() = default;
  void finalize();

  int dim_ = 0;
  SpacetimeKind kind_ = SpacetimeKind::Custom;
  int time_axis_ = 0;
  ExprMat g_low_, g_inv_;
  Expr neg_det_;
  std::vector<ExprMat> dg_low_, dg_inv_;
  std::vector<std::pair<double, double>> bounds_;
};

enum class CausalRelation { Future, Past, FutureAndPast, Spacelike };

// Decides x against J^pm(x_ref) by the flat cone test on coordinate
// differences, valid in the conformally flat built-in charts. Throws
// UnsupportedSpacetimeError for custom metrics.
CausalRelation causal_order(const SpacetimeModel& m, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& x_ref);

// Samples the chart and checks symmetry, invertibility, signature
// (+,-,...,-) and det g < 0. Throws SingularMetricError / invalid_argument
// on failure. Used at config-load time.
void validate_signature(const SpacetimeModel& m, int samples, std::uint64_t seed);

}  // namespace greenpol
