#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "greenpol/nh_operator.hpp"

using namespace greenpol;

namespace {

const std::complex<double> I(0.0, 1.0);

std::shared_ptr<const SpacetimeModel> mink4() {
  return std::make_shared<const SpacetimeModel>(SpacetimeModel::minkowski(4));
}

std::shared_ptr<const SpacetimeModel> flrw4(double hubble = 1.0) {
  return std::make_shared<const SpacetimeModel>(
      SpacetimeModel::flrw(exp(Expr::number(hubble) * Expr::variable(0))));
}

std::vector<ExprMat> zero_first_order(int dim, int rank) {
  return std::vector<ExprMat>(static_cast<std::size_t>(dim), ExprMat::zero(rank, rank));
}

Eigen::VectorXd vec4(double a, double b, double c, double d) {
  Eigen::VectorXd v(4);
  v << a, b, c, d;
  return v;
}

}  // namespace

TEST_CASE("extraction of the connection forms") {
  // C = 0 keeps the flat forms
  NHOperatorSpec flat = make_nh_operator(mink4(), 2, zero_first_order(4, 2), ExprMat::zero(2, 2));
  ConnectionForms forms = weitzenboeck_extract(flat);
  Eigen::VectorXd x = vec4(0.1, 0.2, 0.3, 0.4);
  for (int mu = 0; mu < 4; ++mu) CHECK(forms.eval(mu, x).norm() == 0.0);

  // rank 1, C^nu = 2 eta^{nu mu} A_mu with A = dt recovers Gamma_mu = A_mu
  std::vector<ExprMat> c = zero_first_order(4, 1);
  c[0].at(0, 0) = Expr::number(2.0);  // 2 eta^{00} A_0, A = (1,0,0,0)
  NHOperatorSpec op = make_nh_operator(mink4(), 1, std::move(c), ExprMat::zero(1, 1));
  ConnectionForms f2 = weitzenboeck_extract(op);
  CHECK(f2.eval(0, x)(0, 0) == doctest::Approx(1.0));
  for (int mu = 1; mu < 4; ++mu) CHECK(f2.eval(mu, x).norm() == 0.0);
}

TEST_CASE("subprincipal matrix values") {
  Eigen::VectorXd x = vec4(0, 0, 0, 0);

  NHOperatorSpec flat = make_nh_operator(mink4(), 2, zero_first_order(4, 2), ExprMat::zero(2, 2));
  CHECK(nhop_subprincipal(flat, {x, vec4(1, 0, 0, 1)}).norm() == 0.0);

  std::vector<ExprMat> c = zero_first_order(4, 1);
  c[0].at(0, 0) = Expr::number(2.0);  // Gamma_mu = A_mu with A = dt
  NHOperatorSpec op = make_nh_operator(mink4(), 1, std::move(c), ExprMat::zero(1, 1));
  Eigen::MatrixXcd psub = nhop_subprincipal(op, {x, vec4(1, 0, 0, 1)});
  CHECK(std::abs(psub(0, 0) - 2.0 * I) < 1e-14);

  // linear in k: zero covector gives zero
  CHECK(nhop_subprincipal(op, {x, Eigen::VectorXd::Zero(4)}).norm() == 0.0);
}

TEST_CASE("two-path subprincipal identity") {
  Eigen::VectorXd x = vec4(0.2, -0.1, 0.4, 0.3);

  NHOperatorSpec flat = make_nh_operator(mink4(), 1, zero_first_order(4, 1), ExprMat::zero(1, 1));
  CHECK(verify_psub_identity(flat, {x, vec4(1, 0, 0, 1)}) < 1e-14);

  NHOperatorSpec conf =
      make_nh_operator(flrw4(), 1, zero_first_order(4, 1), ExprMat::zero(1, 1));
  CHECK(verify_psub_identity(conf, {x, vec4(1.3, 0.2, -0.7, 1.0)}) <= 1e-9);

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<ExprMat> c;
  for (int nu = 0; nu < 4; ++nu) {
    ExprMat m(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        m.at(i, j) = Expr::number(u(rng)) + Expr::number(u(rng)) * sin(Expr::variable(nu));
    c.push_back(m);
  }
  NHOperatorSpec random_op = make_nh_operator(mink4(), 2, std::move(c), ExprMat::zero(2, 2));
  CHECK(verify_psub_identity(random_op, {x, vec4(0.8, 0.3, 0.2, -0.5)}) <= 1e-9);
}

TEST_CASE("dual connection forms") {
  ConnectionForms zero = ConnectionForms::zero(4, 2);
  ConnectionForms dz = dual_connection(zero);
  Eigen::VectorXd x = vec4(0, 0, 0, 0);
  for (int mu = 0; mu < 4; ++mu) CHECK(dz.eval(mu, x).norm() == 0.0);

  ConnectionForms f;
  f.dim = 4;
  f.rank = 2;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int mu = 0; mu < 4; ++mu) {
    ExprMat g(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) g.at(i, j) = Expr::number(u(rng)) * Expr::variable(mu);
    f.gamma.push_back(g);
  }
  ConnectionForms dual = dual_connection(f);
  for (int mu = 0; mu < 4; ++mu)
    CHECK((dual.eval(mu, x + vec4(1, 1, 1, 1)) + f.eval(mu, x + vec4(1, 1, 1, 1)).transpose())
              .norm() == 0.0);
}

TEST_CASE("half-density conjugation") {
  Eigen::VectorXd x = vec4(0.3, 0.1, -0.2, 0.5);
  std::span<const double> xs(x.data(), 4);

  // constant determinant: conjugation is the identity on coefficients
  NHOperatorSpec flat = make_nh_operator(mink4(), 1, zero_first_order(4, 1), ExprMat::zero(1, 1));
  NHOperatorSpec conj = half_density_conjugate(flat, 0.25);
  for (int nu = 0; nu < 4; ++nu)
    CHECK(conj.first_order[static_cast<std::size_t>(nu)].eval(xs).norm() < 1e-14);
  CHECK(conj.potential.eval(xs).norm() < 1e-14);

  // alpha then -alpha is the identity
  auto st = flrw4(0.6);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<ExprMat> c;
  for (int nu = 0; nu < 4; ++nu) {
    ExprMat m(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m.at(i, j) = Expr::number(u(rng));
    c.push_back(m);
  }
  ExprMat v(2, 2);
  v.at(0, 0) = Expr::number(1.3);
  v.at(1, 1) = Expr::variable(0);
  NHOperatorSpec op = make_nh_operator(st, 2, std::move(c), std::move(v));
  NHOperatorSpec round = half_density_conjugate(half_density_conjugate(op, 0.25), -0.25);
  for (int nu = 0; nu < 4; ++nu)
    CHECK((round.first_order[static_cast<std::size_t>(nu)].eval(xs) -
           op.first_order[static_cast<std::size_t>(nu)].eval(xs))
              .norm() <= 1e-12);
  CHECK((round.potential.eval(xs) - op.potential.eval(xs)).norm() <= 1e-12);

  CHECK_THROWS_AS(half_density_conjugate(op, 0.5), std::invalid_argument);
}

TEST_CASE("conjugation imports the plain scalar box") {
  // The non-densitised box, written over the half-density box basis, has
  // C0^nu = (1/rho2) d_mu (g^{mu nu} rho2) - d_mu g^{mu nu} and V0 = -z.
  // Conjugating by (-g)^{1/4} must land exactly on the half-density box.
  auto st = flrw4(0.8);
  const SpacetimeModel& m = *st;
  Expr rho2 = pow(m.neg_det_expr(), 0.5);
  std::vector<ExprMat> c0;
  for (int nu = 0; nu < 4; ++nu) {
    Expr divergence_form;
    Expr plain;
    for (int mu = 0; mu < 4; ++mu) {
      divergence_form =
          divergence_form + diff(m.inverse_metric_exprs().at(mu, nu) * rho2, mu);
      plain = plain + m.inverse_metric_deriv_exprs(mu).at(mu, nu);
    }
    ExprMat entry(1, 1);
    entry.at(0, 0) = divergence_form / rho2 - plain;
    c0.push_back(entry);
  }
  ExprMat v0(1, 1);
  v0.at(0, 0) = -density_box_zero_order(m);
  NHOperatorSpec plain_box = make_nh_operator(st, 1, std::move(c0), std::move(v0));

  NHOperatorSpec densitised = half_density_conjugate(plain_box, 0.25);
  Eigen::VectorXd x = vec4(0.2, 0.4, -0.3, 0.1);
  std::span<const double> xs(x.data(), 4);
  for (int nu = 0; nu < 4; ++nu)
    CHECK(densitised.first_order[static_cast<std::size_t>(nu)].eval(xs).norm() <= 1e-10);
  CHECK(densitised.potential.eval(xs).norm() <= 1e-10);
}

TEST_CASE("reconstruction of the first-order table from extracted forms") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    auto st = (trial % 2 == 0) ? mink4() : flrw4(0.5);
    int rank = 1 + trial % 3;
    std::vector<ExprMat> c;
    for (int nu = 0; nu < 4; ++nu) {
      ExprMat m(rank, rank);
      for (int i = 0; i < rank; ++i)
        for (int j = 0; j < rank; ++j)
          m.at(i, j) = Expr::number(u(rng)) + Expr::number(u(rng)) * Expr::variable((nu + j) % 4);
      c.push_back(m);
    }
    NHOperatorSpec op = make_nh_operator(st, rank, c, ExprMat::zero(rank, rank));
    std::vector<ExprMat> rebuilt = first_order_from_connection(*st, weitzenboeck_extract(op));
    Eigen::VectorXd x = vec4(u(rng), u(rng), u(rng), u(rng));
    std::span<const double> xs(x.data(), 4);
    for (int nu = 0; nu < 4; ++nu)
      CHECK((rebuilt[static_cast<std::size_t>(nu)].eval(xs) -
             c[static_cast<std::size_t>(nu)].eval(xs))
                .norm() <= 1e-12);
  }
}

TEST_CASE("operator construction validates shapes") {
  CHECK_THROWS_AS(make_nh_operator(mink4(), 0, {}, ExprMat::zero(1, 1)), std::invalid_argument);
  CHECK_THROWS_AS(make_nh_operator(mink4(), 1, zero_first_order(3, 1), ExprMat::zero(1, 1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_nh_operator(mink4(), 1, zero_first_order(4, 2), ExprMat::zero(1, 1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_nh_operator(mink4(), 1, zero_first_order(4, 1), ExprMat::zero(2, 2)),
                  std::invalid_argument);
}
