#include <doctest.h>

#include <cmath>

#include "greenpol/errors.hpp"
#include "greenpol/spacetime.hpp"

using namespace greenpol;

namespace {

Eigen::VectorXd vec4(double a, double b, double c, double d) {
  Eigen::VectorXd v(4);
  v << a, b, c, d;
  return v;
}

SpacetimeModel flrw_unit_hubble() {
  return SpacetimeModel::flrw(exp(Expr::variable(0)));  // a(t) = e^t
}

}  // namespace

TEST_CASE("metric evaluation and inversion") {
  auto mink = SpacetimeModel::minkowski(4);
  auto [lo, up] = mink.metric_at(vec4(0.3, -1.0, 2.0, 0.0));
  Eigen::Vector4d diag(1, -1, -1, -1);
  CHECK((lo - Eigen::MatrixXd(diag.asDiagonal())).norm() == 0.0);
  CHECK((up - Eigen::MatrixXd(diag.asDiagonal())).norm() == 0.0);

  auto flrw = flrw_unit_hubble();
  auto [flo, fup] = flrw.metric_at(vec4(0, 1, 2, 3));  // a(0) = 1
  CHECK((flo - Eigen::MatrixXd(diag.asDiagonal())).norm() < 1e-14);
  CHECK((flo * fup - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-12);

  // custom 2D: g00 = 1 + x1^2, g11 = -1
  ExprMat g(2, 2);
  g.at(0, 0) = Expr::number(1.0) + Expr::variable(1) * Expr::variable(1);
  g.at(1, 1) = Expr::number(-1.0);
  auto custom = SpacetimeModel::custom(2, g);
  Eigen::VectorXd x(2);
  x << 0.0, 2.0;
  CHECK(custom.metric_at(x).upper(0, 0) == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("singular metrics are rejected") {
  ExprMat g(2, 2);
  g.at(0, 0) = Expr::variable(0);  // degenerate at x0 = 0
  g.at(1, 1) = Expr::number(-1.0);
  auto m = SpacetimeModel::custom(2, g);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(m.metric_at(x), SingularMetricError);
}

TEST_CASE("signature validation flags a Euclidean metric") {
  ExprMat g(2, 2);
  g.at(0, 0) = Expr::number(1.0);
  g.at(1, 1) = Expr::number(1.0);
  auto m = SpacetimeModel::custom(2, g);
  CHECK_THROWS(validate_signature(m, 4, 1));
}

TEST_CASE("christoffel symbols") {
  auto mink = SpacetimeModel::minkowski(4);
  auto gamma = mink.christoffel_at(vec4(0, 0, 0, 0));
  for (const auto& g : gamma) CHECK(g.norm() == 0.0);

  // 2D diag(1, -x0^2): Gamma^1_{01} = 1/x0
  ExprMat g2(2, 2);
  g2.at(0, 0) = Expr::number(1.0);
  g2.at(1, 1) = -(Expr::variable(0) * Expr::variable(0));
  auto milne = SpacetimeModel::custom(2, g2);
  Eigen::VectorXd x(2);
  x << 2.0, 0.0;
  auto gm = milne.christoffel_at(x);
  CHECK(gm[1](0, 1) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(gm[1](1, 0) == doctest::Approx(0.5).epsilon(1e-13));

  // FLRW a = e^t: Gamma^0_{11} = a' a = e^{2t}, equal to 1 at t = 0
  auto flrw = flrw_unit_hubble();
  auto gf = flrw.christoffel_at(vec4(0, 0, 0, 0));
  CHECK(gf[0](1, 1) == doctest::Approx(1.0).epsilon(1e-12));
  // symmetry is constructional
  for (const auto& gl : gf) CHECK((gl - gl.transpose()).norm() == 0.0);
}

TEST_CASE("q values and null classification") {
  auto mink = SpacetimeModel::minkowski(4);
  CHECK(mink.q_value({vec4(0, 0, 0, 0), vec4(1, 0, 0, 1)}) == doctest::Approx(0.0));
  CHECK(mink.q_value({vec4(0, 0, 0, 0), vec4(1, 0, 0, 0)}) == doctest::Approx(-1.0));
  CHECK(mink.is_null({vec4(0, 0, 0, 0), vec4(1, 0, 0, 1)}));
  CHECK(!mink.is_null({vec4(0, 0, 0, 0), vec4(1, 0, 0, 0)}));
  CHECK(!mink.is_null({vec4(0, 0, 0, 0), vec4(0, 0, 0, 0)}));  // zero covector

  auto flrw = flrw_unit_hubble();
  CHECK(flrw.q_value({vec4(0, 0, 0, 0), vec4(1, 0, 0, 1)}) == doctest::Approx(0.0));
}

TEST_CASE("hamiltonian field") {
  auto mink = SpacetimeModel::minkowski(4);
  auto v = mink.hamiltonian_field({vec4(0, 0, 0, 0), vec4(1, 0, 0, 1)});
  CHECK((v.xdot - vec4(-2, 0, 0, 2)).norm() < 1e-14);
  CHECK(v.kdot.norm() == 0.0);

  auto zero = mink.hamiltonian_field({vec4(0, 0, 0, 0), Eigen::VectorXd::Zero(4)});
  CHECK(zero.xdot.norm() == 0.0);
  CHECK(zero.kdot.norm() == 0.0);

  // FLRW at t = 0 with H = 1: kdot_0 = k_a k_b d_0 g^{ab} = -2H (k_0^2 - |kvec|^2),
  // which vanishes for null k and equals -2 for k = dt.
  auto flrw = flrw_unit_hubble();
  auto vf = flrw.hamiltonian_field({vec4(0, 0, 0, 0), vec4(1, 0, 0, 1)});
  CHECK((vf.xdot - vec4(-2, 0, 0, 2)).norm() < 1e-12);
  CHECK(std::abs(vf.kdot[0]) < 1e-12);
  auto vt = flrw.hamiltonian_field({vec4(0, 0, 0, 0), vec4(1, 0, 0, 0)});
  CHECK(vt.kdot[0] == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("index raising and lowering") {
  auto mink = SpacetimeModel::minkowski(4);
  Eigen::VectorXd k = vec4(1, 0, 0, 1);
  CHECK((mink.sharp(vec4(0, 0, 0, 0), k) - vec4(1, 0, 0, -1)).norm() < 1e-14);
  CHECK((mink.flat(vec4(0, 0, 0, 0), mink.sharp(vec4(0, 0, 0, 0), k)) - k).norm() < 1e-12);

  // FLRW at t = ln 2: a^2 = 4, raising divides spatial parts by 4
  auto flrw = flrw_unit_hubble();
  Eigen::VectorXd x = vec4(std::log(2.0), 0, 0, 0);
  Eigen::VectorXd up = flrw.sharp(x, vec4(0, 4, 0, 0));
  CHECK(up[1] == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("causal order by the cone test") {
  auto mink = SpacetimeModel::minkowski(4);
  CHECK(causal_order(mink, vec4(-2, 0, 0, 2), vec4(0, 0, 0, 0)) == CausalRelation::Past);
  CHECK(causal_order(mink, vec4(0, 0, 0, 0), vec4(0, 0, 0, 0)) == CausalRelation::FutureAndPast);
  CHECK(causal_order(mink, vec4(0, 1, 0, 0), vec4(0, 0, 0, 0)) == CausalRelation::Spacelike);
  CHECK(causal_order(mink, vec4(3, 1, 0, 0), vec4(0, 0, 0, 0)) == CausalRelation::Future);

  ExprMat g(2, 2);
  g.at(0, 0) = Expr::number(1.0) + Expr::variable(1) * Expr::variable(1);
  g.at(1, 1) = Expr::number(-1.0);
  auto custom = SpacetimeModel::custom(2, g);
  Eigen::VectorXd a(2), b(2);
  a << 0, 0;
  b << 1, 0;
  CHECK_THROWS_AS(causal_order(custom, a, b), UnsupportedSpacetimeError);
}

TEST_CASE("metric density powers") {
  auto mink = SpacetimeModel::minkowski(4);
  CHECK(mink.metric_density_power(vec4(0, 0, 0, 0), 0.5) == doctest::Approx(1.0));

  auto flrw = flrw_unit_hubble();
  CHECK(flrw.metric_density_power(vec4(0, 0, 0, 0), 0.5) == doctest::Approx(1.0));
  // t = ln 2: -det g = a^8 = 2^8; fourth root is a^2 = 4
  CHECK(flrw.metric_density_power(vec4(std::log(2.0), 0, 0, 0), 0.25) ==
        doctest::Approx(4.0).epsilon(1e-12));
}
