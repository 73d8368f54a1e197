#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/SVD>

#include "greenpol/proca.hpp"

using namespace greenpol;

namespace {

std::shared_ptr<const SpacetimeModel> mink4() {
  return std::make_shared<const SpacetimeModel>(SpacetimeModel::minkowski(4));
}

std::shared_ptr<const SpacetimeModel> flrw4(double hubble = 1.0) {
  return std::make_shared<const SpacetimeModel>(
      SpacetimeModel::flrw(exp(Expr::number(hubble) * Expr::variable(0))));
}

Eigen::VectorXd vec4(double a, double b, double c, double d) {
  Eigen::VectorXd v(4);
  v << a, b, c, d;
  return v;
}

}  // namespace

TEST_CASE("Ricci of flat space vanishes") {
  auto m = mink4();
  CHECK(ricci_at(*m, vec4(0.3, -0.5, 1.0, 2.0)).norm() == 0.0);
}

TEST_CASE("Ricci of the conformal exponential chart") {
  // g = a^2 eta with a = e^{H eta}: conformal Hubble a'/a = H constant, so
  // R_{00} = -3 (a'/a)' = 0 and R_{ij} = 2 H^2 delta_ij; mixed components
  // R_i^j = -2 H^2 a^{-2} delta_i^j.
  double hubble = 0.8;
  auto m = flrw4(hubble);
  for (double t : {0.0, std::log(2.0)}) {
    Eigen::MatrixXd r = ricci_at(*m, vec4(t, 0.2, -0.1, 0.4));
    double a2 = std::exp(2.0 * hubble * t);
    CHECK(std::abs(r(0, 0)) <= 1e-7);
    for (int i = 1; i < 4; ++i)
      CHECK(r(i, i) == doctest::Approx(-2.0 * hubble * hubble / a2).epsilon(1e-7));
    // off-diagonal entries vanish
    CHECK(std::abs(r(0, 1)) <= 1e-9);
    CHECK(std::abs(r(2, 3)) <= 1e-9);
  }
}

TEST_CASE("Ricci of 2D hand-computed charts") {
  // diag(1, -x0^2) is flat
  ExprMat milne(2, 2);
  milne.at(0, 0) = Expr::number(1.0);
  milne.at(1, 1) = -(Expr::variable(0) * Expr::variable(0));
  auto m1 = SpacetimeModel::custom(2, milne, {{0.5, 10.0}, {-10.0, 10.0}});
  Eigen::VectorXd x(2);
  x << 2.0, 0.3;
  CHECK(ricci_exprs(m1).eval(std::span<const double>(x.data(), 2)).norm() <= 1e-12);

  // diag(1, -e^{2 x0}) has R_0^0 = R_1^1 = -1 (constant curvature)
  ExprMat expo(2, 2);
  expo.at(0, 0) = Expr::number(1.0);
  expo.at(1, 1) = -(exp(Expr::number(2.0) * Expr::variable(0)));
  auto m2 = SpacetimeModel::custom(2, expo);
  Eigen::VectorXd y(2);
  y << 0.4, -0.2;
  Eigen::MatrixXd r = ricci_exprs(m2).eval(std::span<const double>(y.data(), 2));
  CHECK(r(0, 0) == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(r(1, 1) == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(std::abs(r(0, 1)) <= 1e-12);
}

TEST_CASE("the 1-form wave operator in flat space") {
  ProcaContext ctx = make_proca_context(mink4(), 1.3);
  Eigen::VectorXd x = vec4(0.1, 0.2, 0.3, 0.4);
  std::span<const double> xs(x.data(), 4);
  for (int nu = 0; nu < 4; ++nu)
    CHECK(ctx.kg1.first_order[static_cast<std::size_t>(nu)].eval(xs).norm() == 0.0);
  CHECK((ctx.kg1.potential.eval(xs) - 1.69 * Eigen::MatrixXd::Identity(4, 4)).norm() <= 1e-12);
}

TEST_CASE("extraction recovers the Levi-Civita coframe forms") {
  auto st = flrw4(0.7);
  ProcaContext ctx = make_proca_context(st, 1.0);
  ConnectionForms extracted = weitzenboeck_extract(ctx.kg1);
  ConnectionForms direct = levi_civita_coframe_forms(*st);
  for (double t : {0.0, 0.5}) {
    Eigen::VectorXd x = vec4(t, 0.3, -0.2, 0.8);
    for (int mu = 0; mu < 4; ++mu)
      CHECK((extracted.eval(mu, x) - direct.eval(mu, x)).norm() <= 1e-10);
  }
}

TEST_CASE("positive mass is required") {
  CHECK_THROWS_AS(make_proca_context(mink4(), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_proca_context(mink4(), -1.0), std::invalid_argument);
}

TEST_CASE("constraint-symbol values") {
  ProcaContext ctx = make_proca_context(mink4(), 1.0);
  Eigen::VectorXd k = vec4(1, 0, 0, 1);
  PhasePoint p{vec4(0, 0, 0, 0), k};
  Eigen::MatrixXcd r = r_symbol(ctx, p);

  // the characteristic direction: r k = 0 for null k
  CHECK((r * k.cast<std::complex<double>>()).norm() <= 1e-14);

  // r applied to dt gives -k (m = 1)
  Eigen::VectorXcd dt = vec4(1, 0, 0, 0).cast<std::complex<double>>();
  CHECK((r * dt + k.cast<std::complex<double>>()).norm() <= 1e-14);

  // rank <= 1 everywhere
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(r);
  CHECK(svd.singularValues()(1) <= 1e-14);

  PhasePoint timelike{vec4(0, 0, 0, 0), vec4(1, 0, 0, 0)};
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd2(r_symbol(ctx, timelike));
  CHECK(svd2.singularValues()(1) <= 1e-14);
}

TEST_CASE("predicted fibre on the diagonal and its constraints") {
  ProcaContext ctx = make_proca_context(mink4(), 1.0);
  Eigen::VectorXd k = vec4(1, 0, 0, 1);
  RelationPoint rp = in_R(*ctx.spacetime, {vec4(0, 0, 0, 0), k}, {vec4(0, 0, 0, 0), -k});
  REQUIRE(rp.verdict == Verdict::In);

  PolFibre fibre = predicted_proca_fibre(ctx, rp);
  Eigen::VectorXd ksharp = ctx.spacetime->sharp(vec4(0, 0, 0, 0), k);
  Eigen::MatrixXcd expected = (k * ksharp.transpose()).cast<std::complex<double>>();
  CHECK(membership(fibre, expected).member);

  // both annihilators, exactly
  CHECK((ksharp.transpose().cast<std::complex<double>>() * fibre.basis).norm() <= 1e-12);
  CHECK((fibre.basis * k.cast<std::complex<double>>()).norm() <= 1e-12);
}

TEST_CASE("chain consistency of the predicted fibre") {
  // (r-principal x id) applied to the transported fibre lands on
  // k (x) (k')^sharp, since the covector rides its own geodesic.
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  for (int trial = 0; trial < 6; ++trial) {
    auto st = (trial % 2 == 0) ? mink4() : flrw4(0.6);
    ProcaContext ctx = make_proca_context(st, 1.0 + 0.2 * trial);

    Eigen::VectorXd kspat(3);
    kspat << u(rng) + 0.6, u(rng), u(rng);
    Eigen::VectorXd k(4);
    k << -kspat.norm(), kspat[0], kspat[1], kspat[2];
    PhasePoint p_prime{vec4(u(rng), u(rng), u(rng), u(rng)), k};
    BicharStrip strip = integrate_strip(*st, p_prime, 0.0, 2.0);
    PhasePoint p = strip.at(2.0);
    RelationPoint rp = in_R(*st, p, {p_prime.x, -p_prime.k});
    REQUIRE(rp.verdict == Verdict::In);

    PolFibre predicted = predicted_proca_fibre(ctx, rp);
    ConnectionForms forms = weitzenboeck_extract(ctx.kg1);
    Propagator prop = parallel_transport(forms, *rp.witness);
    Eigen::MatrixXcd chain = r_symbol(ctx, p) * prop.matrix;
    CHECK(membership(predicted, chain).distance <= 1e-6);
  }
}

TEST_CASE("polarisation covector construction") {
  Eigen::Vector3d kv(0, 0, 1), v(1, 0, 0);
  Eigen::Vector4d z = z_from_v(kv, +1, v);
  CHECK((z - Eigen::Vector4d(0, 1, 0, 0)).norm() == 0.0);

  // v parallel to k: time component |k|^2-pattern, still k.z = 0
  Eigen::Vector3d vpar(0, 0, 2);
  Eigen::Vector4d z2 = z_from_v(kv, +1, vpar);
  CHECK(z2[0] == doctest::Approx(2.0));
  double kz = 1.0 * z2[0] - kv.dot(z2.tail<3>());  // eta^{mu nu} k_mu z_nu, k = (|k|, kv)
  CHECK(std::abs(kz) <= 1e-12);

  CHECK_THROWS_AS(z_from_v(Eigen::Vector3d::Zero(), +1, v), std::invalid_argument);

  // surjectivity: any covector with k^mu z_mu = 0 is reproduced
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    Eigen::Vector3d kk(u(rng), u(rng), u(rng));
    if (kk.norm() < 0.1) kk[1] = 1.0;
    int sign = (i % 2 == 0) ? 1 : -1;
    double k0 = sign * kk.norm();
    Eigen::Vector4d z3;
    z3 << 0, u(rng), u(rng), u(rng);
    z3[0] = kk.dot(z3.tail<3>()) / k0;
    Eigen::Vector3d vv = z3.tail<3>() / k0;
    CHECK((z_from_v(kk, sign, vv) - z3).norm() <= 1e-10);
  }
}

TEST_CASE("the composition verdict holds over the relation") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int trial = 0; trial < 4; ++trial) {
    auto st = (trial % 2 == 0) ? mink4() : flrw4(0.5);
    ProcaContext ctx = make_proca_context(st, 1.0);
    Eigen::VectorXd kspat(3);
    kspat << 0.7 + u(rng), u(rng), u(rng);
    Eigen::VectorXd k(4);
    k << -kspat.norm(), kspat[0], kspat[1], kspat[2];
    PhasePoint p_prime{vec4(u(rng), u(rng), u(rng), u(rng)), k};
    BicharStrip strip = integrate_strip(*st, p_prime, 0.0, 1.5);
    PhasePoint p = strip.at(1.5);
    RelationPoint rp = in_R(*st, p, {p_prime.x, -p_prime.k});
    REQUIRE(rp.verdict == Verdict::In);

    ProcaClaimReport claim = proca_wf_claim(ctx, rp);
    CHECK(claim.nonzero);

    // negative control: a symbol vanishing on the null cone
    SymbolFn q_id = [](const PhasePoint&) {
      return Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(4, 4));
    };
    Eigen::VectorXd k_second = rp.second_point().k;
    SymbolFn r_vanishing = [k_second](const PhasePoint& pp) {
      double gap = (pp.k - k_second).norm();
      return Eigen::MatrixXcd(gap * Eigen::MatrixXcd::Identity(4, 4));
    };
    CHECK(!corollary_test(q_id, r_vanishing, ctx.kg1, rp).nonzero);
  }
}

TEST_CASE("predicted fibre queries need a decided relation") {
  ProcaContext ctx = make_proca_context(mink4(), 1.0);
  Eigen::VectorXd k = vec4(1, 0, 0, 0);  // timelike: out
  RelationPoint rp = in_R(*ctx.spacetime, {vec4(-2, 0, 0, 0), k}, {vec4(0, 0, 0, 0), -k});
  CHECK_THROWS_AS(predicted_proca_fibre(ctx, rp), std::invalid_argument);
}
