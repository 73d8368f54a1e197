#include <doctest.h>

#include <cmath>
#include <complex>

#include "greenpol/errors.hpp"
#include "greenpol/polset.hpp"

using namespace greenpol;

namespace {

std::shared_ptr<const SpacetimeModel> mink4() {
  return std::make_shared<const SpacetimeModel>(SpacetimeModel::minkowski(4));
}

Eigen::VectorXd vec4(double a, double b, double c, double d) {
  Eigen::VectorXd v(4);
  v << a, b, c, d;
  return v;
}

NHOperatorSpec trivial_op(std::shared_ptr<const SpacetimeModel> st, int rank) {
  return make_nh_operator(st, rank,
                          std::vector<ExprMat>(static_cast<std::size_t>(st->dim()),
                                               ExprMat::zero(rank, rank)),
                          ExprMat::zero(rank, rank));
}

}  // namespace

TEST_CASE("membership in the worked relation: backwards light ray") {
  auto m = mink4();
  Eigen::VectorXd k = vec4(1, 0, 0, 1);
  // x = x' - 2 k^sharp: lambda* = 1, past-directed displacement
  PhasePoint p{vec4(-2, 0, 0, 2), k};
  RelationPoint rp = in_R(*m, p, {vec4(0, 0, 0, 0), -k});
  CHECK(rp.verdict == Verdict::In);
  CHECK(rp.tag == CausalTag::Past);
  REQUIRE(rp.witness.has_value());
  CHECK(rp.witness->lambda_dst == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("diagonal null points lie in both signed relations") {
  auto m = mink4();
  Eigen::VectorXd k = vec4(1, 0, 0, 1);
  PhasePoint p{vec4(0.5, 1, 0, 0), k};
  RelationPoint rp = in_R(*m, p, {p.x, -k});
  CHECK(rp.verdict == Verdict::In);
  CHECK(rp.tag == CausalTag::Diagonal);
}

TEST_CASE("timelike covectors are outside the relation") {
  auto m = mink4();
  Eigen::VectorXd k = vec4(1, 0, 0, 0);
  RelationPoint rp = in_R(*m, {vec4(-2, 0, 0, 0), k}, {vec4(0, 0, 0, 0), -k});
  CHECK(rp.verdict == Verdict::Out);
}

TEST_CASE("projective membership distances") {
  Eigen::MatrixXcd u(2, 2);
  u << 1.0, 0.0, 0.0, 0.0;
  PolFibre fibre = PolFibre::span_of(u);

  CHECK(membership(fibre, 3.7 * u).member);
  CHECK(membership(fibre, 3.7 * u).distance == doctest::Approx(0.0));

  Eigen::MatrixXcd perp(2, 2);
  perp << 0.0, 1.0, 0.0, 0.0;
  CHECK(!membership(fibre, perp).member);
  CHECK(membership(fibre, perp).distance == doctest::Approx(1.0));

  Eigen::MatrixXcd close = u + 1e-9 * perp;
  CHECK(membership(fibre, close).member);

  PolFibre zero = PolFibre::zero_fibre(2, 2);
  CHECK(membership(zero, Eigen::MatrixXcd::Zero(2, 2)).member);
  CHECK(!membership(zero, u).member);
}

TEST_CASE("fibres of the flat trivial bundle span the identity") {
  auto m = mink4();
  NHOperatorSpec op = trivial_op(m, 2);
  Eigen::VectorXd k = vec4(1, 0, 0, 1);
  RelationPoint rp = in_R(*m, {vec4(-2, 0, 0, 2), k}, {vec4(0, 0, 0, 0), -k});
  PolFibre fibre = fibre_EP(op, rp);
  CHECK(!fibre.zero);
  CHECK(membership(fibre, Eigen::MatrixXcd::Identity(2, 2)).member);

  // diagonal: the identity span again (trivial witness)
  RelationPoint diag = in_R(*m, {vec4(0, 0, 0, 0), k}, {vec4(0, 0, 0, 0), -k});
  PolFibre fdiag = fibre_EP(op, diag);
  CHECK(membership(fdiag, Eigen::MatrixXcd::Identity(2, 2)).member);

  // out verdict gives the zero fibre
  RelationPoint out = in_R(*m, {vec4(-2, 0, 0, 0), vec4(1, 0, 0, 0)},
                           {vec4(0, 0, 0, 0), -vec4(1, 0, 0, 0)});
  CHECK(fibre_EP(op, out).zero);
}

TEST_CASE("scalar fibres are projectively trivial") {
  auto m = mink4();
  std::vector<ExprMat> c(4, ExprMat::zero(1, 1));
  c[0].at(0, 0) = Expr::number(2.0 * 0.3);
  for (int i = 1; i < 4; ++i) c[static_cast<std::size_t>(i)].at(0, 0) = Expr::number(0.0);
  NHOperatorSpec op = make_nh_operator(m, 1, std::move(c), ExprMat::zero(1, 1));
  Eigen::VectorXd k = vec4(1, 0, 0, 1);
  RelationPoint rp = in_R(*m, {vec4(-2, 0, 0, 2), k}, {vec4(0, 0, 0, 0), -k});
  PolFibre fibre = fibre_EP(op, rp);
  Eigen::MatrixXcd one = Eigen::MatrixXcd::Identity(1, 1);
  CHECK(membership(fibre, one).member);  // any nonzero scalar spans the line
}

TEST_CASE("signed fibres follow the causal tag") {
  auto m = mink4();
  NHOperatorSpec op = trivial_op(m, 2);
  Eigen::VectorXd k = vec4(1, 0, 0, 1);

  // non-null twisted-diagonal point: identity span for both signs
  RelationPoint diag_timelike =
      in_R(*m, {vec4(0, 0, 0, 0), vec4(1, 0, 0, 0)}, {vec4(0, 0, 0, 0), -vec4(1, 0, 0, 0)});
  CHECK(diag_timelike.tag == CausalTag::Diagonal);
  CHECK(membership(fibre_EPpm(op, diag_timelike, +1), Eigen::MatrixXcd::Identity(2, 2)).member);
  CHECK(membership(fibre_EPpm(op, diag_timelike, -1), Eigen::MatrixXcd::Identity(2, 2)).member);

  // a past-tagged point contributes only to the advanced fibre
  RelationPoint past = in_R(*m, {vec4(-2, 0, 0, 2), k}, {vec4(0, 0, 0, 0), -k});
  REQUIRE(past.tag == CausalTag::Past);
  CHECK(fibre_EPpm(op, past, +1).zero);
  PolFibre minus = fibre_EPpm(op, past, -1);
  CHECK(!minus.zero);
  CHECK(membership(minus, Eigen::MatrixXcd::Identity(2, 2)).member);
}

TEST_CASE("composition test with invertible symbols is nonzero") {
  auto m = mink4();
  NHOperatorSpec op = trivial_op(m, 2);
  Eigen::VectorXd k = vec4(1, 0, 0, 1);
  RelationPoint rp = in_R(*m, {vec4(-2, 0, 0, 2), k}, {vec4(0, 0, 0, 0), -k});

  SymbolFn ident = [](const PhasePoint&) {
    return Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(2, 2));
  };
  CorollaryResult res = corollary_test(ident, ident, op, rp);
  CHECK(res.nonzero);
  CHECK(res.norm > 0.0);
}

TEST_CASE("composition test detects constructed annihilation") {
  auto m = mink4();
  NHOperatorSpec op = trivial_op(m, 2);
  Eigen::VectorXd k = vec4(1, 0, 0, 1);
  RelationPoint rp = in_R(*m, {vec4(-2, 0, 0, 2), k}, {vec4(0, 0, 0, 0), -k});

  // q kills the second row; r maps into exactly that kernel direction
  Eigen::MatrixXcd qm(2, 2), rm(2, 2);
  qm << 1, 0, 0, 0;
  rm << 0, 0, 0, 1;
  ConnectionForms forms = weitzenboeck_extract(op);
  Eigen::MatrixXcd pi = parallel_transport(forms, *rp.witness).matrix;
  Eigen::MatrixXcd r_into_kernel = pi.inverse() * rm;
  SymbolFn q_fn = [qm](const PhasePoint&) { return qm; };
  SymbolFn r_fn = [r_into_kernel](const PhasePoint&) { return r_into_kernel; };
  CorollaryResult res = corollary_test(q_fn, r_fn, op, rp);
  CHECK(!res.nonzero);
}

TEST_CASE("sign-flip symmetry of the relation and its fibres") {
  auto m = mink4();
  NHOperatorSpec op = trivial_op(m, 2);
  Eigen::VectorXd k = vec4(1, 0.6, 0, 0.8);
  PhasePoint p_prime{vec4(0.2, 0, 0.1, 0), k};
  BicharStrip strip = integrate_strip(*m, p_prime, 0.0, 1.7);
  PhasePoint p = strip.at(1.7);

  RelationPoint rp = in_R(*m, p, {p_prime.x, -k});
  RelationPoint flipped = in_R(*m, {p.x, -p.k}, {p_prime.x, k});
  REQUIRE(rp.verdict == Verdict::In);
  REQUIRE(flipped.verdict == Verdict::In);
  PolFibre f1 = fibre_EP(op, rp);
  PolFibre f2 = fibre_EP(op, flipped);
  CHECK(membership(f1, f2.basis).member);
}

TEST_CASE("off-diagonal relation points carry exactly one causal sign") {
  auto m = mink4();
  Eigen::VectorXd k = vec4(1, 0.6, 0, 0.8);
  for (double lam : {0.5, 1.5, -0.7, -2.0}) {
    PhasePoint p_prime{vec4(0, 0, 0, 0), k};
    BicharStrip strip = integrate_strip(*m, p_prime, std::min(0.0, lam), std::max(0.0, lam));
    PhasePoint p = strip.at(lam);
    RelationPoint rp = in_R(*m, p, {p_prime.x, -k});
    REQUIRE(rp.verdict == Verdict::In);
    bool future = rp.tag == CausalTag::Future;
    bool past = rp.tag == CausalTag::Past;
    CHECK(future != past);
  }
}

TEST_CASE("fibre queries on undecided points are refused") {
  auto m = mink4();
  NHOperatorSpec op = trivial_op(m, 2);
  Eigen::VectorXd k = vec4(1, 0, 0, 1);
  PhasePoint far{vec4(-60, 0, 0, 60), k};
  RelationPoint rp = in_R(*m, far, {vec4(0, 0, 0, 0), -k});
  CHECK(rp.verdict == Verdict::Unknown);
  CHECK(rp.range_exhausted);
  CHECK_THROWS_AS(fibre_EP(op, rp), std::invalid_argument);
}
