#include <benchmark/benchmark.h>

#include "greenpol/bichar.hpp"
#include "greenpol/nh_operator.hpp"
#include "greenpol/proca.hpp"

using namespace greenpol;

namespace {

std::shared_ptr<const SpacetimeModel> flrw_model() {
  static auto m = std::make_shared<const SpacetimeModel>(
      SpacetimeModel::flrw(exp(Expr::number(0.5) * Expr::variable(0))));
  return m;
}

Eigen::VectorXd null_k() {
  // Negative k_0: conformal time increases along the flow, keeping
  // exponential scale factors away from their degenerate region.
  Eigen::VectorXd k(4);
  k << -1.0, 0.3, -0.2, std::sqrt(1.0 - 0.09 - 0.04);
  return k;
}

}  // namespace

static void BM_parse_eval(benchmark::State& state) {
  Expr e = parse_expr("exp(2*x0)*sin(x1) + x2^3/(1 + x3^2)");
  double x[4] = {0.3, -0.2, 0.7, 0.1};
  for (auto _ : state) benchmark::DoNotOptimize(eval(e, std::span<const double>(x, 4)));
}
BENCHMARK(BM_parse_eval);

static void BM_christoffel_flrw(benchmark::State& state) {
  auto m = flrw_model();
  Eigen::VectorXd x = Eigen::VectorXd::Constant(4, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(m->christoffel_at(x));
}
BENCHMARK(BM_christoffel_flrw);

static void BM_integrate_strip_flrw(benchmark::State& state) {
  auto m = flrw_model();
  PhasePoint p0{Eigen::VectorXd::Zero(4), null_k()};
  for (auto _ : state) benchmark::DoNotOptimize(integrate_strip(*m, p0, 0.0, 5.0));
}
BENCHMARK(BM_integrate_strip_flrw);

static void BM_relation_check_flat(benchmark::State& state) {
  auto m = std::make_shared<const SpacetimeModel>(SpacetimeModel::minkowski(4));
  Eigen::VectorXd k = null_k();
  Eigen::VectorXd ksharp(4);
  ksharp << k[0], -k[1], -k[2], -k[3];
  PhasePoint p_prime{Eigen::VectorXd::Zero(4), k};
  PhasePoint p{(-2.0 * 1.5) * ksharp, k};
  for (auto _ : state) benchmark::DoNotOptimize(relation_check(*m, p, p_prime));
}
BENCHMARK(BM_relation_check_flat);

static void BM_parallel_transport_flrw(benchmark::State& state) {
  auto m = flrw_model();
  ProcaContext ctx = make_proca_context(m, 1.0);
  ConnectionForms forms = weitzenboeck_extract(ctx.kg1);
  PhasePoint p0{Eigen::VectorXd::Zero(4), null_k()};
  WitnessGeodesic w;
  w.strip = integrate_strip(*m, p0, 0.0, 3.0);
  w.lambda_src = 0.0;
  w.lambda_dst = 3.0;
  for (auto _ : state) benchmark::DoNotOptimize(parallel_transport(forms, w));
}
BENCHMARK(BM_parallel_transport_flrw);

static void BM_refined_principal(benchmark::State& state) {
  auto m = flrw_model();
  ConnectionForms lc = levi_civita_coframe_forms(*m);
  NHOperatorSpec op = make_nh_operator(m, 4, first_order_from_connection(*m, lc),
                                       ExprMat::identity(4));
  PolySymbol full = full_chart_symbol(op);
  for (auto _ : state) benchmark::DoNotOptimize(refined_principal(full));
}
BENCHMARK(BM_refined_principal);

static void BM_compose_order2(benchmark::State& state) {
  auto m = flrw_model();
  ConnectionForms lc = levi_civita_coframe_forms(*m);
  NHOperatorSpec op = make_nh_operator(m, 4, first_order_from_connection(*m, lc),
                                       ExprMat::identity(4));
  PolySymbol full = full_chart_symbol(op);
  for (auto _ : state) benchmark::DoNotOptimize(compose(full, full));
}
BENCHMARK(BM_compose_order2);

static void BM_ricci_flrw(benchmark::State& state) {
  auto m = flrw_model();
  Eigen::VectorXd x = Eigen::VectorXd::Constant(4, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(ricci_at(*m, x));
}
BENCHMARK(BM_ricci_flrw);

BENCHMARK_MAIN();
