#include "greenpol/commands.hpp"

#include <random>
#include <sstream>

#include "greenpol/errors.hpp"
#include "greenpol/json_io.hpp"
#include "greenpol/verify.hpp"

namespace greenpol {

namespace {

using nlohmann::ordered_json;

ordered_json vector_json(const Eigen::VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

ordered_json phase_point_json(const PhasePoint& p) {
  ordered_json j;
  j["x"] = vector_json(p.x);
  j["k"] = vector_json(p.k);
  return j;
}

ordered_json complex_matrix_json(const Eigen::MatrixXcd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back(ordered_json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(row);
  }
  return rows;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::In: return "in";
    case Verdict::Out: return "out";
    default: return "unknown";
  }
}

const char* tag_name(CausalTag t) {
  switch (t) {
    case CausalTag::Future: return "future";
    case CausalTag::Past: return "past";
    case CausalTag::Diagonal: return "diagonal";
    case CausalTag::None: return "none";
    default: return "unknown";
  }
}

ordered_json relation_point_json(const RelationPoint& rp) {
  ordered_json j;
  j["point"] = phase_point_json(rp.p);
  j["point_prime"] = phase_point_json(rp.second_point());
  j["verdict"] = verdict_name(rp.verdict);
  j["causal"] = tag_name(rp.tag);
  if (rp.witness) {
    j["lambda_witness"] = rp.witness->lambda_dst;
    j["residuals"] =
        ordered_json{{"position", rp.witness->pos_residual}, {"covector", rp.witness->cov_residual}};
  }
  j["range_exhausted"] = rp.range_exhausted;
  j["multiple_matches"] = rp.multiple_matches;
  return j;
}

ordered_json fibre_json(const PolFibre& f) {
  ordered_json j;
  j["zero"] = f.zero;
  if (!f.zero) j["basis"] = complex_matrix_json(f.basis);
  return j;
}

RelationPoint relate(const RunConfig& cfg, const PhasePoint& p, const PhasePoint& p_prime) {
  PhasePoint signed_second{p_prime.x, -p_prime.k};
  return in_R(*cfg.spacetime, p, signed_second, cfg.tol);
}

}  // namespace

Eigen::VectorXd parse_vector(const std::string& text, int expected_dim) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = std::stod(item, &used);
    vals.push_back(v);
  }
  if (static_cast<int>(vals.size()) != expected_dim)
    throw std::invalid_argument("expected " + std::to_string(expected_dim) +
                                " comma-separated components, got " + std::to_string(vals.size()));
  Eigen::VectorXd out(expected_dim);
  for (int i = 0; i < expected_dim; ++i) out[i] = vals[static_cast<std::size_t>(i)];
  return out;
}

std::string cmd_geodesic(const RunConfig& cfg, const PhasePoint& p0, double lambda_lo,
                         double lambda_hi, const std::string& format) {
  const SpacetimeModel& m = *cfg.spacetime;
  BicharStrip strip = integrate_strip(m, p0, lambda_lo, lambda_hi);
  int n = m.dim();

  if (format == "json") {
    ordered_json j;
    j["q0"] = strip.q0();
    j["left_chart"] = strip.left_chart();
    ordered_json rows = ordered_json::array();
    for (const auto& s : strip.samples()) {
      ordered_json r;
      r["lambda"] = s.lambda;
      r["x"] = vector_json(s.x);
      r["k"] = vector_json(s.k);
      r["q"] = m.q_value({s.x, s.k});
      rows.push_back(r);
    }
    j["samples"] = rows;
    return dump_json(j);
  }

  std::string out = "lambda";
  for (int i = 0; i < n; ++i) out += ",x" + std::to_string(i);
  for (int i = 0; i < n; ++i) out += ",k" + std::to_string(i);
  out += ",q\n";
  for (const auto& s : strip.samples()) {
    out += format_double(s.lambda);
    for (int i = 0; i < n; ++i) out += "," + format_double(s.x[i]);
    for (int i = 0; i < n; ++i) out += "," + format_double(s.k[i]);
    out += "," + format_double(m.q_value({s.x, s.k}));
    out += '\n';
  }
  return out;
}

std::string cmd_relate(const RunConfig& cfg, const PhasePoint& p, const PhasePoint& p_prime) {
  return dump_json(relation_point_json(relate(cfg, p, p_prime)));
}

std::string cmd_transport(const RunConfig& cfg, const PhasePoint& p, const PhasePoint& p_prime) {
  RelationPoint rp = relate(cfg, p, p_prime);
  ordered_json j = relation_point_json(rp);
  if (rp.verdict == Verdict::In) {
    NHOperatorSpec op = cfg.resolve_operator();
    ConnectionForms forms = weitzenboeck_extract(op);
    Propagator prop = parallel_transport(forms, *rp.witness);
    j["propagator"] = complex_matrix_json(prop.matrix);
    j["condition_number"] = prop.condition_number;
  }
  return dump_json(j);
}

namespace {

ordered_json symbol_json(const PolySymbol& s) {
  ordered_json j;
  j["dim"] = s.dim();
  j["shape"] = ordered_json::array({s.rows(), s.cols()});
  j["order"] = s.order();
  ordered_json terms = ordered_json::array();
  for (const auto& [alpha, coef] : s.terms()) {
    ordered_json t;
    ordered_json a = ordered_json::array();
    for (int v : alpha) a.push_back(v);
    t["alpha"] = a;
    ordered_json re = ordered_json::array(), im = ordered_json::array();
    for (int i = 0; i < coef.rows(); ++i) {
      ordered_json rr = ordered_json::array(), ri = ordered_json::array();
      for (int jj = 0; jj < coef.cols(); ++jj) {
        rr.push_back(to_string(coef.re.at(i, jj)));
        ri.push_back(to_string(coef.im.at(i, jj)));
      }
      re.push_back(rr);
      im.push_back(ri);
    }
    t["re"] = re;
    t["im"] = im;
    terms.push_back(t);
  }
  j["terms"] = terms;
  return j;
}

}  // namespace

std::string cmd_symbol(const RunConfig& cfg, const std::string& which,
                       const std::optional<RunConfig>& second, int drop_below) {
  NHOperatorSpec op = cfg.resolve_operator();
  PolySymbol full = full_chart_symbol(op);
  ordered_json j;
  j["which"] = which;
  if (which == "principal") {
    j["symbol"] = symbol_json(principal(full));
  } else if (which == "refined") {
    GradedSymbol g = refined_principal(full);
    j["layers"] = ordered_json::array({symbol_json(g.layers[0]), symbol_json(g.layers[1])});
  } else if (which == "subprincipal") {
    j["symbol"] = symbol_json(subprincipal(full));
  } else if (which == "dual") {
    j["symbol"] = symbol_json(dual_symbol(full));
  } else if (which == "compose") {
    if (!second) throw std::invalid_argument("compose needs a second operator config (--config2)");
    NHOperatorSpec op2 = second->resolve_operator();
    if (op2.dim() != op.dim())
      throw std::invalid_argument("compose needs operators over charts of equal dimension");
    PolySymbol full2 = full_chart_symbol(op2);
    j["symbol"] = symbol_json(compose(full, full2, drop_below));
  } else {
    throw std::invalid_argument(
        "unknown symbol query '" + which +
        "' (expected principal | refined | subprincipal | compose | dual)");
  }
  return dump_json(j);
}

std::string cmd_polfibre(const RunConfig& cfg, const PhasePoint& p, const PhasePoint& p_prime,
                         const std::string& variant) {
  RelationPoint rp = relate(cfg, p, p_prime);
  ordered_json j = relation_point_json(rp);
  j["variant"] = variant;

  if (variant == "proca") {
    ProcaContext ctx = cfg.resolve_proca();
    if (rp.verdict == Verdict::In)
      j["fibre"] = fibre_json(predicted_proca_fibre(ctx, rp));
    else
      j["fibre"] = fibre_json(PolFibre::zero_fibre(4, 4));
    return dump_json(j);
  }

  NHOperatorSpec op = cfg.resolve_operator();
  PolFibre f = PolFibre::zero_fibre(op.rank, op.rank);
  if (variant == "EP") {
    if (rp.verdict != Verdict::Unknown) f = fibre_EP(op, rp);
    else j["note"] = "relation verdict unknown: no fibre";
  } else if (variant == "EP+" || variant == "EP-") {
    int sign = (variant == "EP+") ? 1 : -1;
    if (rp.verdict != Verdict::Unknown || rp.tag == CausalTag::Diagonal)
      f = fibre_EPpm(op, rp, sign);
    else j["note"] = "relation verdict unknown: no fibre";
  } else {
    throw std::invalid_argument("unknown fibre variant '" + variant +
                                "' (expected EP | EP+ | EP- | proca)");
  }
  j["fibre"] = fibre_json(f);
  return dump_json(j);
}

std::string cmd_proca_demo(const RunConfig& cfg, int count) {
  ProcaContext ctx = cfg.resolve_proca();
  const SpacetimeModel& m = *ctx.spacetime;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> ux(-0.5, 0.5);
  std::uniform_real_distribution<double> uk(0.5, 2.0);
  std::uniform_real_distribution<double> ulam(0.2, 3.0);

  ordered_json points = ordered_json::array();
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd x0(4);
    for (int c = 0; c < 4; ++c) x0[c] = ux(rng);
    Eigen::VectorXd k(4);
    for (int c = 1; c < 4; ++c) k[c] = ux(rng) * uk(rng);
    if (k.tail(3).norm() == 0.0) k[3] = 1.0;
    k[0] = (i % 2 == 0 ? 1.0 : -1.0) * k.tail(3).norm();

    PhasePoint p_prime{x0, k};
    double lam = ulam(rng);
    BicharStrip strip = integrate_strip(m, p_prime, 0.0, lam);
    PhasePoint p = strip.at(lam);

    RelationPoint rp = in_R(m, p, {p_prime.x, -p_prime.k}, cfg.tol);
    ordered_json entry = relation_point_json(rp);
    if (rp.verdict == Verdict::In) {
      PolFibre fibre = predicted_proca_fibre(ctx, rp);
      entry["fibre"] = fibre_json(fibre);

      Eigen::VectorXd ksharp = m.sharp(p.x, p.k);
      PhasePoint second = rp.second_point();
      double left = (ksharp.transpose().cast<std::complex<double>>() * fibre.basis).norm();
      double right = (fibre.basis * second.k.cast<std::complex<double>>()).norm();
      entry["constraint_residuals"] = ordered_json{{"left", left}, {"right", right}};

      ProcaClaimReport claim = proca_wf_claim(ctx, rp);
      entry["corollary"] = ordered_json{{"nonzero", claim.nonzero},
                                        {"norm", claim.corollary.norm},
                                        {"threshold", claim.corollary.threshold}};
    }
    points.push_back(entry);
  }
  ordered_json j;
  j["mass"] = ctx.mass;
  j["seed"] = cfg.seed;
  j["points"] = points;
  return dump_json(j);
}

VerifyOutcome cmd_verify(const std::optional<RunConfig>& cfg) {
  std::vector<CheckResult> results = run_verification(cfg ? &*cfg : nullptr);
  bool pass = true;
  for (const auto& r : results) pass = pass && r.pass;
  VerifyOutcome out;
  out.pass = pass;
  out.report = dump_json(verification_report(results));
  return out;
}

}  // namespace greenpol
