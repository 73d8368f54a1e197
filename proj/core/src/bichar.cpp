#include "greenpol/bichar.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "greenpol/errors.hpp"

namespace greenpol {

namespace {

struct ChartExit {};

// Hermite basis on [0,1].
struct HermiteWeights {
  double h00, h10, h01, h11;      // value weights
  double d00, d10, d01, d11;      // derivative weights (d/ds)
};

HermiteWeights hermite(double s) {
  HermiteWeights w;
  w.h00 = 2 * s * s * s - 3 * s * s + 1;
  w.h10 = s * s * s - 2 * s * s + s;
  w.h01 = -2 * s * s * s + 3 * s * s;
  w.h11 = s * s * s - s * s;
  w.d00 = 6 * s * s - 6 * s;
  w.d10 = 3 * s * s - 4 * s + 1;
  w.d01 = 6 * s - 6 * s * s;
  w.d11 = 3 * s * s - 2 * s;
  return w;
}

}  // namespace

PhasePoint BicharStrip::at(double lambda) const {
  const auto& s = samples_;
  if (s.size() == 1 || lambda <= s.front().lambda) return {s.front().x, s.front().k};
  if (lambda >= s.back().lambda) return {s.back().x, s.back().k};
  auto it = std::upper_bound(s.begin(), s.end(), lambda,
                             [](double v, const Sample& smp) { return v < smp.lambda; });
  const Sample& b = *it;
  const Sample& a = *(it - 1);
  double h = b.lambda - a.lambda;
  double t = (lambda - a.lambda) / h;
  HermiteWeights w = hermite(t);
  PhasePoint p;
  p.x = w.h00 * a.x + w.h10 * h * a.xdot + w.h01 * b.x + w.h11 * h * b.xdot;
  p.k = w.h00 * a.k + w.h10 * h * a.kdot + w.h01 * b.k + w.h11 * h * b.kdot;
  return p;
}

SpacetimeModel::PhaseVelocity BicharStrip::velocity_at(double lambda) const {
  const auto& s = samples_;
  if (s.size() == 1) return {s.front().xdot, s.front().kdot};
  if (lambda <= s.front().lambda) return {s.front().xdot, s.front().kdot};
  if (lambda >= s.back().lambda) return {s.back().xdot, s.back().kdot};
  auto it = std::upper_bound(s.begin(), s.end(), lambda,
                             [](double v, const Sample& smp) { return v < smp.lambda; });
  const Sample& b = *it;
  const Sample& a = *(it - 1);
  double h = b.lambda - a.lambda;
  double t = (lambda - a.lambda) / h;
  HermiteWeights w = hermite(t);
  SpacetimeModel::PhaseVelocity v;
  v.xdot = (w.d00 / h) * a.x + w.d10 * a.xdot + (w.d01 / h) * b.x + w.d11 * b.xdot;
  v.kdot = (w.d00 / h) * a.k + w.d10 * a.kdot + (w.d01 / h) * b.k + w.d11 * b.kdot;
  return v;
}

BicharStrip integrate_strip(const SpacetimeModel& m, const PhasePoint& p0, double lambda_lo,
                            double lambda_hi, const StepControl& ctrl) {
  if (lambda_hi < lambda_lo) std::swap(lambda_hi, lambda_lo);
  if (p0.k.norm() == 0.0)
    throw std::invalid_argument("bicharacteristic strips require a nonzero covector");
  if (!m.in_chart(p0.x)) throw std::invalid_argument("initial point lies outside the chart");

  int n = m.dim();
  BicharStrip strip;
  strip.q0_ = m.q_value(p0);

  auto field = [&](double, const Eigen::VectorXd& y) {
    PhasePoint p{y.head(n), y.tail(n)};
    auto v = m.hamiltonian_field(p);
    Eigen::VectorXd dy(2 * n);
    dy << v.xdot, v.kdot;
    return dy;
  };

  Eigen::VectorXd y0(2 * n);
  y0 << p0.x, p0.k;

  auto run = [&](double from, double to, std::vector<BicharStrip::Sample>& out) {
    auto emit = [&](double lam, const Eigen::VectorXd& y) {
      PhasePoint p{y.head(n), y.tail(n)};
      if (!m.in_chart(p.x)) throw ChartExit{};
      auto v = m.hamiltonian_field(p);
      out.push_back({lam, p.x, p.k, v.xdot, v.kdot});
    };
    try {
      integrate_adaptive(field, from, to, y0, ctrl, emit);
    } catch (const ChartExit&) {
      strip.left_chart_ = true;
    } catch (const EvalDomainError&) {
      // Metric undefined past this point: treat as leaving the chart.
      strip.left_chart_ = true;
    } catch (const SingularMetricError&) {
      // Numerically degenerate metric (e.g. a conformal factor racing to
      // zero): the usable chart ends here.
      strip.left_chart_ = true;
    }
  };

  double anchor = std::clamp(0.0, lambda_lo, lambda_hi);
  std::vector<BicharStrip::Sample> fwd, bwd;
  run(anchor, lambda_hi, fwd);
  if (lambda_lo < anchor) run(anchor, lambda_lo, bwd);

  std::reverse(bwd.begin(), bwd.end());
  if (!bwd.empty()) bwd.pop_back();  // drop duplicated anchor sample
  strip.samples_ = std::move(bwd);
  strip.samples_.insert(strip.samples_.end(), fwd.begin(), fwd.end());
  if (strip.samples_.empty())
    throw std::invalid_argument("strip integration produced no in-chart samples");
  return strip;
}

namespace {

// Bisection on f over [a,b] with f(a), f(b) of opposite sign.
template <class F>
double bisect(const F& f, double a, double b, double fa, double tol_lambda) {
  for (int i = 0; i < 200 && (b - a) > tol_lambda; ++i) {
    double mid = 0.5 * (a + b);
    double fm = f(mid);
    if ((fm < 0.0) == (fa < 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

RelationResult relation_check(const SpacetimeModel& m, const PhasePoint& p,
                              const PhasePoint& p_prime, const RelationTolerances& tol,
                              const StepControl& ctrl) {
  if (p.k.norm() == 0.0 || p_prime.k.norm() == 0.0)
    throw std::invalid_argument("relation queries require nonzero covectors");

  RelationResult result;
  if (!m.is_null(p, tol.tol_null) || !m.is_null(p_prime, tol.tol_null)) {
    result.status = RelationStatus::NotRelated;
    return result;
  }

  double knorm = p.k.norm();

  // Coincident base points: related iff the covectors agree.
  if ((p.x - p_prime.x).norm() <= tol.tol_pos) {
    double cov = (p.k - p_prime.k).norm();
    ApproachCandidate c{0.0, (p.x - p_prime.x).norm(), cov, cov <= tol.tol_cov * knorm};
    result.candidates.push_back(c);
    if (c.accepted) {
      WitnessGeodesic w;
      w.strip = integrate_strip(m, p_prime, 0.0, 0.0, ctrl);
      w.lambda_src = 0.0;
      w.lambda_dst = 0.0;
      w.pos_residual = c.pos_dist;
      w.cov_residual = c.cov_dist;
      result.witness = std::move(w);
      result.status = RelationStatus::Related;
    } else {
      result.status = RelationStatus::NotRelated;
    }
    return result;
  }

  BicharStrip strip = integrate_strip(m, p_prime, -tol.lambda_max, tol.lambda_max, ctrl);

  // Sign changes of d|x(lambda) - x|^2 / dlambda locate closest approaches.
  const auto& samples = strip.samples();
  auto dist_deriv = [&](double lam) {
    PhasePoint q = strip.at(lam);
    auto v = strip.velocity_at(lam);
    return 2.0 * (q.x - p.x).dot(v.xdot);
  };

  std::vector<double> candidates;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    double ga = 2.0 * (samples[i].x - p.x).dot(samples[i].xdot);
    double gb = 2.0 * (samples[i + 1].x - p.x).dot(samples[i + 1].xdot);
    if (ga == 0.0) candidates.push_back(samples[i].lambda);
    else if (ga < 0.0 && gb >= 0.0)
      candidates.push_back(
          bisect(dist_deriv, samples[i].lambda, samples[i + 1].lambda, ga, 1e-12));
  }
  // Boundary samples can carry the match when the approach is not interior.
  candidates.push_back(samples.front().lambda);
  candidates.push_back(samples.back().lambda);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end(),
                               [](double a, double b) { return std::abs(a - b) < 1e-9; }),
                   candidates.end());

  for (double lam : candidates) {
    PhasePoint q = strip.at(lam);
    ApproachCandidate c;
    c.lambda = lam;
    c.pos_dist = (q.x - p.x).norm();
    c.cov_dist = (q.k - p.k).norm();
    if (c.pos_dist > tol.tol_pos) continue;  // boundary probes usually miss
    c.accepted = c.cov_dist <= tol.tol_cov * knorm;
    result.candidates.push_back(c);
  }

  int accepted = 0;
  for (const auto& c : result.candidates)
    if (c.accepted) ++accepted;
  result.multiple_matches = accepted > 1;

  for (const auto& c : result.candidates) {
    if (!c.accepted) continue;
    WitnessGeodesic w;
    w.strip = strip;
    w.lambda_src = 0.0;
    w.lambda_dst = c.lambda;
    w.pos_residual = c.pos_dist;
    w.cov_residual = c.cov_dist;
    result.witness = std::move(w);
    result.status = RelationStatus::Related;
    return result;
  }

  if (!result.candidates.empty()) {
    // The geodesic reaches x but the transported covector disagrees.
    result.status = RelationStatus::NotRelated;
  } else {
    result.status = RelationStatus::Unknown;
    result.range_exhausted = true;
  }
  return result;
}

Eigen::MatrixXcd transport_along(const ConnectionForms& forms, const BicharStrip& strip,
                                 double lambda_from, double lambda_to, const StepControl& ctrl) {
  int r = forms.rank;
  Eigen::MatrixXcd s0 = Eigen::MatrixXcd::Identity(r, r);
  if (lambda_from == lambda_to) return s0;
  auto f = [&](double lam, const Eigen::MatrixXcd& s) -> Eigen::MatrixXcd {
    PhasePoint q = strip.at(lam);
    auto v = strip.velocity_at(lam);
    Eigen::MatrixXd g = forms.contract(q.x, v.xdot);
    return -(g.cast<std::complex<double>>() * s);
  };
  return integrate_adaptive(f, lambda_from, lambda_to, s0, ctrl,
                            [](double, const Eigen::MatrixXcd&) {});
}

Propagator parallel_transport(const ConnectionForms& forms, const WitnessGeodesic& witness,
                              const StepControl& ctrl) {
  Propagator prop;
  prop.matrix = transport_along(forms, witness.strip, witness.lambda_src, witness.lambda_dst, ctrl);
  PhasePoint src = witness.strip.at(witness.lambda_src);
  PhasePoint dst = witness.strip.at(witness.lambda_dst);
  prop.from = src;
  prop.to = dst;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(prop.matrix);
  double smin = svd.singularValues().minCoeff();
  double smax = svd.singularValues().maxCoeff();
  prop.condition_number = (smin > 0.0) ? smax / smin : std::numeric_limits<double>::infinity();
  return prop;
}

std::vector<std::pair<double, Eigen::VectorXcd>> hamilton_orbit(const NHOperatorSpec& op,
                                                                const BicharStrip& strip,
                                                                const Eigen::VectorXcd& w0,
                                                                const StepControl& ctrl) {
  ConnectionForms forms = weitzenboeck_extract(op);
  const std::complex<double> i_unit(0.0, 1.0);
  auto f = [&](double lam, const Eigen::VectorXcd& w) -> Eigen::VectorXcd {
    PhasePoint q = strip.at(lam);
    Eigen::VectorXd ksharp = op.spacetime->sharp(q.x, q.k);
    Eigen::MatrixXcd psub =
        std::complex<double>(0.0, 2.0) * forms.contract(q.x, ksharp).cast<std::complex<double>>();
    return -(i_unit * (psub * w));
  };
  std::vector<std::pair<double, Eigen::VectorXcd>> out;
  Eigen::VectorXcd w = w0;
  out.emplace_back(strip.samples().front().lambda, w);
  for (std::size_t i = 0; i + 1 < strip.samples().size(); ++i) {
    w = integrate_adaptive(f, strip.samples()[i].lambda, strip.samples()[i + 1].lambda, w, ctrl,
                           [](double, const Eigen::VectorXcd&) {});
    out.emplace_back(strip.samples()[i + 1].lambda, w);
  }
  return out;
}

Eigen::MatrixXcd product_transport(const ConnectionForms& forms, const WitnessGeodesic& witness,
                                   const WitnessGeodesic& witness_prime,
                                   const Eigen::MatrixXcd& z0, const StepControl& ctrl) {
  Eigen::MatrixXcd pi =
      transport_along(forms, witness.strip, witness.lambda_src, witness.lambda_dst, ctrl);
  ConnectionForms dual = dual_connection(forms);
  Eigen::MatrixXcd pi_dual = transport_along(dual, witness_prime.strip, witness_prime.lambda_src,
                                             witness_prime.lambda_dst, ctrl);
  return pi * z0 * pi_dual.transpose();
}

}  // namespace greenpol
