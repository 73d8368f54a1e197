#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "greenpol/nh_operator.hpp"
#include "greenpol/ode.hpp"
#include "greenpol/spacetime.hpp"

namespace greenpol {

// Sampled integral curve of the Hamiltonian flow of q on T*M, with cubic
// Hermite interpolation between samples (the stored phase velocities are
// the Hamiltonian field at the samples).
class BicharStrip {
public:
  struct Sample {
    double lambda;
    Eigen::VectorXd x, k, xdot, kdot;
  };

  double lambda_min() const { return samples_.front().lambda; }
  double lambda_max() const { return samples_.back().lambda; }
  double q0() const { return q0_; }
  bool left_chart() const { return left_chart_; }
  const std::vector<Sample>& samples() const { return samples_; }

  PhasePoint at(double lambda) const;
  SpacetimeModel::PhaseVelocity velocity_at(double lambda) const;

private:
  friend BicharStrip integrate_strip(const SpacetimeModel&, const PhasePoint&, double, double,
                                     const StepControl&);
  std::vector<Sample> samples_;
  double q0_ = 0.0;
  bool left_chart_ = false;
};

// Integrates the Hamiltonian flow of q through p0 (placed at lambda = 0
// when the range contains it, else at the nearest end) over
// [lambda_lo, lambda_hi]. Truncates with the left-chart flag when the
// base point exits the chart. Throws StepCollapseError if the adaptive
// step collapses; requires k0 != 0.
BicharStrip integrate_strip(const SpacetimeModel& m, const PhasePoint& p0, double lambda_lo,
                            double lambda_hi, const StepControl& ctrl = {});

// A located witness for (x,k) ~ (x',k'): the strip through (x',k') with
// the match parameter and residuals under which it was accepted.
struct WitnessGeodesic {
  BicharStrip strip;
  double lambda_src = 0.0;  // parameter of (x',k')
  double lambda_dst = 0.0;  // parameter of (x,k)
  double pos_residual = 0.0;
  double cov_residual = 0.0;
};

struct ApproachCandidate {
  double lambda;
  double pos_dist;
  double cov_dist;
  bool accepted;
};

enum class RelationStatus { Related, NotRelated, Unknown };

struct RelationResult {
  RelationStatus status = RelationStatus::Unknown;
  std::optional<WitnessGeodesic> witness;
  std::vector<ApproachCandidate> candidates;
  bool range_exhausted = false;   // no witness found inside [-lambda_max, lambda_max]
  bool multiple_matches = false;  // more than one candidate passed both tolerances
};

struct RelationTolerances {
  double tol_null = defaults::tol_null;
  double tol_pos = defaults::tol_pos;
  double tol_cov = defaults::tol_cov;
  double lambda_max = defaults::lambda_max;
};

// Decides (x,k) ~ (x',k') by flowing the strip through (x',k') over
// [-lambda_max, lambda_max] and bisecting the closest-approach equation
// d|x(lambda)-x|^2/dlambda = 0 to 1e-12 in lambda. Non-null inputs are
// definitely unrelated; covector mismatch at a position match refutes;
// otherwise exhausting the search range yields Unknown, never refuted.
RelationResult relation_check(const SpacetimeModel& m, const PhasePoint& p,
                              const PhasePoint& p_prime, const RelationTolerances& tol = {},
                              const StepControl& ctrl = {});

struct Propagator {
  Eigen::MatrixXcd matrix;
  PhasePoint from, to;
  double condition_number = 1.0;
};

// Solves S' + Gamma_{xdot(lambda)}(x(lambda)) S = 0 along the strip
// interpolant from lambda_from to lambda_to, S(lambda_from) = id.
Eigen::MatrixXcd transport_along(const ConnectionForms& forms, const BicharStrip& strip,
                                 double lambda_from, double lambda_to,
                                 const StepControl& ctrl = {});

// Parallel propagator Pi in Lin(B_{x'}, B_x) along an accepted witness.
Propagator parallel_transport(const ConnectionForms& forms, const WitnessGeodesic& witness,
                              const StepControl& ctrl = {});

// Dencker transport W' + i p_sub(c(lambda)) W = 0 along the strip,
// sampled at the strip's own parameter grid.
std::vector<std::pair<double, Eigen::VectorXcd>> hamilton_orbit(const NHOperatorSpec& op,
                                                                const BicharStrip& strip,
                                                                const Eigen::VectorXcd& w0,
                                                                const StepControl& ctrl = {});

// Transports the two factors of Z in B_x (x) B*_{x'}: the B factor by the
// propagator along `witness`, the B* factor by the dual-connection
// propagator along `witness_prime`: Z -> Pi Z Pi_dual^T.
Eigen::MatrixXcd product_transport(const ConnectionForms& forms, const WitnessGeodesic& witness,
                                   const WitnessGeodesic& witness_prime,
                                   const Eigen::MatrixXcd& z0, const StepControl& ctrl = {});

}  // namespace greenpol
