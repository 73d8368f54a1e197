#pragma once

#include <optional>
#include <string>

#include "greenpol/config.hpp"

namespace greenpol {

// Implementations of the CLI subcommands, kept in the library so they can
// be driven in-process. Each returns the full output document as a string
// (JSON unless stated otherwise); rendering is deterministic for a fixed
// config and seed.

// Comma-separated component list, e.g. "0,0,0,1.5".
Eigen::VectorXd parse_vector(const std::string& text, int expected_dim);

// Trajectory export; format "csv" (default: lambda, x^mu, k_mu, q) or
// "json".
std::string cmd_geodesic(const RunConfig& cfg, const PhasePoint& p0, double lambda_lo,
                         double lambda_hi, const std::string& format = "csv");

// Relation verdict for the pair (x,k), (x',k') in JSON.
std::string cmd_relate(const RunConfig& cfg, const PhasePoint& p, const PhasePoint& p_prime);

// Parallel propagator along the witness of (x,k) ~ (x',k'), JSON matrices
// as row-major [re, im] pairs.
std::string cmd_transport(const RunConfig& cfg, const PhasePoint& p, const PhasePoint& p_prime);

// Symbol-calculus queries on the configured operator's full chart symbol:
// which in {principal, refined, subprincipal, compose, dual}; compose
// composes with the operator of `second` (same chart).
std::string cmd_symbol(const RunConfig& cfg, const std::string& which,
                       const std::optional<RunConfig>& second = std::nullopt,
                       int drop_below = 0);

// Polarisation fibre for the pair, variant in {EP, EP+, EP-, proca}.
std::string cmd_polfibre(const RunConfig& cfg, const PhasePoint& p, const PhasePoint& p_prime,
                         const std::string& variant);

// Sampled relation points with fibres, constraint residuals and
// composition verdicts for the configured 1-form field.
std::string cmd_proca_demo(const RunConfig& cfg, int count = 10);

struct VerifyOutcome {
  bool pass = false;
  std::string report;  // JSON
};

// Runs the full property/acceptance suite; no config runs the built-in
// Minkowski + FLRW suite.
VerifyOutcome cmd_verify(const std::optional<RunConfig>& cfg = std::nullopt);

}  // namespace greenpol
