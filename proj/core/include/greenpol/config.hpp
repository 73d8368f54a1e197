#pragma once

#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "greenpol/bichar.hpp"
#include "greenpol/nh_operator.hpp"
#include "greenpol/proca.hpp"

namespace greenpol {

// A loaded run configuration: one spacetime, exactly one of an operator
// block or a mass parameter for the 1-form wave operator, tolerance
// overrides and the RNG seed.
struct RunConfig {
  std::shared_ptr<const SpacetimeModel> spacetime;
  std::optional<NHOperatorSpec> op;
  std::optional<double> proca_mass;
  RelationTolerances tol;
  std::uint64_t seed = 0;

  // The operator to use for transport/fibre queries; builds the 1-form
  // wave operator when a mass block was given.
  NHOperatorSpec resolve_operator() const;
  ProcaContext resolve_proca() const;  // throws unless a mass block exists
};

// Parses and validates a config document. Errors carry JSON-pointer paths
// into the document (ConfigError).
RunConfig load_config(const nlohmann::json& doc);
RunConfig load_config_file(const std::string& path);

// Built-in configuration used when no --config is given: Minkowski chart,
// mass-1 field, default tolerances, seed 0.
RunConfig builtin_config();

}  // namespace greenpol
