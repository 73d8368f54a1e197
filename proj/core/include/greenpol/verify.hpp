#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "greenpol/config.hpp"

namespace greenpol {

struct CheckResult {
  std::string id;
  std::string what;
  bool pass = false;
  double worst = 0.0;  // worst observed residual / error measure
  double tol = 0.0;
  double seconds = 0.0;
  std::string note;
};

// Runs the acceptance criteria (ids A1..A9) followed by the per-module
// property suites (ids P-*), in a fixed order. `cfg` may override the
// spacetime/operator used by the config-sensitive checks; the built-in
// Minkowski + FLRW suite runs when it is null.
std::vector<CheckResult> run_verification(const RunConfig* cfg = nullptr);

nlohmann::ordered_json verification_report(const std::vector<CheckResult>& results);

}  // namespace greenpol
