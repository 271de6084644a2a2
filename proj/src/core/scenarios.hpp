#pragma once

#include <map>
#include <string>
#include <vector>

#include "core/convergence.hpp"

namespace impact {

// One canonical convergence experiment with pinned tolerances.  The suite
// S1..S12 exercises every bundle kind against families whose limiting
// behavior is known in closed form, so each scenario can assert exact error
// values, verdicts, and boundary-probe magnitudes rather than loose trends.
struct ScenarioResult {
  std::string id;        // "S1".."S12"
  std::string title;     // what the experiment demonstrates
  std::string expected;  // the declared behavior being checked
  std::string note;      // observations; on failure, the failed checks
  bool pass = false;
  std::map<std::string, double> stats;     // named observed quantities
  std::vector<ConvergenceReport> reports;  // underlying error series
};

// Declared membership of one bundle in the three convergence-preservation
// classes, annotated with the scenarios providing numerical evidence.
//   pc      : pointwise function convergence -> pointwise bundle convergence
//   pcstar  : same, restricted to continuous limit functions
//   uc      : uniform function convergence -> uniform bundle convergence
// `flags` records any mismatch between the declared membership and what the
// scenario evidence actually witnessed.
struct ClassificationRow {
  std::string bundle;
  bool pc = false;
  bool pcstar = false;
  bool uc = false;
  std::string evidence;
  std::string flags;
};

std::vector<ScenarioResult> run_scenarios();

bool all_pass(const std::vector<ScenarioResult>& results);

// Builds the classification table from the scenario outcomes.  Declared
// memberships are fixed; flags are derived from the observed statistics
// (an exclusion from `uc` must be witnessed by a non-vanishing probed sup
// error somewhere, otherwise the row is flagged for review).
std::vector<ClassificationRow> classify(
    const std::vector<ScenarioResult>& results);

std::string scenarios_to_json(const std::vector<ScenarioResult>& results);
// Long format, one row per recorded error: scenario/kind, n, theta, error.
std::string scenarios_to_csv(const std::vector<ScenarioResult>& results);

std::string classification_to_text(const std::vector<ClassificationRow>& rows);
std::string classification_to_json(const std::vector<ClassificationRow>& rows);

}  // namespace impact
