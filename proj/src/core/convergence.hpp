#pragma once

#include <string>
#include <vector>

#include "core/bundles.hpp"
#include "core/function_model.hpp"

namespace impact {

enum class Verdict {
  UniformEvidence,
  PointwiseOnlyEvidence,
  NoConvergenceEvidence,
};

std::string verdict_label(Verdict v);

struct ConvergeOptions {
  std::vector<int> n_list{3, 10, 100, 1000, 10000};
  bool boundary_probes = true;
  // Probe offset: each member n is additionally evaluated at
  // theta0(Z_n) * (1 + probe_delta), chasing the shrinking admissibility
  // boundary that fixed grids miss.
  double probe_delta = 1e-3;
  double eps_uniform = 1e-3;
  SupGrid sup_grid;
};

struct ProbeRecord {
  int n;
  double point;
  double error;  // NaN when no probe was evaluable for this member
};

struct ConvergenceReport {
  std::string family;
  std::string kind;  // bundle kind label, or "function"
  double eps_uniform;
  bool boundary_probes;
  std::vector<int> n_list;
  std::vector<double> grid;
  // errors[k][i] = |m(Z_{n_k}, grid[i]) - m(Z, grid[i])|; NaN where the
  // parameter is not jointly admissible (or the measure is not evaluable).
  std::vector<std::vector<double>> errors;
  // Per-member sup over the admissible grid entries plus the boundary probe.
  std::vector<double> sup_errors;
  std::vector<ProbeRecord> probes;
  Verdict verdict;
  bool empty_admissible = false;
};

// Verdict rule, shared by both harness entry points:
//   UniformEvidence      iff sup at the largest n < eps and the sup series
//                        is nonincreasing over the last three members;
//   PointwiseOnlyEvidence iff every admissible fixed-grid error at the
//                        largest n < eps while the sup stays >= 10 * eps;
//   NoConvergenceEvidence otherwise.
Verdict decide_verdict(const std::vector<std::vector<double>>& errors,
                       const std::vector<double>& sup_errors, double eps);

// Raw-function convergence: per-point errors |Z_n(x) - Z(x)| over x_grid and
// sup-distance estimates per member.
ConvergenceReport function_convergence(const FamilySpec& family,
                                       const std::vector<double>& x_grid,
                                       const ConvergeOptions& opts);

// Measure convergence over a parameter grid. A grid entry contributes only
// where it is admissible for both the member and the limit. With boundary
// probes enabled, crossing kinds are additionally evaluated just above each
// member's admissibility threshold; the mlimit kind is probed at the scale
// of the member-to-limit sup distance (its threshold is always 0, yet the
// bundle degenerates as theta approaches 0).
ConvergenceReport measure_convergence(const FamilySpec& family,
                                      const BundleKind& kind,
                                      const std::vector<double>& grid,
                                      const ConvergeOptions& opts);

std::string report_to_json(const ConvergenceReport& report);
// Long-format rows "<id>,n,theta,error"; id defaults to the family name.
std::string report_to_csv(const ConvergenceReport& report,
                          const std::string& id = "");
std::string report_csv_header();

}  // namespace impact
