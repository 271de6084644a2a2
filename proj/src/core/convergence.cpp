#include "core/convergence.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/measures.hpp"
#include "core/model_io.hpp"

namespace impact {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::optional<double> try_measure(const FunctionModel& f,
                                  const BundleKind& kind, double t) {
  try {
    return measure_at(f, kind, t);
  } catch (const NotAdmissibleError&) {
    return std::nullopt;
  } catch (const ContinuityRequiredError&) {
    return std::nullopt;
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

void check_options(const ConvergeOptions& opts) {
  if (opts.n_list.empty()) throw DomainError("n list must be nonempty");
  for (std::size_t k = 0; k < opts.n_list.size(); ++k) {
    if (opts.n_list[k] < 1 ||
        (k > 0 && opts.n_list[k - 1] >= opts.n_list[k])) {
      throw DomainError("n list must be strictly increasing and positive");
    }
  }
  if (!(opts.eps_uniform > 0.0) || !std::isfinite(opts.eps_uniform)) {
    throw DomainError("eps_uniform must be finite and > 0");
  }
  if (!(opts.probe_delta > 0.0) || !std::isfinite(opts.probe_delta)) {
    throw DomainError("probe_delta must be finite and > 0");
  }
}

void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw DomainError("grid must be nonempty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw DomainError("non-finite grid value");
    if (i > 0 && grid[i - 1] >= grid[i]) {
      throw DomainError("grid must be strictly increasing");
    }
  }
}

double nan_max(double a, double b) {
  if (std::isnan(a)) return b;
  if (std::isnan(b)) return a;
  return std::max(a, b);
}

bool probed_kind(BundleKindId id) {
  switch (id) {
    case BundleKindId::H:
    case BundleKindId::G:
    case BundleKindId::Kosmulski:
    case BundleKindId::R:
    case BundleKindId::Mlimit:
      return true;
    default:
      return false;
  }
}

}  // namespace

std::string verdict_label(Verdict v) {
  switch (v) {
    case Verdict::UniformEvidence: return "uniform-evidence";
    case Verdict::PointwiseOnlyEvidence: return "pointwise-only-evidence";
    case Verdict::NoConvergenceEvidence: return "no-convergence-evidence";
  }
  return "?";
}

Verdict decide_verdict(const std::vector<std::vector<double>>& errors,
                       const std::vector<double>& sup_errors, double eps) {
  const std::size_t k = sup_errors.size();
  const double sup_last = k ? sup_errors.back() : kNaN;
  if (!std::isnan(sup_last)) {
    bool noninc = true;
    const std::size_t window = std::min<std::size_t>(3, k);
    for (std::size_t i = k - window; i + 1 < k; ++i) {
      if (std::isnan(sup_errors[i]) || sup_errors[i] < sup_errors[i + 1]) {
        noninc = false;
        break;
      }
    }
    if (sup_last < eps && noninc) return Verdict::UniformEvidence;
    bool any = false, all_small = true;
    if (!errors.empty()) {
      for (double e : errors.back()) {
        if (std::isnan(e)) continue;
        any = true;
        if (e >= eps) all_small = false;
      }
    }
    if (any && all_small && sup_last >= 10.0 * eps) {
      return Verdict::PointwiseOnlyEvidence;
    }
  }
  return Verdict::NoConvergenceEvidence;
}

ConvergenceReport function_convergence(const FamilySpec& family,
                                       const std::vector<double>& x_grid,
                                       const ConvergeOptions& opts) {
  check_options(opts);
  check_grid(x_grid);
  const FunctionModel limit = family.limit();
  const double t = limit.domain_end();
  if (x_grid.front() < 0.0 || x_grid.back() > t) {
    throw DomainError("x grid must lie inside [0, T]");
  }
  ConvergenceReport rep;
  rep.family = family.id();
  rep.kind = "function";
  rep.eps_uniform = opts.eps_uniform;
  rep.boundary_probes = false;
  rep.n_list = opts.n_list;
  rep.grid = x_grid;
  SupGrid sup_grid = opts.sup_grid;
  sup_grid.extra.insert(sup_grid.extra.end(), x_grid.begin(), x_grid.end());
  for (int n : opts.n_list) {
    const FunctionModel zn = family.member(n);
    std::vector<double> row;
    row.reserve(x_grid.size());
    for (double x : x_grid) {
      row.push_back(std::fabs(zn.eval(x) - limit.eval(x)));
    }
    rep.errors.push_back(std::move(row));
    rep.sup_errors.push_back(sup_distance(zn, limit, sup_grid));
  }
  rep.verdict = decide_verdict(rep.errors, rep.sup_errors, opts.eps_uniform);
  return rep;
}

ConvergenceReport measure_convergence(const FamilySpec& family,
                                      const BundleKind& kind,
                                      const std::vector<double>& grid,
                                      const ConvergeOptions& opts) {
  check_options(opts);
  check_grid(grid);
  const FunctionModel limit = family.limit();
  ConvergenceReport rep;
  rep.family = family.id();
  rep.kind = bundle_kind_label(kind);
  rep.eps_uniform = opts.eps_uniform;
  rep.boundary_probes = opts.boundary_probes && probed_kind(kind.id);
  rep.n_list = opts.n_list;
  rep.grid = grid;

  std::vector<std::optional<double>> limit_vals;
  limit_vals.reserve(grid.size());
  for (double t : grid) limit_vals.push_back(try_measure(limit, kind, t));

  bool any_present = false;
  for (int n : opts.n_list) {
    const FunctionModel zn = family.member(n);
    std::vector<double> row;
    row.reserve(grid.size());
    double sup = kNaN;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto mv = try_measure(zn, kind, grid[i]);
      if (mv && limit_vals[i]) {
        row.push_back(std::fabs(*mv - *limit_vals[i]));
        sup = nan_max(sup, row.back());
        any_present = true;
      } else {
        row.push_back(kNaN);
      }
    }
    ProbeRecord probe{n, kNaN, kNaN};
    if (rep.boundary_probes) {
      double point = kNaN;
      if (kind.id == BundleKindId::Mlimit) {
        const double s = sup_distance(zn, limit, opts.sup_grid);
        if (s > 0.0) {
          point = std::min((1.0 + opts.probe_delta) * s, zn.domain_end());
        }
      } else {
        const double t0 = theta0_for(zn, kind);
        if (std::isfinite(t0) && t0 > 0.0) {
          point = t0 * (1.0 + opts.probe_delta);
        }
      }
      if (std::isfinite(point) && point > 0.0) {
        const auto mv = try_measure(zn, kind, point);
        const auto lv = try_measure(limit, kind, point);
        if (mv && lv) {
          probe.point = point;
          probe.error = std::fabs(*mv - *lv);
          sup = nan_max(sup, probe.error);
          any_present = true;
        }
      }
    }
    rep.probes.push_back(probe);
    rep.errors.push_back(std::move(row));
    rep.sup_errors.push_back(sup);
  }
  rep.empty_admissible = !any_present;
  rep.verdict = decide_verdict(rep.errors, rep.sup_errors, opts.eps_uniform);
  return rep;
}

std::string report_to_json(const ConvergenceReport& rep) {
  nlohmann::json j;
  j["family"] = rep.family;
  j["kind"] = rep.kind;
  j["eps_uniform"] = rep.eps_uniform;
  j["boundary_probes"] = rep.boundary_probes;
  j["n_list"] = rep.n_list;
  j["grid"] = rep.grid;
  nlohmann::json errs = nlohmann::json::array();
  for (const auto& row : rep.errors) {
    nlohmann::json jrow = nlohmann::json::array();
    for (double e : row) {
      if (std::isnan(e)) {
        jrow.push_back(nullptr);
      } else {
        jrow.push_back(e);
      }
    }
    errs.push_back(std::move(jrow));
  }
  j["errors"] = std::move(errs);
  nlohmann::json sups = nlohmann::json::array();
  for (double s : rep.sup_errors) {
    if (std::isnan(s)) {
      sups.push_back(nullptr);
    } else {
      sups.push_back(s);
    }
  }
  j["sup_errors"] = std::move(sups);
  nlohmann::json probes = nlohmann::json::array();
  for (const ProbeRecord& p : rep.probes) {
    if (std::isnan(p.error)) continue;
    probes.push_back({{"n", p.n}, {"theta", p.point}, {"error", p.error}});
  }
  j["probes"] = std::move(probes);
  j["verdict"] = verdict_label(rep.verdict);
  j["empty_admissible"] = rep.empty_admissible;
  return j.dump();
}

std::string report_csv_header() { return "scenario,n,theta,error\n"; }

std::string report_to_csv(const ConvergenceReport& rep,
                          const std::string& id) {
  const std::string& label = id.empty() ? rep.family : id;
  std::string out;
  for (std::size_t k = 0; k < rep.n_list.size(); ++k) {
    for (std::size_t i = 0; i < rep.grid.size(); ++i) {
      if (std::isnan(rep.errors[k][i])) continue;
      out += label;
      out += ',';
      out += std::to_string(rep.n_list[k]);
      out += ',';
      out += fmt17(rep.grid[i]);
      out += ',';
      out += fmt17(rep.errors[k][i]);
      out += '\n';
    }
    if (k < rep.probes.size() && !std::isnan(rep.probes[k].error)) {
      out += label;
      out += ',';
      out += std::to_string(rep.n_list[k]);
      out += ',';
      out += fmt17(rep.probes[k].point);
      out += ',';
      out += fmt17(rep.probes[k].error);
      out += '\n';
    }
  }
  return out;
}

}  // namespace impact
