// Acceptance gate: eight end-to-end criteria covering closed forms on
// constant models, the shrinking-tail family, residuals and solver
// cross-checks on randomized piecewise linear models, the scenario suite,
// monotone-family uniformity, measure identities, and the CLI
// classification.  Prints one [PASS]/[FAIL] line per criterion and exits
// nonzero if any fails.
#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "core/bundles.hpp"
#include "core/convergence.hpp"
#include "core/errors.hpp"
#include "core/function_model.hpp"
#include "core/measures.hpp"
#include "core/scenarios.hpp"

namespace {

using impact::FamilySpec;
using impact::FSpec;
using impact::FunctionModel;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// ------------------------------------------------------------ shared PWL RNG

// Strictly increasing abscissae 0 = x_0 < ... < x_{k-1} = T with bounded
// gap ratios, so segment slopes stay moderate and residual tolerances hold
// uniformly across the randomized corpus.
std::vector<double> random_abscissae(std::mt19937& rng, double domain_end,
                                     int knots) {
  std::uniform_real_distribution<double> gap(0.5, 1.5);
  std::vector<double> gaps(static_cast<size_t>(knots) - 1);
  double total = 0.0;
  for (double& g : gaps) total += (g = gap(rng));
  std::vector<double> xs(static_cast<size_t>(knots), 0.0);
  double acc = 0.0;
  for (size_t i = 0; i + 1 < xs.size(); ++i) {
    acc += gaps[i] / total;
    xs[i + 1] = domain_end * acc;
  }
  xs.back() = domain_end;
  return xs;
}

// Nonincreasing nonnegative ordinates; occasional flat segments, occasional
// zero tail.
std::vector<double> random_ordinates(std::mt19937& rng, size_t count,
                                     double top_lo, double top_hi) {
  std::uniform_real_distribution<double> top(top_lo, top_hi);
  std::uniform_real_distribution<double> drop(0.05, 0.6);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<double> ys(count);
  ys[0] = top(rng);
  for (size_t i = 1; i < count; ++i) {
    const double d = coin(rng) < 0.2 ? 0.0 : drop(rng) * ys[0] / double(count);
    ys[i] = std::max(0.0, ys[i - 1] - d);
  }
  if (coin(rng) < 0.3) ys.back() = 0.0;
  return ys;
}

FunctionModel random_pwl(std::mt19937& rng) {
  std::uniform_real_distribution<double> ut(0.5, 3.0);
  std::uniform_int_distribution<int> uk(3, 8);
  const double domain_end = ut(rng);
  const int knots = uk(rng);
  const std::vector<double> xs = random_abscissae(rng, domain_end, knots);
  const std::vector<double> ys =
      random_ordinates(rng, xs.size(), 0.5, 3.0);
  std::vector<std::pair<double, double>> points;
  for (size_t i = 0; i < xs.size(); ++i) points.emplace_back(xs[i], ys[i]);
  return FunctionModel::piecewise_linear_points(points);
}

// Strictly admissible parameter above the threshold for the given kind.
double admissible_theta(std::mt19937& rng, const FunctionModel& f,
                        const impact::BundleKind& kind) {
  std::uniform_real_distribution<double> mul(0.05, 0.5);
  std::uniform_real_distribution<double> add(0.05, 0.5);
  return impact::theta0_for(f, kind) * (1.0 + mul(rng)) + add(rng);
}

impact::BundleKind kind_of(impact::BundleKindId id, double p = 1.0) {
  impact::BundleKind k;
  k.id = id;
  k.p = p;
  return k;
}

// ----------------------------------------------------------------- criteria

bool c1_constant_closed_forms(std::string* detail) {
  std::mt19937 rng(20250825);
  std::uniform_real_distribution<double> ua(0.1, 5.0);
  std::uniform_real_distribution<double> ut(0.5, 10.0);
  std::uniform_real_distribution<double> um(0.001, 3.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double a = ua(rng);
    const double domain_end = ut(rng);
    const double theta = (a / domain_end) * (1.0 + um(rng));
    const FunctionModel f = FunctionModel::constant(a, domain_end);
    const double expect = a / theta;
    const double dh = std::fabs(impact::h_theta(f, theta) - expect);
    const double dg = std::fabs(impact::g_theta(f, theta) - expect);
    worst = std::max({worst, dh, dg});
    if (dh > 1e-12 || dg > 1e-12) {
      *detail = "a=" + fmt(a) + " theta=" + fmt(theta) + " |dh|=" + fmt(dh) +
                " |dg|=" + fmt(dg);
      return false;
    }
  }
  *detail = "worst |deviation| = " + fmt(worst);
  return true;
}

bool c2_shrinking_tail_h(std::string* detail) {
  const FamilySpec family = FamilySpec::figure1(1.0, 1.0);
  double worst = 0.0;
  for (int n : {10, 100, 1000}) {
    const FunctionModel zn = family.member(n);
    const double lo = (1.0 / n) * (1.0 + 1e-9);
    const double hi = (4.0 / (3.0 * n)) * (1.0 - 1e-9);
    for (int i = 0; i < 25; ++i) {
      const double theta = lo + (hi - lo) * i / 24.0;
      const double expect = 1.0 / (n * theta);
      const double d = std::fabs(impact::h_theta(zn, theta) - expect);
      worst = std::max(worst, d);
      if (d > 1e-12) {
        *detail = "n=" + std::to_string(n) + " theta=" + fmt(theta) +
                  " |dh|=" + fmt(d);
        return false;
      }
    }
  }
  *detail = "worst |h - S/(n theta)| = " + fmt(worst);
  return true;
}

bool c3_crossing_residuals(std::string* detail) {
  std::mt19937 rng(424242);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_real_distribution<double> up(0.5, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const FunctionModel f = random_pwl(rng);
    const double domain_end = f.domain_end();
    const double top = f.eval(0.0);
    const double tol = 1e-9 * (1.0 + top);

    const double th = admissible_theta(rng, f, kind_of(impact::BundleKindId::H));
    const double h = impact::h_theta(f, th);
    const double res_h = std::fabs(f.eval(h) - th * h);

    const double tg = admissible_theta(rng, f, kind_of(impact::BundleKindId::G));
    const double g = impact::g_theta(f, tg);
    const double res_g = std::fabs(f.cumulative(g) - tg * g * g);

    // Crossing against a linear, power, or polyline comparison curve.
    double res_f = 0.0;
    const double pick = coin(rng);
    if (pick < 0.34) {
      const double theta =
          admissible_theta(rng, f, kind_of(impact::BundleKindId::H));
      const double x = impact::ped_measure(f, FSpec::linear(theta));
      res_f = std::fabs(f.eval(x) - theta * x);
    } else if (pick < 0.67) {
      const double p = up(rng);
      const double theta = admissible_theta(
          rng, f, kind_of(impact::BundleKindId::Kosmulski, p));
      const double x = impact::kosmulski(f, theta, p);
      res_f = std::fabs(f.eval(x) - theta * std::pow(x, p));
    } else {
      const double mid = up(rng);  // increasing polyline through three points
      const FSpec spec = FSpec::increasing_polyline(
          {{0.0, 0.0},
           {domain_end / 3.0, mid},
           {domain_end, mid + top + 1.0}});
      const double x = impact::ped_measure(f, spec);
      res_f = std::fabs(f.eval(x) - spec.eval(x));
    }

    worst = std::max({worst, res_h, res_g, res_f});
    if (res_h > tol || res_g > tol || res_f > tol) {
      *detail = "trial " + std::to_string(trial) + ": residuals " +
                fmt(res_h) + "/" + fmt(res_g) + "/" + fmt(res_f) +
                " exceed " + fmt(tol);
      return false;
    }
  }
  *detail = "worst residual = " + fmt(worst);
  return true;
}

bool c4_independent_solvers_agree(std::string* detail) {
  std::mt19937 rng(515151);
  double worst = 0.0;
  std::vector<FunctionModel> riemann_cases;
  for (int trial = 0; trial < 500; ++trial) {
    const FunctionModel f = random_pwl(rng);
    if (riemann_cases.size() < 10) riemann_cases.push_back(f);
    const double top = f.eval(0.0);

    const double th = admissible_theta(rng, f, kind_of(impact::BundleKindId::H));
    const double dh =
        std::fabs(impact::h_theta(f, th) - impact::h_theta_bisect(f, th));

    const double tg = admissible_theta(rng, f, kind_of(impact::BundleKindId::G));
    const double dg =
        std::fabs(impact::g_theta(f, tg) - impact::g_theta_bisect(f, tg));

    const FSpec spec = FSpec::increasing_polyline(
        {{0.0, 0.0}, {f.domain_end(), top + 1.0}});
    const double dp = std::fabs(impact::ped_measure(f, spec) -
                                impact::ped_measure_bisect(f, spec));

    worst = std::max({worst, dh, dg, dp});
    if (dh > 1e-9 || dg > 1e-9 || dp > 1e-9) {
      *detail = "trial " + std::to_string(trial) + ": |exact - bisect| = " +
                fmt(std::max({dh, dg, dp}));
      return false;
    }
  }

  // Closed-form integrals against a brute-force midpoint rule.
  double worst_rel = 0.0;
  for (const FunctionModel& f : riemann_cases) {
    for (double frac : {0.37, 1.0}) {
      const double x = frac * f.domain_end();
      const size_t panels = 1000000;
      const double dx = x / double(panels);
      double sum = 0.0;
      for (size_t i = 0; i < panels; ++i) {
        sum += f.eval((double(i) + 0.5) * dx);
      }
      sum *= dx;
      const double exact = f.cumulative(x);
      const double rel =
          std::fabs(sum - exact) / std::max(1e-300, std::fabs(exact));
      worst_rel = std::max(worst_rel, rel);
      if (rel > 1e-6) {
        *detail = "cumulative vs Riemann relative error " + fmt(rel);
        return false;
      }
    }
  }
  *detail = "worst |exact - bisect| = " + fmt(worst) +
            ", worst Riemann rel. err = " + fmt(worst_rel);
  return true;
}

double stat_of(const std::vector<impact::ScenarioResult>& results,
               const std::string& id, const std::string& key) {
  for (const auto& r : results) {
    if (r.id != id) continue;
    auto it = r.stats.find(key);
    if (it != r.stats.end()) return it->second;
  }
  return std::nan("");
}

bool c5_scenario_suite(std::string* detail) {
  const std::vector<impact::ScenarioResult> results = impact::run_scenarios();
  std::string failed;
  for (const auto& r : results) {
    if (!r.pass) failed += (failed.empty() ? "" : ", ") + r.id;
  }
  if (!failed.empty()) {
    *detail = "failing scenarios: " + failed;
    return false;
  }
  const double mu_sup = stat_of(results, "S7", "mu_sup_at_largest_n");
  const double h_grid = stat_of(results, "S9", "max_grid_error_at_largest_n");
  const double h_sup = stat_of(results, "S9", "min_sup_error");
  const double mf_member = stat_of(results, "S11", "member_value_max");
  const double mf_limit = stat_of(results, "S11", "limit_value");
  if (!(mu_sup < 1e-3)) {
    *detail = "average-impact sup error at the largest member = " + fmt(mu_sup);
    return false;
  }
  if (!(h_grid < 1e-3)) {
    *detail = "h fixed-grid error at the largest member = " + fmt(h_grid);
    return false;
  }
  if (!(h_sup >= 0.2)) {
    *detail = "h probed sup error dropped to " + fmt(h_sup);
    return false;
  }
  if (!(mf_member == 0.0 && mf_limit == 1.0)) {
    *detail = "step-transform values: member max " + fmt(mf_member) +
              ", limit " + fmt(mf_limit);
    return false;
  }
  *detail = "12 scenarios pass; mu sup " + fmt(mu_sup) + ", h grid " +
            fmt(h_grid) + ", h probed sup " + fmt(h_sup);
  return true;
}

bool c6_monotone_families_uniform(std::string* detail) {
  std::mt19937 rng(606060);
  std::uniform_real_distribution<double> ua(0.2, 1.0);
  std::uniform_real_distribution<double> upow(0.75, 1.5);
  const std::vector<int> n_list = {3,    10,   30,    100,   300,
                                   1000, 3000, 10000, 30000, 100000};
  double worst_last = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const FunctionModel limit = random_pwl(rng);
    const auto& node =
        std::get<FunctionModel::PiecewiseLinear>(limit.node());
    std::vector<double> xs;
    for (const impact::Knot& k : node.knots) xs.push_back(k.x);
    // Nonincreasing bump sharing the limit's breakpoints, positive at 0.
    const std::vector<double> bump =
        random_ordinates(rng, xs.size(), 0.5, 2.0);
    const double amp = ua(rng);
    const double decay = upow(rng);

    std::map<int, FunctionModel> members;
    for (int n : n_list) {
      const double eps_n = amp * std::pow(double(n), -decay);
      std::vector<std::pair<double, double>> points;
      for (size_t i = 0; i < xs.size(); ++i) {
        points.emplace_back(xs[i], limit.eval(xs[i]) + eps_n * bump[i]);
      }
      members.emplace(n, FunctionModel::piecewise_linear_points(points));
    }
    const FamilySpec family = FamilySpec::user(std::move(members), limit);

    impact::ConvergeOptions opts;
    opts.n_list = n_list;
    std::vector<double> grid = xs;  // breakpoints plus midpoints
    for (size_t i = 0; i + 1 < xs.size(); ++i) {
      grid.push_back(0.5 * (xs[i] + xs[i + 1]));
    }
    std::sort(grid.begin(), grid.end());
    const impact::ConvergenceReport rep =
        impact::function_convergence(family, grid, opts);

    for (size_t k = 0; k + 1 < rep.sup_errors.size(); ++k) {
      if (!(rep.sup_errors[k + 1] < rep.sup_errors[k])) {
        *detail = "trial " + std::to_string(trial) +
                  ": sup distance not strictly decreasing at member " +
                  std::to_string(rep.n_list[k + 1]);
        return false;
      }
    }
    const double last = rep.sup_errors.back();
    worst_last = std::max(worst_last, last);
    if (!(last < 1e-3)) {
      *detail = "trial " + std::to_string(trial) +
                ": final sup distance = " + fmt(last);
      return false;
    }
    if (rep.verdict != impact::Verdict::UniformEvidence) {
      *detail = "trial " + std::to_string(trial) + ": verdict " +
                impact::verdict_label(rep.verdict);
      return false;
    }
  }
  *detail = "50 families uniform; largest final sup distance = " +
            fmt(worst_last);
  return true;
}

bool c7_identities_and_monotonicity(std::string* detail) {
  std::mt19937 rng(707070);
  for (int trial = 0; trial < 500; ++trial) {
    const FunctionModel f = random_pwl(rng);
    const double domain_end = f.domain_end();

    const double base =
        std::max(impact::theta0_for(f, kind_of(impact::BundleKindId::H)),
                 impact::theta0_for(f, kind_of(impact::BundleKindId::G))) *
            1.05 +
        0.05;
    std::vector<double> hs, gs, rs;
    for (int j = 0; j < 6; ++j) {
      const double theta = base * (1.0 + 0.4 * j);
      const double h = impact::h_theta(f, theta);
      const double g = impact::g_theta(f, theta);
      const double r = impact::r_theta(f, theta);
      if (g < h - 1e-12) {
        *detail = "trial " + std::to_string(trial) + ": g = " + fmt(g) +
                  " fell below h = " + fmt(h);
        return false;
      }
      const double area_h = f.cumulative(h);
      if (std::fabs(r * r - area_h) > 1e-9 * (1.0 + area_h)) {
        *detail = "trial " + std::to_string(trial) +
                  ": r^2 mismatch " + fmt(std::fabs(r * r - area_h));
        return false;
      }
      hs.push_back(h);
      gs.push_back(g);
      rs.push_back(r);
    }

    std::vector<double> is, mus, ps;
    for (int j = 1; j <= 6; ++j) {
      const double x = domain_end * (j / 6.0);  // j = 6 lands exactly on T
      const double integral = impact::i_theta(f, x);
      const double mu = impact::mu_theta(f, x);
      if (std::fabs(integral - x * mu) > 1e-9 * (1.0 + integral)) {
        *detail = "trial " + std::to_string(trial) + ": I != theta * mu by " +
                  fmt(std::fabs(integral - x * mu));
        return false;
      }
      is.push_back(integral);
      mus.push_back(mu);
      ps.push_back(impact::percentile(f, x));
    }

    auto nonincreasing = [](const std::vector<double>& v) {
      for (size_t i = 0; i + 1 < v.size(); ++i) {
        if (v[i + 1] > v[i] + 1e-12 * (1.0 + std::fabs(v[i]))) return false;
      }
      return true;
    };
    auto nondecreasing = [](const std::vector<double>& v) {
      for (size_t i = 0; i + 1 < v.size(); ++i) {
        if (v[i + 1] < v[i] - 1e-12 * (1.0 + std::fabs(v[i]))) return false;
      }
      return true;
    };
    if (!nonincreasing(hs) || !nonincreasing(gs) || !nonincreasing(rs) ||
        !nonincreasing(mus) || !nonincreasing(ps) || !nondecreasing(is)) {
      *detail = "trial " + std::to_string(trial) + ": monotonicity violated";
      return false;
    }
  }
  *detail = "identities and monotonicities hold on 500 randomized models";
  return true;
}

bool c8_cli_classification(std::string* detail) {
  const std::string cmd =
      std::string(IMPACTCTL_PATH) + " classify --format json 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    *detail = "could not launch the CLI";
    return false;
  }
  std::string output;
  char buf[4096];
  size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) {
    output.append(buf, got);
  }
  const int status = pclose(pipe);
  const int exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  if (exit_code != 0) {
    *detail = "classify exited with " + std::to_string(exit_code);
    return false;
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(output);
  } catch (const std::exception& e) {
    *detail = std::string("classify emitted invalid JSON: ") + e.what();
    return false;
  }
  if (j.at("all_pass") != true) {
    *detail = "scenario suite reported failures";
    return false;
  }
  std::map<std::string, nlohmann::json> rows;
  for (const auto& row : j.at("classification")) {
    rows[row.at("bundle").get<std::string>()] = row;
  }
  const std::set<std::string> expect_pc = {"i", "mu",        "g",  "h",
                                           "r", "kosmulski", "ped"};
  for (const std::string& b : expect_pc) {
    if (!rows.count(b) || rows[b].at("pc") != true) {
      *detail = "'" + b + "' missing pointwise preservation";
      return false;
    }
  }
  for (const std::string b : {"i", "mu", "percentile"}) {
    if (!rows.count(b) || rows[b].at("uc") != true) {
      *detail = "'" + b + "' missing uniform preservation";
      return false;
    }
  }
  if (!rows.count("mf") || rows["mf"].at("uc") != true ||
      rows["mf"].at("pc") != false) {
    *detail = "step transform not classified as uniform-only";
    return false;
  }
  if (!rows.count("mlimit") || rows["mlimit"].at("pcstar") != true ||
      rows["mlimit"].at("pc") != false || rows["mlimit"].at("uc") != false) {
    *detail = "left-limit average not classified as continuous-only";
    return false;
  }
  *detail = "classification table and suite verdicts as declared";
  return true;
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* title;
    std::function<bool(std::string*)> run;
  };
  const std::vector<Criterion> criteria = {
      {"c1", "h and g on constant models equal a/theta", c1_constant_closed_forms},
      {"c2", "shrinking-tail h matches S/(n theta) in the tail window",
       c2_shrinking_tail_h},
      {"c3", "crossing residuals vanish on randomized polylines",
       c3_crossing_residuals},
      {"c4", "exact solvers agree with bisection and brute-force integrals",
       c4_independent_solvers_agree},
      {"c5", "canonical scenario suite passes with pinned statistics",
       c5_scenario_suite},
      {"c6", "monotone shrinking families converge uniformly",
       c6_monotone_families_uniform},
      {"c7", "measure identities and parameter monotonicity hold",
       c7_identities_and_monotonicity},
      {"c8", "CLI classification matches the declared bundle classes",
       c8_cli_classification},
  };
  bool all = true;
  for (const Criterion& c : criteria) {
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(&detail);
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("unexpected exception: ") + e.what();
    }
    all = all && ok;
    std::printf("[%s] %s %s%s%s\n", ok ? "PASS" : "FAIL", c.id, c.title,
                detail.empty() ? "" : " — ", detail.c_str());
  }
  return all ? 0 : 1;
}
