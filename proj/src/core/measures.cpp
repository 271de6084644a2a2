#include "core/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "core/errors.hpp"

namespace impact {
namespace {

constexpr int kMaxIterations = 200;
constexpr double kResidualScale = 1e-12;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void check_positive(double v, const char* name) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw DomainError(std::string(name) + " must be finite and > 0, got " +
                      fmt(v));
  }
}

void check_theta_range(const FunctionModel& f, double theta,
                       const char* what) {
  const double t = f.domain_end();
  if (!std::isfinite(theta) || theta < 0.0 || theta > t) {
    throw DomainError(std::string(what) + " needs theta in [0, " + fmt(t) +
                      "], got " + fmt(theta));
  }
}

// Crossing measures are defined on continuous nonincreasing models only.
void require_u(const FunctionModel& f, const char* what) {
  const UMembership m = f.membership();
  if (m.in_u) return;
  if (!f.is_continuous()) {
    throw ContinuityRequiredError(std::string(what) +
                                  " requires a continuous model: " + m.reason);
  }
  throw DomainError(std::string(what) +
                    " requires a nonincreasing model: " + m.reason);
}

// Bracketed bisection for a function with d(lo) >= 0 >= d(hi) and a single
// sign change. Stops once the residual satisfies the relative tolerance and
// the bracket width is resolved, or at the iteration cap.
template <typename D>
double bisect(D&& d, double lo, double hi, double residual_tol) {
  const double width_tol = 1e-12 * (1.0 + hi);
  for (int it = 0; it < kMaxIterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double dm = d(mid);
    if (std::fabs(dm) <= residual_tol && (hi - lo) <= width_tol) return mid;
    if (dm > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double residual_tolerance(const FunctionModel& f) {
  return kResidualScale * (1.0 + f.eval(0.0));
}

}  // namespace

FSpec FSpec::linear(double theta) {
  check_positive(theta, "comparison slope theta");
  return FSpec(Node(Linear{theta}));
}

FSpec FSpec::power(double theta, double p) {
  check_positive(theta, "comparison scale theta");
  check_positive(p, "comparison exponent p");
  return FSpec(Node(Power{theta, p}));
}

FSpec FSpec::increasing_polyline(
    std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) {
    throw DomainError("increasing polyline needs >= 2 points");
  }
  if (points.front().first != 0.0) {
    throw DomainError("increasing polyline must start at x=0");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i].first) || !std::isfinite(points[i].second)) {
      throw DomainError("non-finite polyline point");
    }
    if (i > 0 && (points[i - 1].first >= points[i].first ||
                  points[i - 1].second >= points[i].second)) {
      throw DomainError("polyline must be strictly increasing in x and y");
    }
  }
  return FSpec(Node(IncreasingPolyline{std::move(points)}));
}

double FSpec::eval(double x) const {
  return std::visit(
      [x](const auto& c) -> double {
        using C = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<C, Linear>) {
          return c.theta * x;
        } else if constexpr (std::is_same_v<C, Power>) {
          return c.theta * std::pow(x, c.p);
        } else {
          const auto& pts = c.points;
          if (x < pts.front().first || x > pts.back().first) {
            throw DomainError("x=" + fmt(x) +
                              " outside the comparison polyline domain");
          }
          auto it = std::upper_bound(
              pts.begin(), pts.end(), x,
              [](double v, const auto& p) { return v < p.first; });
          const std::size_t i = static_cast<std::size_t>(it - pts.begin()) - 1;
          if (pts[i].first == x) return pts[i].second;
          const auto& a = pts[i];
          const auto& b = pts[i + 1];
          const double t = (x - a.first) / (b.first - a.first);
          return a.second + (b.second - a.second) * t;
        }
      },
      node_);
}

double FSpec::domain_end() const {
  if (const auto* poly = std::get_if<IncreasingPolyline>(&node_)) {
    return poly->points.back().first;
  }
  return std::numeric_limits<double>::infinity();
}

double i_theta(const FunctionModel& f, double theta) {
  check_theta_range(f, theta, "cumulative impact");
  return f.cumulative(theta);
}

double mu_theta(const FunctionModel& f, double theta) {
  check_theta_range(f, theta, "average impact");
  if (theta == 0.0) return f.eval(0.0);
  return f.cumulative(theta) / theta;
}

double percentile(const FunctionModel& f, double theta) {
  check_theta_range(f, theta, "percentile");
  return f.eval(theta);
}

namespace {

double h_exact_pwl(const FunctionModel::PiecewiseLinear& pl, double theta) {
  const auto& kn = pl.knots;
  for (std::size_t i = kn.size() - 2;; --i) {
    const double di = kn[i].right_y - theta * kn[i].x;
    if (di >= 0.0 || i == 0) {
      const double x1 = kn[i].x, y1 = kn[i].right_y;
      const double x2 = kn[i + 1].x, y2 = kn[i + 1].left_y;
      const double s = (y2 - y1) / (x2 - x1);
      const double root = (y1 - s * x1) / (theta - s);
      return std::clamp(root, x1, x2);
    }
  }
}

// Largest root of qa*u^2 + qb*u + qc on [0, len] (qa < 0), via the stable
// quadratic formula; falls back to sign bisection if roundoff pushes both
// roots out of range.
double largest_quadratic_root(double qa, double qb, double qc, double len) {
  const double disc = std::max(0.0, qb * qb - 4.0 * qa * qc);
  const double sq = std::sqrt(disc);
  const double q = qb >= 0.0 ? -0.5 * (qb + sq) : -0.5 * (qb - sq);
  const double slack = 1e-9 * (1.0 + len);
  double best = std::numeric_limits<double>::quiet_NaN();
  for (double u : {q / qa, q != 0.0 ? qc / q : 0.0}) {
    if (std::isfinite(u) && u >= -slack && u <= len + slack) {
      if (std::isnan(best) || u > best) best = u;
    }
  }
  if (!std::isnan(best)) return std::clamp(best, 0.0, len);
  double lo = 0.0, hi = len;
  for (int it = 0; it < kMaxIterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = (qa * mid + qb) * mid + qc;
    if (gm > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double g_exact_pwl(const FunctionModel::PiecewiseLinear& pl, double theta) {
  const auto& kn = pl.knots;
  for (std::size_t i = kn.size() - 2;; --i) {
    const double gi = pl.prefix_area[i] - theta * kn[i].x * kn[i].x;
    if (gi > 0.0 || i == 0) {
      const double x1 = kn[i].x, y1 = kn[i].right_y;
      const double x2 = kn[i + 1].x, y2 = kn[i + 1].left_y;
      const double len = x2 - x1;
      const double s = (y2 - y1) / len;
      const double qa = 0.5 * s - theta;
      const double qb = y1 - 2.0 * theta * x1;
      const double qc = pl.prefix_area[i] - theta * x1 * x1;
      return std::clamp(x1 + largest_quadratic_root(qa, qb, qc, len), x1, x2);
    }
  }
}

}  // namespace

double h_theta(const FunctionModel& f, double theta) {
  check_positive(theta, "theta");
  require_u(f, "the h crossing");
  const double t = f.domain_end();
  const double zt = f.eval(t);
  if (zt > theta * t) {
    throw NotAdmissibleError(
        "h not admissible at theta=" + fmt(theta) +
            ": smallest admissible theta is F(T)/T = " + fmt(zt / t),
        zt / t);
  }
  if (f.eval(0.0) == 0.0) return 0.0;
  if (const auto* c = std::get_if<FunctionModel::Constant>(&f.node())) {
    return std::min(c->a / theta, t);
  }
  if (const auto* pl =
          std::get_if<FunctionModel::PiecewiseLinear>(&f.node())) {
    return h_exact_pwl(*pl, theta);
  }
  return bisect([&](double x) { return f.eval(x) - theta * x; }, 0.0, t,
                residual_tolerance(f));
}

double h_theta_bisect(const FunctionModel& f, double theta) {
  check_positive(theta, "theta");
  require_u(f, "the h crossing");
  const double t = f.domain_end();
  const double zt = f.eval(t);
  if (zt > theta * t) {
    throw NotAdmissibleError(
        "h not admissible at theta=" + fmt(theta) +
            ": smallest admissible theta is F(T)/T = " + fmt(zt / t),
        zt / t);
  }
  if (f.eval(0.0) == 0.0) return 0.0;
  return bisect([&](double x) { return f.eval(x) - theta * x; }, 0.0, t,
                residual_tolerance(f));
}

namespace {

// Shared admissibility gate for the g crossing; returns cumulative(T).
double g_admissibility(const FunctionModel& f, double theta) {
  const double t = f.domain_end();
  const double yt = f.cumulative(t);
  if (yt > theta * t * t) {
    throw NotAdmissibleError(
        "g not admissible at theta=" + fmt(theta) +
            ": smallest admissible theta is cumulative(T)/T^2 = " +
            fmt(yt / (t * t)),
        yt / (t * t));
  }
  return yt;
}

double g_bisect_impl(const FunctionModel& f, double theta) {
  const double t = f.domain_end();
  auto g = [&](double x) { return f.cumulative(x) - theta * x * x; };
  if (g(t) == 0.0) return t;
  double lo = t;
  bool bracketed = false;
  for (int it = 0; it < kMaxIterations; ++it) {
    lo *= 0.5;
    if (g(lo) > 0.0) {
      bracketed = true;
      break;
    }
  }
  if (!bracketed) return 0.0;
  return bisect(g, lo, t, residual_tolerance(f));
}

}  // namespace

double g_theta(const FunctionModel& f, double theta) {
  check_positive(theta, "theta");
  require_u(f, "the g crossing");
  g_admissibility(f, theta);
  if (f.eval(0.0) == 0.0) return 0.0;
  if (const auto* c = std::get_if<FunctionModel::Constant>(&f.node())) {
    return std::min(c->a / theta, f.domain_end());
  }
  if (const auto* pl =
          std::get_if<FunctionModel::PiecewiseLinear>(&f.node())) {
    return g_exact_pwl(*pl, theta);
  }
  return g_bisect_impl(f, theta);
}

double g_theta_bisect(const FunctionModel& f, double theta) {
  check_positive(theta, "theta");
  require_u(f, "the g crossing");
  g_admissibility(f, theta);
  if (f.eval(0.0) == 0.0) return 0.0;
  return g_bisect_impl(f, theta);
}

namespace {

bool effectively_linear(const FSpec& curve, double* theta_out) {
  if (const auto* lin = std::get_if<FSpec::Linear>(&curve.node())) {
    *theta_out = lin->theta;
    return true;
  }
  if (const auto* pw = std::get_if<FSpec::Power>(&curve.node())) {
    if (pw->p == 1.0) {
      *theta_out = pw->theta;
      return true;
    }
  }
  return false;
}

// Admissibility for an arbitrary increasing comparison curve. Returns the
// smallest admissible scale for the scale-parameterized curve kinds, NaN
// for polylines.
double ped_admissibility(const FunctionModel& f, const FSpec& curve) {
  const double t = f.domain_end();
  if (curve.domain_end() < t) {
    throw DomainError("comparison curve does not cover the model domain");
  }
  const double z0 = f.eval(0.0);
  const double f0 = curve.eval(0.0);
  if (z0 < f0) {
    throw NotAdmissibleError(
        "crossing not admissible: comparison curve starts above the model "
        "(F(0)=" +
            fmt(z0) + " < f(0)=" + fmt(f0) + ")",
        std::numeric_limits<double>::quiet_NaN());
  }
  const double zt = f.eval(t);
  const double ft = curve.eval(t);
  if (zt > ft) {
    double theta0 = std::numeric_limits<double>::quiet_NaN();
    if (const auto* lin = std::get_if<FSpec::Linear>(&curve.node())) {
      (void)lin;
      theta0 = zt / t;
    } else if (const auto* pw = std::get_if<FSpec::Power>(&curve.node())) {
      theta0 = zt / std::pow(t, pw->p);
    }
    throw NotAdmissibleError(
        "crossing not admissible: model ends above the comparison curve "
        "(F(T)=" +
            fmt(zt) + " > f(T)=" + fmt(ft) + ")",
        theta0);
  }
  return 0.0;
}

double ped_exact_lines(const FunctionModel& f, const FSpec& curve) {
  const auto* pl = std::get_if<FunctionModel::PiecewiseLinear>(&f.node());
  const double t = f.domain_end();
  std::vector<double> xs;
  if (pl) {
    for (const Knot& k : pl->knots) xs.push_back(k.x);
  } else {
    xs.push_back(0.0);
    xs.push_back(t);
  }
  if (const auto* poly =
          std::get_if<FSpec::IncreasingPolyline>(&curve.node())) {
    for (const auto& [x, y] : poly->points) {
      if (x >= 0.0 && x <= t) xs.push_back(x);
    }
    xs.push_back(t);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  auto d = [&](double x) { return f.eval(x) - curve.eval(x); };
  for (std::size_t i = xs.size() - 1;; --i) {
    const double d1 = d(xs[i - 1]);
    if (d1 >= 0.0 || i == 1) {
      const double d2 = d(xs[i]);
      if (d1 == d2) return xs[i];  // flat zero residual, take the right end
      const double root = xs[i - 1] + (xs[i] - xs[i - 1]) * d1 / (d1 - d2);
      return std::clamp(root, xs[i - 1], xs[i]);
    }
  }
}

}  // namespace

double ped_measure(const FunctionModel& f, const FSpec& curve) {
  require_u(f, "the comparison crossing");
  ped_admissibility(f, curve);
  if (f.eval(0.0) == 0.0 && curve.eval(0.0) == 0.0) return 0.0;
  double theta = 0.0;
  const bool model_linear =
      std::holds_alternative<FunctionModel::PiecewiseLinear>(f.node()) ||
      std::holds_alternative<FunctionModel::Constant>(f.node());
  const bool curve_linear =
      effectively_linear(curve, &theta) ||
      std::holds_alternative<FSpec::IncreasingPolyline>(curve.node());
  if (model_linear && curve_linear) return ped_exact_lines(f, curve);
  return ped_measure_bisect(f, curve);
}

double ped_measure_bisect(const FunctionModel& f, const FSpec& curve) {
  require_u(f, "the comparison crossing");
  ped_admissibility(f, curve);
  if (f.eval(0.0) == 0.0 && curve.eval(0.0) == 0.0) return 0.0;
  const double t = f.domain_end();
  return bisect([&](double x) { return f.eval(x) - curve.eval(x); }, 0.0, t,
                residual_tolerance(f));
}

double kosmulski(const FunctionModel& f, double theta, double p) {
  return ped_measure(f, FSpec::power(theta, p));
}

double r_theta(const FunctionModel& f, double theta) {
  const double h = h_theta(f, theta);
  return std::sqrt(f.cumulative(h));
}

double polar_measure(const FunctionModel& f, double phi) {
  if (!std::isfinite(phi) || phi <= 0.0 || phi >= std::atan(1.0) * 2.0) {
    throw DomainError("polar angle must lie in (0, pi/2), got " + fmt(phi));
  }
  const double theta = std::tan(phi);
  return h_theta(f, theta) * std::hypot(1.0, theta);
}

}  // namespace impact
