#include "core/function_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/errors.hpp"

namespace impact {
namespace {

bool finite(double v) { return std::isfinite(v); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

[[noreturn]] void fail_domain(const std::string& msg) {
  throw DomainError(msg);
}

void check_domain_point(double x, double t) {
  if (!finite(x) || x < 0.0 || x > t) {
    fail_domain("x=" + fmt(x) + " outside domain [0, " + fmt(t) + "]");
  }
}

}  // namespace

FunctionModel FunctionModel::piecewise_linear(std::vector<Knot> knots) {
  if (knots.size() < 2) fail_domain("piecewise linear model needs >= 2 breakpoints");
  if (knots.front().x != 0.0) fail_domain("first breakpoint must sit at x=0");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const Knot& k = knots[i];
    if (!finite(k.x) || !finite(k.left_y) || !finite(k.right_y)) {
      fail_domain("non-finite breakpoint");
    }
    if (k.left_y < 0.0 || k.right_y < 0.0) {
      fail_domain("negative value at x=" + fmt(k.x));
    }
    if (i > 0 && knots[i - 1].x >= k.x) {
      fail_domain("breakpoint abscissae must be strictly increasing");
    }
    if (k.left_y < k.right_y) {
      fail_domain("upward jump at x=" + fmt(k.x) + " (left " + fmt(k.left_y) +
                  " < right " + fmt(k.right_y) + ")");
    }
    const bool boundary = (i == 0 || i + 1 == knots.size());
    if (boundary && k.left_y != k.right_y) {
      fail_domain("jump not allowed at domain endpoint x=" + fmt(k.x));
    }
  }
  PiecewiseLinear pl{std::move(knots), {}};
  pl.prefix_area.resize(pl.knots.size(), 0.0);
  for (std::size_t i = 0; i + 1 < pl.knots.size(); ++i) {
    const Knot& a = pl.knots[i];
    const Knot& b = pl.knots[i + 1];
    pl.prefix_area[i + 1] =
        pl.prefix_area[i] + (b.x - a.x) * (a.right_y + b.left_y) / 2.0;
  }
  return FunctionModel(Node(std::move(pl)));
}

FunctionModel FunctionModel::piecewise_linear_points(
    const std::vector<std::pair<double, double>>& points) {
  std::vector<Knot> knots;
  knots.reserve(points.size());
  for (const auto& [x, y] : points) knots.push_back({x, y, y});
  return piecewise_linear(std::move(knots));
}

FunctionModel FunctionModel::power_complement(int n) {
  if (n < 1) fail_domain("power complement exponent must be >= 1");
  return FunctionModel(Node(PowerComplement{n}));
}

FunctionModel FunctionModel::constant(double a, double domain_end) {
  if (!finite(a) || a < 0.0) fail_domain("constant level must be finite and >= 0");
  if (!finite(domain_end) || domain_end <= 0.0) fail_domain("domain end must be > 0");
  return FunctionModel(Node(Constant{a, domain_end}));
}

FunctionModel FunctionModel::upper_step(double domain_end, double x0,
                                        double high, double low) {
  if (!finite(domain_end) || domain_end <= 0.0) fail_domain("domain end must be > 0");
  if (!finite(x0) || x0 <= 0.0 || x0 > domain_end) {
    fail_domain("step abscissa must lie in (0, T]");
  }
  if (!finite(high) || !finite(low) || low < 0.0 || high <= low) {
    fail_domain("step levels must satisfy high > low >= 0");
  }
  return FunctionModel(Node(UpperStep{domain_end, x0, high, low}));
}

FunctionModel FunctionModel::from_citations(std::vector<double> counts,
                                            TailMode tail, bool* was_sorted) {
  if (counts.empty()) fail_domain("citation record must be nonempty");
  for (double c : counts) {
    if (!finite(c) || c < 0.0) fail_domain("citation counts must be finite and >= 0");
  }
  const bool sorted =
      std::is_sorted(counts.begin(), counts.end(), std::greater<double>());
  if (was_sorted) *was_sorted = sorted;
  if (!sorted) std::sort(counts.begin(), counts.end(), std::greater<double>());
  std::vector<std::pair<double, double>> pts;
  pts.reserve(counts.size() + 1);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    pts.emplace_back(static_cast<double>(i), counts[i]);
  }
  pts.emplace_back(static_cast<double>(counts.size()),
                   tail == TailMode::Hold ? counts.back() : 0.0);
  return piecewise_linear_points(pts);
}

double FunctionModel::domain_end() const {
  return std::visit(
      [](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, PiecewiseLinear>) {
          return m.knots.back().x;
        } else if constexpr (std::is_same_v<M, PowerComplement>) {
          return 1.0;
        } else {
          return m.domain_end;
        }
      },
      node_);
}

namespace {

// Index of the last knot with knots[i].x <= x.
std::size_t segment_index(const std::vector<Knot>& knots, double x) {
  auto it = std::upper_bound(
      knots.begin(), knots.end(), x,
      [](double v, const Knot& k) { return v < k.x; });
  return static_cast<std::size_t>(it - knots.begin()) - 1;
}

double interpolate(const Knot& a, const Knot& b, double x) {
  const double t = (x - a.x) / (b.x - a.x);
  return a.right_y + (b.left_y - a.right_y) * t;
}

}  // namespace

double FunctionModel::eval(double x) const {
  check_domain_point(x, domain_end());
  return std::visit(
      [x](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, PiecewiseLinear>) {
          const std::size_t i = segment_index(m.knots, x);
          if (m.knots[i].x == x) return m.knots[i].right_y;
          return interpolate(m.knots[i], m.knots[i + 1], x);
        } else if constexpr (std::is_same_v<M, PowerComplement>) {
          return 1.0 - std::pow(x, static_cast<double>(m.n));
        } else if constexpr (std::is_same_v<M, Constant>) {
          return m.a;
        } else {
          return x < m.x0 ? m.high : m.low;
        }
      },
      node_);
}

double FunctionModel::left_limit(double x) const {
  const double t = domain_end();
  if (!finite(x) || x <= 0.0 || x > t) {
    fail_domain("left limit needs x in (0, " + fmt(t) + "], got x=" + fmt(x));
  }
  return std::visit(
      [x](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, PiecewiseLinear>) {
          const std::size_t i = segment_index(m.knots, x);
          if (m.knots[i].x == x) return m.knots[i].left_y;
          return interpolate(m.knots[i], m.knots[i + 1], x);
        } else if constexpr (std::is_same_v<M, PowerComplement>) {
          return 1.0 - std::pow(x, static_cast<double>(m.n));
        } else if constexpr (std::is_same_v<M, Constant>) {
          return m.a;
        } else {
          return x <= m.x0 ? m.high : m.low;
        }
      },
      node_);
}

double FunctionModel::cumulative(double x) const {
  check_domain_point(x, domain_end());
  return std::visit(
      [x](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, PiecewiseLinear>) {
          const std::size_t i = segment_index(m.knots, x);
          if (m.knots[i].x == x) return m.prefix_area[i];
          const Knot& a = m.knots[i];
          const double yx = interpolate(a, m.knots[i + 1], x);
          return m.prefix_area[i] + (x - a.x) * (a.right_y + yx) / 2.0;
        } else if constexpr (std::is_same_v<M, PowerComplement>) {
          const double k = static_cast<double>(m.n) + 1.0;
          return x - std::pow(x, k) / k;
        } else if constexpr (std::is_same_v<M, Constant>) {
          return m.a * x;
        } else {
          return m.high * std::min(x, m.x0) +
                 m.low * std::max(0.0, x - m.x0);
        }
      },
      node_);
}

bool FunctionModel::is_continuous() const {
  return std::visit(
      [](const auto& m) -> bool {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, PiecewiseLinear>) {
          for (const Knot& k : m.knots) {
            if (k.left_y != k.right_y) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<M, UpperStep>) {
          return false;
        } else {
          return true;
        }
      },
      node_);
}

UMembership FunctionModel::membership() const {
  return std::visit(
      [](const auto& m) -> UMembership {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, PiecewiseLinear>) {
          for (std::size_t i = 0; i < m.knots.size(); ++i) {
            const Knot& k = m.knots[i];
            if (k.left_y != k.right_y) {
              return {false, "discontinuous at x=" + fmt(k.x) + " (left " +
                                 fmt(k.left_y) + ", right " + fmt(k.right_y) +
                                 ")"};
            }
            if (i + 1 < m.knots.size() &&
                m.knots[i + 1].left_y > k.right_y) {
              return {false, "increasing on [" + fmt(k.x) + ", " +
                                 fmt(m.knots[i + 1].x) + "] (" +
                                 fmt(k.right_y) + " < " +
                                 fmt(m.knots[i + 1].left_y) + ")"};
            }
          }
          return {true, ""};
        } else if constexpr (std::is_same_v<M, UpperStep>) {
          return {false, "discontinuous at x=" + fmt(m.x0) + " (left " +
                             fmt(m.high) + ", right " + fmt(m.low) + ")"};
        } else {
          return {true, ""};
        }
      },
      node_);
}

namespace {

void add_critical_points(const FunctionModel& f, std::vector<double>& out) {
  std::visit(
      [&out](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, FunctionModel::PiecewiseLinear>) {
          for (const Knot& k : m.knots) {
            out.push_back(k.x);
            if (k.left_y != k.right_y) {
              out.push_back(k.x - 1e-9);
              out.push_back(k.x + 1e-9);
            }
          }
        } else if constexpr (std::is_same_v<M, FunctionModel::UpperStep>) {
          out.push_back(m.x0);
          out.push_back(m.x0 - 1e-9);
          out.push_back(m.x0 + 1e-9);
        }
      },
      f.node());
}

}  // namespace

double sup_distance(const FunctionModel& f, const FunctionModel& g,
                    const SupGrid& grid) {
  const double t = f.domain_end();
  if (g.domain_end() != t) {
    fail_domain("sup distance needs a common domain ([0, " + fmt(t) +
                "] vs [0, " + fmt(g.domain_end()) + "])");
  }
  const bool exact =
      std::holds_alternative<FunctionModel::PiecewiseLinear>(f.node()) &&
      std::holds_alternative<FunctionModel::PiecewiseLinear>(g.node());
  std::vector<double> xs;
  if (!exact) {
    xs.reserve(grid.samples + grid.extra.size() + 16);
    for (std::size_t k = 0; k <= grid.samples; ++k) {
      xs.push_back(t * static_cast<double>(k) /
                   static_cast<double>(grid.samples));
    }
    xs.insert(xs.end(), grid.extra.begin(), grid.extra.end());
  }
  add_critical_points(f, xs);
  add_critical_points(g, xs);
  xs.push_back(0.0);
  xs.push_back(t);
  for (double& x : xs) x = std::clamp(x, 0.0, t);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  double best = 0.0;
  for (double x : xs) {
    best = std::max(best, std::fabs(f.eval(x) - g.eval(x)));
    if (x > 0.0) {
      best = std::max(best, std::fabs(f.left_limit(x) - g.left_limit(x)));
    }
  }
  return best;
}

FamilySpec FamilySpec::power_complement_seq() {
  return FamilySpec(Node(PcSeq{}), "power_complement_seq");
}

FamilySpec FamilySpec::constant_seq(double domain_end, double offset,
                                    double scale) {
  if (!finite(domain_end) || domain_end <= 0.0) fail_domain("domain end must be > 0");
  if (!finite(offset) || !finite(scale) || offset < 0.0 ||
      offset + scale < 0.0) {
    fail_domain("constant family rule offset + scale/n must stay >= 0");
  }
  return FamilySpec(Node(ConstSeq{domain_end, offset, scale}), "constant_seq");
}

FamilySpec FamilySpec::figure1(double s, double t) {
  if (!finite(s) || s <= 0.0 || !finite(t) || t <= 0.0) {
    fail_domain("triangular family needs S > 0 and T > 0");
  }
  return FamilySpec(Node(Fig1{s, t}), "figure1");
}

FamilySpec FamilySpec::user(std::map<int, FunctionModel> members,
                            FunctionModel limit) {
  if (members.empty()) fail_domain("user family needs at least one member");
  const double t = limit.domain_end();
  for (const auto& [n, fn] : members) {
    if (n < 1) fail_domain("member indices must be >= 1");
    if (fn.domain_end() != t) {
      fail_domain("family members must share the limit's domain");
    }
  }
  return FamilySpec(Node(User{std::move(members), std::move(limit)}), "user");
}

FunctionModel FamilySpec::member(int n) const {
  return std::visit(
      [n](const auto& fam) -> FunctionModel {
        using F = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<F, PcSeq>) {
          if (n < 1) fail_domain("member index must be >= 1");
          return FunctionModel::power_complement(n);
        } else if constexpr (std::is_same_v<F, ConstSeq>) {
          if (n < 1) fail_domain("member index must be >= 1");
          return FunctionModel::constant(fam.offset + fam.scale / n,
                                         fam.domain_end);
        } else if constexpr (std::is_same_v<F, Fig1>) {
          if (n < 3) fail_domain("triangular family members need n >= 3");
          const double s = fam.s, t = fam.t;
          return FunctionModel::piecewise_linear_points(
              {{0.0, s}, {t / 2.0, s / 2.0}, {3.0 * t / 4.0, s / n}, {t, s / n}});
        } else {
          auto it = fam.members.find(n);
          if (it == fam.members.end()) {
            fail_domain("user family has no member n=" + std::to_string(n));
          }
          return it->second;
        }
      },
      node_);
}

FunctionModel FamilySpec::limit() const {
  return std::visit(
      [](const auto& fam) -> FunctionModel {
        using F = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<F, PcSeq>) {
          return FunctionModel::upper_step(1.0, 1.0, 1.0, 0.0);
        } else if constexpr (std::is_same_v<F, ConstSeq>) {
          return FunctionModel::constant(fam.offset, fam.domain_end);
        } else if constexpr (std::is_same_v<F, Fig1>) {
          const double s = fam.s, t = fam.t;
          return FunctionModel::piecewise_linear_points(
              {{0.0, s}, {t / 2.0, s / 2.0}, {3.0 * t / 4.0, 0.0}, {t, 0.0}});
        } else {
          return fam.limit;
        }
      },
      node_);
}

int FamilySpec::min_index() const {
  return std::visit(
      [](const auto& fam) -> int {
        using F = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<F, Fig1>) {
          return 3;
        } else if constexpr (std::is_same_v<F, User>) {
          return fam.members.begin()->first;
        } else {
          return 1;
        }
      },
      node_);
}

std::vector<int> FamilySpec::indices() const {
  std::vector<int> out;
  if (const auto* u = std::get_if<User>(&node_)) {
    out.reserve(u->members.size());
    for (const auto& [n, fn] : u->members) out.push_back(n);
  }
  return out;
}

}  // namespace impact
