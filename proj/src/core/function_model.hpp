#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace impact {

// A breakpoint of a piecewise linear model. The stored value of the function
// at x is right_y (right-limit convention); left_y is the limit from the
// left and may exceed right_y at a downward jump. Both coincide at
// continuity points and at the domain endpoints.
struct Knot {
  double x;
  double left_y;
  double right_y;
};

struct UMembership {
  bool in_u;           // continuous, nonincreasing, nonnegative on [0, T]
  std::string reason;  // first violated condition, empty when in_u
};

enum class TailMode { Hold, Zero };

// Continuous-rank model of a decreasing rank-frequency function on [0, T].
class FunctionModel {
 public:
  struct PiecewiseLinear {
    std::vector<Knot> knots;
    std::vector<double> prefix_area;  // integral from 0 to knots[i].x
  };
  struct PowerComplement {  // 1 - x^n on [0, 1]
    int n;
  };
  struct Constant {  // a on [0, T]
    double a;
    double domain_end;
  };
  struct UpperStep {  // high on [0, x0), low on [x0, T]; x0 in (0, T]
    double domain_end;
    double x0;
    double high;
    double low;
  };
  using Node = std::variant<PiecewiseLinear, PowerComplement, Constant, UpperStep>;

  static FunctionModel piecewise_linear(std::vector<Knot> knots);
  static FunctionModel piecewise_linear_points(
      const std::vector<std::pair<double, double>>& points);
  static FunctionModel power_complement(int n);
  static FunctionModel constant(double a, double domain_end);
  static FunctionModel upper_step(double domain_end, double x0, double high,
                                  double low);
  // Builds the rank-frequency polyline of a citation record: breakpoints
  // (i-1, counts[i-1]) closed with (N, counts[N-1]) under Hold or (N, 0)
  // under Zero. Counts are sorted nonincreasing first; *was_sorted reports
  // whether the input already was.
  static FunctionModel from_citations(std::vector<double> counts,
                                      TailMode tail,
                                      bool* was_sorted = nullptr);

  double domain_end() const;
  double eval(double x) const;        // x in [0, T]
  double left_limit(double x) const;  // x in (0, T]
  double cumulative(double x) const;  // integral of eval over [0, x]
  bool is_continuous() const;
  UMembership membership() const;
  bool in_u() const { return membership().in_u; }

  const Node& node() const { return node_; }

 private:
  explicit FunctionModel(Node node) : node_(std::move(node)) {}
  Node node_;
};

// Evaluation grid for sup-distance estimates: `samples` uniform panels over
// [0, T] plus caller-supplied extra abscissae. Breakpoints, jump abscissae
// (probed one-sided and at +-1e-9) and the endpoints are always included.
struct SupGrid {
  std::size_t samples = 2048;
  std::vector<double> extra;
};

// Supremum of |f - g| over the common domain. Exact for a pair of piecewise
// linear models (attained at merged breakpoints and one-sided limits); a
// grid maximum otherwise.
double sup_distance(const FunctionModel& f, const FunctionModel& g,
                    const SupGrid& grid = {});

// A one-parameter family of models together with its declared limit.
class FamilySpec {
 public:
  // 1 - x^n on [0, 1]; limit: 1 on [0, 1) with value 0 at 1.
  static FamilySpec power_complement_seq();
  // Constant a_n = offset + scale / n on [0, T]; limit: constant `offset`.
  static FamilySpec constant_seq(double domain_end, double offset,
                                 double scale);
  // Triangular family on [0, T] through (0, S), (T/2, S/2), (3T/4, S/n),
  // constant S/n up to T; limit reaches 0 at 3T/4. Members need n >= 3.
  static FamilySpec figure1(double s, double t);
  static FamilySpec user(std::map<int, FunctionModel> members,
                         FunctionModel limit);

  FunctionModel member(int n) const;
  FunctionModel limit() const;
  int min_index() const;
  // Explicit member indices (user families); empty for parametric families.
  std::vector<int> indices() const;
  const std::string& id() const { return id_; }

 private:
  struct PcSeq {};
  struct ConstSeq {
    double domain_end, offset, scale;
  };
  struct Fig1 {
    double s, t;
  };
  struct User {
    std::map<int, FunctionModel> members;
    FunctionModel limit;
  };
  using Node = std::variant<PcSeq, ConstSeq, Fig1, User>;
  FamilySpec(Node node, std::string id)
      : node_(std::move(node)), id_(std::move(id)) {}
  Node node_;
  std::string id_;
};

}  // namespace impact
