#pragma once

#include <utility>
#include <variant>
#include <vector>

#include "core/function_model.hpp"

namespace impact {

// Strictly increasing continuous comparison curve for crossing measures:
// f(x) = theta * x, f(x) = theta * x^p, or an increasing polyline.
class FSpec {
 public:
  struct Linear {
    double theta;
  };
  struct Power {
    double theta;
    double p;
  };
  struct IncreasingPolyline {
    std::vector<std::pair<double, double>> points;
  };
  using Node = std::variant<Linear, Power, IncreasingPolyline>;

  static FSpec linear(double theta);
  static FSpec power(double theta, double p);
  static FSpec increasing_polyline(std::vector<std::pair<double, double>> points);

  double eval(double x) const;
  double domain_end() const;  // +inf for linear/power
  const Node& node() const { return node_; }

 private:
  explicit FSpec(Node node) : node_(std::move(node)) {}
  Node node_;
};

// Cumulative impact I_theta = integral of F over [0, theta]; theta in [0, T].
double i_theta(const FunctionModel& f, double theta);
// Average impact mu_theta = I_theta / theta, with mu_0 = F(0).
double mu_theta(const FunctionModel& f, double theta);
// Percentile value P_theta = F(theta).
double percentile(const FunctionModel& f, double theta);

// Generalized h: the unique x with F(x) = theta * x (theta > 0). Requires a
// continuous nonincreasing model; admissible iff F(T) <= theta * T. The zero
// function yields 0.
double h_theta(const FunctionModel& f, double theta);
// Generalized g: the largest x with cumulative(x) = theta * x^2 (theta > 0).
// Admissible iff cumulative(T) <= theta * T^2.
double g_theta(const FunctionModel& f, double theta);
// Crossing with an arbitrary strictly increasing curve: F(x) = f(x).
// Admissible iff F(0) >= f(0) and F(T) <= f(T).
double ped_measure(const FunctionModel& f, const FSpec& curve);
// Generalized Kosmulski index: crossing with theta * x^p.
double kosmulski(const FunctionModel& f, double theta, double p);
// R_theta = sqrt(cumulative(h_theta)).
double r_theta(const FunctionModel& f, double theta);
// Polar radius at angle phi in (0, pi/2): h_{tan(phi)} * sqrt(1 + tan(phi)^2).
double polar_measure(const FunctionModel& f, double phi);

// Generic bracketed-bisection routes for the crossing measures. These share
// input validation with the exact segment solvers above and exist as an
// independent numerical path for cross-checking; results agree with the
// exact solvers to ~1e-12 in the abscissa.
double h_theta_bisect(const FunctionModel& f, double theta);
double g_theta_bisect(const FunctionModel& f, double theta);
double ped_measure_bisect(const FunctionModel& f, const FSpec& curve);

}  // namespace impact
