#pragma once

#include <string>
#include <vector>

#include "core/function_model.hpp"

namespace impact {

// Step transform applied to percentile values: f(t) = low for t < c,
// high for t >= c (high != low).
struct StepFSpec {
  double c;
  double low;
  double high;
};

enum class BundleKindId { I, Mu, P, H, G, Kosmulski, R, Mf, Mlimit };

struct BundleKind {
  BundleKindId id;
  double p = 1.0;                   // Kosmulski exponent
  StepFSpec step{0.0, 0.0, 1.0};    // Mf transform
};

// Parses "i", "mu", "percentile", "h", "g", "kosmulski", "r", "mf",
// "mlimit"; throws DomainError otherwise.
BundleKindId bundle_kind_from_string(const std::string& s);
std::string bundle_kind_label(const BundleKind& kind);

// Measure value at a single grid parameter; throws like the single-measure
// entry points (used by curves and the convergence harness).
double measure_at(const FunctionModel& f, const BundleKind& kind, double t);

// Smallest admissible parameter of the bundle on this model: F(T)/T for
// h/R, cumulative(T)/T^2 for g, F(T)/T^p for the Kosmulski family, 0 for
// the bundles admissible on the whole grid range.
double theta0_for(const FunctionModel& f, const BundleKind& kind);

struct BundleCurve {
  BundleKind kind;
  double theta0;
  std::vector<double> thetas;
  std::vector<double> values;   // NaN where not admissible
  std::vector<char> admissible;
};

// Evaluates the bundle over a strictly increasing grid. Parameters below the
// admissibility threshold (or where the measure is undefined on this model)
// yield absent values, never failures. Grids must be positive for the
// crossing kinds; I/mu/P accept theta >= 0.
BundleCurve bundle_curve(const FunctionModel& f, const BundleKind& kind,
                         const std::vector<double>& thetas);

// Single-value entry points for the transform bundles.
double mf_bundle(const FunctionModel& f, const StepFSpec& step, double beta);
double mlimit_bundle(const FunctionModel& f, double theta);

// Log- or linearly-spaced grid with exact endpoints.
std::vector<double> make_grid(double lo, double hi, std::size_t count,
                              bool log_spacing);

std::string curve_to_csv(const BundleCurve& curve);
std::string curve_to_json(const BundleCurve& curve);

}  // namespace impact
