#include "core/bundles.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/measures.hpp"
#include "core/model_io.hpp"

namespace impact {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_step(const StepFSpec& step) {
  if (!std::isfinite(step.c) || !std::isfinite(step.low) ||
      !std::isfinite(step.high) || step.low == step.high) {
    throw DomainError("step transform needs finite levels with high != low");
  }
}

bool positive_kind(BundleKindId id) {
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

BundleKindId bundle_kind_from_string(const std::string& s) {
  if (s == "i") return BundleKindId::I;
  if (s == "mu") return BundleKindId::Mu;
  if (s == "percentile") return BundleKindId::P;
  if (s == "h") return BundleKindId::H;
  if (s == "g") return BundleKindId::G;
  if (s == "kosmulski") return BundleKindId::Kosmulski;
  if (s == "r") return BundleKindId::R;
  if (s == "mf") return BundleKindId::Mf;
  if (s == "mlimit") return BundleKindId::Mlimit;
  throw DomainError("unknown bundle kind \"" + s + "\"");
}

std::string bundle_kind_label(const BundleKind& kind) {
  std::ostringstream os;
  os.precision(12);
  switch (kind.id) {
    case BundleKindId::I: return "i";
    case BundleKindId::Mu: return "mu";
    case BundleKindId::P: return "percentile";
    case BundleKindId::H: return "h";
    case BundleKindId::G: return "g";
    case BundleKindId::R: return "r";
    case BundleKindId::Kosmulski:
      os << "kosmulski(p=" << kind.p << ")";
      return os.str();
    case BundleKindId::Mf:
      os << "mf(c=" << kind.step.c << ",low=" << kind.step.low
         << ",high=" << kind.step.high << ")";
      return os.str();
    case BundleKindId::Mlimit: return "mlimit";
  }
  return "?";
}

double measure_at(const FunctionModel& f, const BundleKind& kind, double t) {
  switch (kind.id) {
    case BundleKindId::I: return i_theta(f, t);
    case BundleKindId::Mu: return mu_theta(f, t);
    case BundleKindId::P: return percentile(f, t);
    case BundleKindId::H: return h_theta(f, t);
    case BundleKindId::G: return g_theta(f, t);
    case BundleKindId::Kosmulski: return kosmulski(f, t, kind.p);
    case BundleKindId::R: return r_theta(f, t);
    case BundleKindId::Mf: return mf_bundle(f, kind.step, t);
    case BundleKindId::Mlimit: return mlimit_bundle(f, t);
  }
  throw DomainError("unknown bundle kind");
}

double theta0_for(const FunctionModel& f, const BundleKind& kind) {
  const double t = f.domain_end();
  switch (kind.id) {
    case BundleKindId::H:
    case BundleKindId::R:
      return f.eval(t) / t;
    case BundleKindId::G:
      return f.cumulative(t) / (t * t);
    case BundleKindId::Kosmulski:
      return f.eval(t) / std::pow(t, kind.p);
    default:
      return 0.0;
  }
}

BundleCurve bundle_curve(const FunctionModel& f, const BundleKind& kind,
                         const std::vector<double>& thetas) {
  if (thetas.empty()) throw DomainError("bundle grid must be nonempty");
  if (kind.id == BundleKindId::Mf) check_step(kind.step);
  if (kind.id == BundleKindId::Kosmulski &&
      (!std::isfinite(kind.p) || kind.p <= 0.0)) {
    throw DomainError("Kosmulski exponent p must be > 0");
  }
  const bool needs_positive = positive_kind(kind.id);
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    if (!std::isfinite(thetas[i])) throw DomainError("non-finite grid value");
    if (i > 0 && thetas[i - 1] >= thetas[i]) {
      throw DomainError("bundle grid must be strictly increasing");
    }
    if (thetas[i] < 0.0 || (needs_positive && thetas[i] == 0.0)) {
      throw DomainError("grid values must be " +
                        std::string(needs_positive ? "> 0" : ">= 0") +
                        " for this bundle kind");
    }
  }
  BundleCurve curve;
  curve.kind = kind;
  curve.theta0 = theta0_for(f, kind);
  curve.thetas = thetas;
  curve.values.reserve(thetas.size());
  curve.admissible.reserve(thetas.size());
  for (double t : thetas) {
    try {
      curve.values.push_back(measure_at(f, kind, t));
      curve.admissible.push_back(1);
    } catch (const NotAdmissibleError&) {
      curve.values.push_back(kNaN);
      curve.admissible.push_back(0);
    } catch (const ContinuityRequiredError&) {
      curve.values.push_back(kNaN);
      curve.admissible.push_back(0);
    } catch (const DomainError&) {
      // e.g. theta beyond T for the range-limited kinds
      curve.values.push_back(kNaN);
      curve.admissible.push_back(0);
    }
  }
  return curve;
}

double mf_bundle(const FunctionModel& f, const StepFSpec& step, double beta) {
  check_step(step);
  const double t = f.domain_end();
  if (!std::isfinite(beta) || beta < 0.0 || beta > t) {
    throw DomainError("mf needs beta in [0, T]");
  }
  const double z = f.eval(beta);
  return z < step.c ? step.low : step.high;
}

double mlimit_bundle(const FunctionModel& f, double theta) {
  const double t = f.domain_end();
  if (!std::isfinite(theta) || theta <= 0.0 || theta > t) {
    throw DomainError("mlimit needs theta in (0, T]");
  }
  return f.left_limit(theta) / theta;
}

std::vector<double> make_grid(double lo, double hi, std::size_t count,
                              bool log_spacing) {
  if (count < 1 || !std::isfinite(lo) || !std::isfinite(hi) || lo > hi ||
      (count > 1 && lo == hi)) {
    throw DomainError("grid needs count >= 1 and lo < hi");
  }
  if (log_spacing && lo <= 0.0) {
    throw DomainError("log-spaced grid needs lo > 0");
  }
  std::vector<double> grid(count);
  grid.front() = lo;
  if (count == 1) return grid;
  for (std::size_t i = 1; i + 1 < count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(count - 1);
    grid[i] = log_spacing ? lo * std::pow(hi / lo, t)
                          : lo + (hi - lo) * t;
  }
  grid.back() = hi;
  return grid;
}

std::string curve_to_csv(const BundleCurve& curve) {
  std::string out = "theta,value,admissible\n";
  for (std::size_t i = 0; i < curve.thetas.size(); ++i) {
    out += fmt17(curve.thetas[i]);
    out += ',';
    if (curve.admissible[i]) out += fmt17(curve.values[i]);
    out += ',';
    out += curve.admissible[i] ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string curve_to_json(const BundleCurve& curve) {
  nlohmann::json j;
  j["kind"] = bundle_kind_label(curve.kind);
  j["theta0"] = curve.theta0;
  nlohmann::json pts = nlohmann::json::array();
  for (std::size_t i = 0; i < curve.thetas.size(); ++i) {
    nlohmann::json p;
    p["theta"] = curve.thetas[i];
    if (curve.admissible[i]) {
      p["value"] = curve.values[i];
    } else {
      p["value"] = nullptr;
    }
    p["admissible"] = static_cast<bool>(curve.admissible[i]);
    pts.push_back(std::move(p));
  }
  j["points"] = std::move(pts);
  return j.dump();
}

}  // namespace impact
