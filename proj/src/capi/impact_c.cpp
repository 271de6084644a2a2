#include "impact/impact.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/bundles.hpp"
#include "core/convergence.hpp"
#include "core/errors.hpp"
#include "core/function_model.hpp"
#include "core/measures.hpp"
#include "core/model_io.hpp"
#include "core/scenarios.hpp"

struct imb_function {
  impact::FunctionModel model;
};
struct imb_curve {
  impact::BundleCurve curve;
};
struct imb_report {
  impact::ConvergenceReport report;
};
struct imb_suite {
  std::vector<impact::ScenarioResult> results;
  std::vector<impact::ClassificationRow> rows;
  std::string text;
};

namespace {

thread_local std::string g_last_error;

imb_status fail(imb_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Runs the body and maps core exceptions onto status codes.
template <typename Fn>
imb_status guarded(Fn&& body) {
  try {
    return body();
  } catch (const impact::ParseError& e) {
    return fail(IMB_ERR_PARSE, e.what());
  } catch (const impact::NotAdmissibleError& e) {
    return fail(IMB_ERR_NOT_ADMISSIBLE, e.what());
  } catch (const impact::ContinuityRequiredError& e) {
    return fail(IMB_ERR_CONTINUITY_REQUIRED, e.what());
  } catch (const impact::DomainError& e) {
    return fail(IMB_ERR_DOMAIN, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(IMB_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(IMB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(IMB_ERR_INTERNAL, e.what());
  }
}

imb_status require(bool cond, const char* what) {
  if (cond) return IMB_OK;
  return fail(IMB_ERR_INVALID_ARGUMENT, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

imb_status out_string(const std::string& s, char** out) {
  *out = dup_string(s);
  return IMB_OK;
}

// Builds a BundleKind from the C-level kind string plus parameters.
impact::BundleKind make_kind(const char* kind, double p, double c, double low,
                             double high) {
  impact::BundleKind k;
  k.id = impact::bundle_kind_from_string(kind);
  if (k.id == impact::BundleKindId::Kosmulski) k.p = p;
  if (k.id == impact::BundleKindId::Mf) {
    k.step = impact::StepFSpec{c, low, high};
  }
  return k;
}

}  // namespace

extern "C" {

const char* imb_version(void) { return "1.0.0"; }

const char* imb_status_name(imb_status s) {
  switch (s) {
    case IMB_OK: return "ok";
    case IMB_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case IMB_ERR_PARSE: return "parse-error";
    case IMB_ERR_DOMAIN: return "domain-error";
    case IMB_ERR_NOT_ADMISSIBLE: return "not-admissible";
    case IMB_ERR_CONTINUITY_REQUIRED: return "continuity-required";
    case IMB_ERR_INTERNAL: return "internal-error";
  }
  return "unknown";
}

const char* imb_last_error(void) { return g_last_error.c_str(); }

void imb_string_free(char* s) { std::free(s); }

/* -------------------------------------------------------------- functions */

imb_status imb_function_from_json(const char* json_text, imb_function** out) {
  if (imb_status s = require(json_text && out, "null argument")) return s;
  return guarded([&] {
    *out = new imb_function{impact::model_from_json_text(json_text)};
    return IMB_OK;
  });
}

imb_status imb_function_from_counts(const double* counts, size_t n_counts,
                                    int tail_zero, int* was_sorted,
                                    imb_function** out) {
  if (imb_status s = require(counts && out, "null argument")) return s;
  return guarded([&] {
    std::vector<double> data(counts, counts + n_counts);
    bool sorted = true;
    impact::FunctionModel model = impact::FunctionModel::from_citations(
        std::move(data),
        tail_zero ? impact::TailMode::Zero : impact::TailMode::Hold, &sorted);
    if (was_sorted) *was_sorted = sorted ? 1 : 0;
    *out = new imb_function{std::move(model)};
    return IMB_OK;
  });
}

imb_status imb_function_from_counts_csv(const char* csv_text, int tail_zero,
                                        int* was_sorted, long long* out_n,
                                        double* out_c1, imb_function** out) {
  if (imb_status s = require(csv_text && out, "null argument")) return s;
  return guarded([&] {
    std::istringstream in(csv_text);
    std::vector<double> counts = impact::counts_from_csv(in);
    bool sorted = true;
    impact::FunctionModel model = impact::FunctionModel::from_citations(
        counts, tail_zero ? impact::TailMode::Zero : impact::TailMode::Hold,
        &sorted);
    if (was_sorted) *was_sorted = sorted ? 1 : 0;
    if (out_n) *out_n = static_cast<long long>(counts.size());
    if (out_c1) *out_c1 = model.eval(0.0);
    *out = new imb_function{std::move(model)};
    return IMB_OK;
  });
}

imb_status imb_function_to_json(const imb_function* f, char** out_json) {
  if (imb_status s = require(f && out_json, "null argument")) return s;
  return guarded([&] {
    return out_string(impact::model_to_json(f->model).dump(), out_json);
  });
}

void imb_function_free(imb_function* f) { delete f; }

imb_status imb_function_domain_end(const imb_function* f, double* out) {
  if (imb_status s = require(f && out, "null argument")) return s;
  return guarded([&] {
    *out = f->model.domain_end();
    return IMB_OK;
  });
}

imb_status imb_function_eval(const imb_function* f, double x, double* out) {
  if (imb_status s = require(f && out, "null argument")) return s;
  return guarded([&] {
    *out = f->model.eval(x);
    return IMB_OK;
  });
}

imb_status imb_function_left_limit(const imb_function* f, double x,
                                   double* out) {
  if (imb_status s = require(f && out, "null argument")) return s;
  return guarded([&] {
    *out = f->model.left_limit(x);
    return IMB_OK;
  });
}

imb_status imb_function_cumulative(const imb_function* f, double x,
                                   double* out) {
  if (imb_status s = require(f && out, "null argument")) return s;
  return guarded([&] {
    *out = f->model.cumulative(x);
    return IMB_OK;
  });
}

imb_status imb_function_is_continuous(const imb_function* f, int* out) {
  if (imb_status s = require(f && out, "null argument")) return s;
  return guarded([&] {
    *out = f->model.is_continuous() ? 1 : 0;
    return IMB_OK;
  });
}

imb_status imb_sup_distance(const imb_function* a, const imb_function* b,
                            double* out) {
  if (imb_status s = require(a && b && out, "null argument")) return s;
  return guarded([&] {
    *out = impact::sup_distance(a->model, b->model);
    return IMB_OK;
  });
}

/* --------------------------------------------------------------- measures */

imb_status imb_measure(const imb_function* f, const char* kind, double theta,
                       double p, double* out) {
  if (imb_status s = require(f && kind && out, "null argument")) return s;
  return guarded([&] {
    const std::string k = kind;
    if (k == "mf") {
      return fail(IMB_ERR_INVALID_ARGUMENT,
                  "use imb_measure_mf for the step transform");
    }
    if (k == "ped") {
      return fail(IMB_ERR_INVALID_ARGUMENT,
                  "use imb_measure_ped for comparison-curve crossings");
    }
    if (k == "polar") {
      *out = impact::polar_measure(f->model, theta);
    } else if (k == "kosmulski") {
      *out = impact::kosmulski(f->model, theta, p);
    } else {
      *out = impact::measure_at(f->model, make_kind(kind, p, 0, 0, 1), theta);
    }
    return IMB_OK;
  });
}

imb_status imb_measure_ped(const imb_function* f, const char* fspec_json,
                           double* out) {
  if (imb_status s = require(f && fspec_json && out, "null argument")) return s;
  return guarded([&] {
    *out = impact::ped_measure(f->model,
                               impact::fspec_from_json_text(fspec_json));
    return IMB_OK;
  });
}

imb_status imb_measure_mf(const imb_function* f, double c, double low,
                          double high, double beta, double* out) {
  if (imb_status s = require(f && out, "null argument")) return s;
  return guarded([&] {
    *out = impact::mf_bundle(f->model, impact::StepFSpec{c, low, high}, beta);
    return IMB_OK;
  });
}

imb_status imb_theta0(const imb_function* f, const char* kind, double p,
                      double* out) {
  if (imb_status s = require(f && kind && out, "null argument")) return s;
  return guarded([&] {
    *out = impact::theta0_for(f->model, make_kind(kind, p, 0, 0, 1));
    return IMB_OK;
  });
}

/* ---------------------------------------------------------------- bundles */

imb_status imb_make_grid(double lo, double hi, size_t count, int log_spacing,
                         double* out_grid) {
  if (imb_status s = require(out_grid != nullptr, "null argument")) return s;
  return guarded([&] {
    const std::vector<double> grid =
        impact::make_grid(lo, hi, count, log_spacing != 0);
    std::memcpy(out_grid, grid.data(), grid.size() * sizeof(double));
    return IMB_OK;
  });
}

imb_status imb_bundle(const imb_function* f, const char* kind, double p,
                      double c, double low, double high, const double* grid,
                      size_t grid_len, imb_curve** out) {
  if (imb_status s = require(f && kind && grid && out, "null argument"))
    return s;
  return guarded([&] {
    const std::vector<double> thetas(grid, grid + grid_len);
    *out = new imb_curve{
        impact::bundle_curve(f->model, make_kind(kind, p, c, low, high),
                             thetas)};
    return IMB_OK;
  });
}

imb_status imb_curve_size(const imb_curve* c, size_t* out) {
  if (imb_status s = require(c && out, "null argument")) return s;
  *out = c->curve.thetas.size();
  return IMB_OK;
}

imb_status imb_curve_point(const imb_curve* c, size_t i, double* theta,
                           double* value, int* admissible) {
  if (imb_status s = require(c != nullptr, "null argument")) return s;
  if (i >= c->curve.thetas.size()) {
    return fail(IMB_ERR_INVALID_ARGUMENT, "curve index out of range");
  }
  if (theta) *theta = c->curve.thetas[i];
  if (value) *value = c->curve.values[i];
  if (admissible) *admissible = c->curve.admissible[i] ? 1 : 0;
  return IMB_OK;
}

imb_status imb_curve_theta0(const imb_curve* c, double* out) {
  if (imb_status s = require(c && out, "null argument")) return s;
  *out = c->curve.theta0;
  return IMB_OK;
}

imb_status imb_curve_to_csv(const imb_curve* c, char** out) {
  if (imb_status s = require(c && out, "null argument")) return s;
  return guarded([&] { return out_string(impact::curve_to_csv(c->curve), out); });
}

imb_status imb_curve_to_json(const imb_curve* c, char** out) {
  if (imb_status s = require(c && out, "null argument")) return s;
  return guarded(
      [&] { return out_string(impact::curve_to_json(c->curve), out); });
}

void imb_curve_free(imb_curve* c) { delete c; }

/* ------------------------------------------------------------ convergence */

imb_status imb_converge(const char* family_json, const char* kind, double p,
                        double c, double low, double high, const double* grid,
                        size_t grid_len, const int* n_list, size_t n_len,
                        int boundary_probes, double eps_uniform,
                        imb_report** out) {
  if (imb_status s = require(family_json && kind && grid && out,
                             "null argument"))
    return s;
  return guarded([&] {
    const impact::FamilySpec family =
        impact::family_from_json_text(family_json);
    impact::ConvergeOptions opts;
    if (n_list && n_len > 0) {
      opts.n_list.assign(n_list, n_list + n_len);
    }
    opts.boundary_probes = boundary_probes != 0;
    if (eps_uniform > 0.0) opts.eps_uniform = eps_uniform;
    const std::vector<double> points(grid, grid + grid_len);
    impact::ConvergenceReport rep;
    if (std::string(kind) == "function") {
      rep = impact::function_convergence(family, points, opts);
    } else {
      rep = impact::measure_convergence(
          family, make_kind(kind, p, c, low, high), points, opts);
    }
    *out = new imb_report{std::move(rep)};
    return IMB_OK;
  });
}

imb_status imb_report_verdict(const imb_report* r, char** out) {
  if (imb_status s = require(r && out, "null argument")) return s;
  return guarded(
      [&] { return out_string(impact::verdict_label(r->report.verdict), out); });
}

imb_status imb_report_to_json(const imb_report* r, char** out) {
  if (imb_status s = require(r && out, "null argument")) return s;
  return guarded(
      [&] { return out_string(impact::report_to_json(r->report), out); });
}

imb_status imb_report_to_csv(const imb_report* r, const char* label,
                             char** out) {
  if (imb_status s = require(r && out, "null argument")) return s;
  return guarded([&] {
    return out_string(impact::report_csv_header() +
                          impact::report_to_csv(r->report,
                                                label ? label : ""),
                      out);
  });
}

void imb_report_free(imb_report* r) { delete r; }

/* -------------------------------------------------- scenarios and classes */

imb_status imb_run_scenarios(imb_suite** out) {
  if (imb_status s = require(out != nullptr, "null argument")) return s;
  return guarded([&] {
    auto suite = new imb_suite;
    suite->results = impact::run_scenarios();
    suite->rows = impact::classify(suite->results);
    std::string text;
    for (const impact::ScenarioResult& r : suite->results) {
      text += (r.pass ? "[PASS] " : "[FAIL] ") + r.id + " " + r.title;
      if (!r.note.empty()) text += " — " + r.note;
      text += "\n";
    }
    text += "\n";
    text += impact::classification_to_text(suite->rows);
    suite->text = std::move(text);
    *out = suite;
    return IMB_OK;
  });
}

imb_status imb_suite_size(const imb_suite* s, size_t* out) {
  if (imb_status st = require(s && out, "null argument")) return st;
  *out = s->results.size();
  return IMB_OK;
}

imb_status imb_suite_id(const imb_suite* s, size_t i, char** out) {
  if (imb_status st = require(s && out, "null argument")) return st;
  if (i >= s->results.size()) {
    return fail(IMB_ERR_INVALID_ARGUMENT, "suite index out of range");
  }
  return guarded([&] { return out_string(s->results[i].id, out); });
}

imb_status imb_suite_pass(const imb_suite* s, size_t i, int* out) {
  if (imb_status st = require(s && out, "null argument")) return st;
  if (i >= s->results.size()) {
    return fail(IMB_ERR_INVALID_ARGUMENT, "suite index out of range");
  }
  *out = s->results[i].pass ? 1 : 0;
  return IMB_OK;
}

imb_status imb_suite_all_pass(const imb_suite* s, int* out) {
  if (imb_status st = require(s && out, "null argument")) return st;
  *out = impact::all_pass(s->results) ? 1 : 0;
  return IMB_OK;
}

imb_status imb_suite_text(const imb_suite* s, char** out) {
  if (imb_status st = require(s && out, "null argument")) return st;
  return guarded([&] { return out_string(s->text, out); });
}

imb_status imb_suite_to_json(const imb_suite* s, char** out) {
  if (imb_status st = require(s && out, "null argument")) return st;
  return guarded([&] {
    nlohmann::json j =
        nlohmann::json::parse(impact::scenarios_to_json(s->results));
    j["classification"] =
        nlohmann::json::parse(impact::classification_to_json(s->rows));
    return out_string(j.dump(), out);
  });
}

imb_status imb_suite_to_csv(const imb_suite* s, char** out) {
  if (imb_status st = require(s && out, "null argument")) return st;
  return guarded(
      [&] { return out_string(impact::scenarios_to_csv(s->results), out); });
}

imb_status imb_suite_classification_text(const imb_suite* s, char** out) {
  if (imb_status st = require(s && out, "null argument")) return st;
  return guarded(
      [&] { return out_string(impact::classification_to_text(s->rows), out); });
}

imb_status imb_suite_classification_json(const imb_suite* s, char** out) {
  if (imb_status st = require(s && out, "null argument")) return st;
  return guarded(
      [&] { return out_string(impact::classification_to_json(s->rows), out); });
}

void imb_suite_free(imb_suite* s) { delete s; }

}  // extern "C"
