// impactctl — command-line front end for the impact measures library.
//
// Subcommands:
//   measure   evaluate one measure of one function model
//   bundle    emit a measure curve over a parameter grid (CSV/JSON)
//   ingest    turn a CSV of citation counts into a function-model spec
//   converge  run a family against its limit and report the verdict
//   classify  run the scenario suite and print the bundle classification
//
// Exit codes: 0 success, 1 input error, 2 not admissible, 3 scenario failure.

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "impact/impact.h"

namespace {

struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { imb_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

template <typename T, void (*Free)(T*)>
struct Owned {
  T* p = nullptr;
  ~Owned() { Free(p); }
};
using OwnedFunction = Owned<imb_function, imb_function_free>;
using OwnedCurve = Owned<imb_curve, imb_curve_free>;
using OwnedReport = Owned<imb_report, imb_report_free>;
using OwnedSuite = Owned<imb_suite, imb_suite_free>;

int fail_status(imb_status s) {
  std::fprintf(stderr, "error: %s\n", imb_last_error());
  return s == IMB_ERR_NOT_ADMISSIBLE ? 2 : 1;
}

int fail_input(const std::string& msg) {
  std::fprintf(stderr, "error: %s\n", msg.c_str());
  return 1;
}

bool read_file(const std::string& path, std::string* out, std::string* err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    *err = "cannot read " + path;
    return false;
  }
  std::ostringstream body;
  body << in.rdbuf();
  *out = body.str();
  return true;
}

// A spec argument is inline JSON when it starts with '{' or '[',
// otherwise it names a file.
bool read_spec_arg(const std::string& arg, std::string* out,
                   std::string* err) {
  const std::size_t first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos &&
      (arg[first] == '{' || arg[first] == '[')) {
    *out = arg;
    return true;
  }
  return read_file(arg, out, err);
}

bool write_atomic(const std::string& path, const std::string& body,
                  std::string* err) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp(target);
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      *err = "cannot open " + tmp.string();
      return false;
    }
    out << body;
    out.flush();
    if (!out) {
      *err = "cannot write " + tmp.string();
      return false;
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    *err = "cannot rename " + tmp.string() + " to " + path + ": " +
           ec.message();
    return false;
  }
  return true;
}

// Emits a body to --out (atomically), to stdout for "-" or no path.
int emit(const std::string& out_path, const std::string& body) {
  if (out_path.empty() || out_path == "-") {
    std::fputs(body.c_str(), stdout);
    return 0;
  }
  std::string err;
  if (!write_atomic(out_path, body, &err)) return fail_input(err);
  std::printf("wrote %s\n", out_path.c_str());
  return 0;
}

bool parse_double_strict(const std::string& s, double* out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) return false;
  *out = v;
  return true;
}

// Parses a constants-family rule "A", "B/n", "A+B/n" or "A-B/n" into
// offset A and scale B (members are A + B/n).
bool parse_an(const std::string& text, double* offset, double* scale) {
  std::string s;
  for (char c : text) {
    if (c != ' ' && c != '\t') s += c;
  }
  *offset = 0.0;
  *scale = 0.0;
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "/n") == 0) {
    const std::string head = s.substr(0, s.size() - 2);
    for (std::size_t i = head.size(); i-- > 1;) {
      if (head[i] != '+' && head[i] != '-') continue;
      const char prev = head[i - 1];
      if (prev == 'e' || prev == 'E' || prev == '+' || prev == '-') continue;
      if (parse_double_strict(head.substr(0, i), offset) &&
          parse_double_strict(head.substr(i), scale)) {
        return true;
      }
    }
    *offset = 0.0;
    return parse_double_strict(head, scale);
  }
  return parse_double_strict(s, offset);
}

struct GridSpec {
  double min = 0.5;
  double max = 2.0;
  std::size_t count = 7;
  bool log_spacing = false;
};

void add_grid_options(CLI::App* sub, GridSpec* grid) {
  sub->add_option("--min", grid->min, "Grid start")->capture_default_str();
  sub->add_option("--max", grid->max, "Grid end")->capture_default_str();
  sub->add_option("--count", grid->count, "Grid size (>= 2)")
      ->capture_default_str();
  sub->add_flag("--log", grid->log_spacing,
                "Log-spaced grid (default linear)");
}

int build_grid(const GridSpec& spec, std::vector<double>* out) {
  if (spec.count < 2) return fail_input("--count must be >= 2");
  out->assign(spec.count, 0.0);
  if (imb_status s = imb_make_grid(spec.min, spec.max, spec.count,
                                   spec.log_spacing ? 1 : 0, out->data())) {
    return fail_status(s);
  }
  return 0;
}

int load_function(const std::string& fn_arg, OwnedFunction* fn) {
  if (fn_arg.empty()) return fail_input("--fn is required");
  std::string text, err;
  if (!read_spec_arg(fn_arg, &text, &err)) return fail_input(err);
  if (imb_status s = imb_function_from_json(text.c_str(), &fn->p)) {
    return fail_status(s);
  }
  return 0;
}

/* ----------------------------------------------------------------- measure */

struct MeasureConfig {
  std::string fn;
  std::string kind = "h";
  double theta = 0.0;
  bool theta_set = false;
  double phi = 0.0;
  bool phi_set = false;
  double p = 2.0;
  std::string fspec;
  double c = 1.0;
  double low = 0.0;
  double high = 1.0;
  double beta = 0.0;
  bool beta_set = false;
};

int cmd_measure(const MeasureConfig& cfg) {
  OwnedFunction fn;
  if (int rc = load_function(cfg.fn, &fn)) return rc;
  double value = 0.0;
  imb_status s = IMB_OK;
  if (cfg.kind == "ped") {
    if (cfg.fspec.empty()) {
      return fail_input("kind 'ped' requires --fspec (comparison curve)");
    }
    std::string text, err;
    if (!read_spec_arg(cfg.fspec, &text, &err)) return fail_input(err);
    s = imb_measure_ped(fn.p, text.c_str(), &value);
  } else if (cfg.kind == "mf") {
    if (!cfg.beta_set) return fail_input("kind 'mf' requires --beta");
    s = imb_measure_mf(fn.p, cfg.c, cfg.low, cfg.high, cfg.beta, &value);
  } else if (cfg.kind == "polar") {
    if (!cfg.phi_set) return fail_input("kind 'polar' requires --phi");
    s = imb_measure(fn.p, "polar", cfg.phi, 0.0, &value);
  } else {
    if (!cfg.theta_set) {
      return fail_input("kind '" + cfg.kind + "' requires --theta");
    }
    s = imb_measure(fn.p, cfg.kind.c_str(), cfg.theta, cfg.p, &value);
  }
  if (s != IMB_OK) return fail_status(s);
  std::printf("%.12g\n", value);
  return 0;
}

/* ------------------------------------------------------------------ bundle */

struct BundleConfig {
  std::string fn;
  std::string kind = "h";
  double p = 2.0;
  double c = 1.0;
  double low = 0.0;
  double high = 1.0;
  GridSpec grid;
  std::string format = "csv";
  std::string out;
};

int cmd_bundle(const BundleConfig& cfg) {
  OwnedFunction fn;
  if (int rc = load_function(cfg.fn, &fn)) return rc;
  std::vector<double> grid;
  if (int rc = build_grid(cfg.grid, &grid)) return rc;
  OwnedCurve curve;
  if (imb_status s =
          imb_bundle(fn.p, cfg.kind.c_str(), cfg.p, cfg.c, cfg.low, cfg.high,
                     grid.data(), grid.size(), &curve.p)) {
    return fail_status(s);
  }
  OwnedString body;
  imb_status s = cfg.format == "json" ? imb_curve_to_json(curve.p, &body.p)
                                      : imb_curve_to_csv(curve.p, &body.p);
  if (s != IMB_OK) return fail_status(s);
  double theta0 = 0.0;
  imb_curve_theta0(curve.p, &theta0);
  // Keep stdout clean for piping: the summary goes to stderr when the
  // curve itself is printed.
  const bool to_stdout = cfg.out.empty() || cfg.out == "-";
  std::fprintf(to_stdout ? stderr : stdout, "theta0 = %.12g\n", theta0);
  return emit(cfg.out, body.str());
}

/* ------------------------------------------------------------------ ingest */

struct IngestConfig {
  std::string csv;
  std::string tail = "hold";
  std::string out;
};

int cmd_ingest(const IngestConfig& cfg) {
  if (cfg.csv.empty()) return fail_input("--csv is required");
  std::string text;
  if (cfg.csv == "-") {
    std::ostringstream body;
    body << std::cin.rdbuf();
    text = body.str();
  } else {
    std::string err;
    if (!read_file(cfg.csv, &text, &err)) return fail_input(err);
  }
  if (cfg.tail != "hold" && cfg.tail != "zero") {
    return fail_input("--tail must be 'hold' or 'zero'");
  }
  int was_sorted = 1;
  long long n = 0;
  double c1 = 0.0;
  OwnedFunction fn;
  if (imb_status s = imb_function_from_counts_csv(
          text.c_str(), cfg.tail == "zero" ? 1 : 0, &was_sorted, &n, &c1,
          &fn.p)) {
    return fail_status(s);
  }
  if (!was_sorted) {
    std::fprintf(stderr,
                 "warning: counts were not sorted nonincreasing; "
                 "sorted internally\n");
  }
  OwnedString body;
  if (imb_status s = imb_function_to_json(fn.p, &body.p)) {
    return fail_status(s);
  }
  const bool to_stdout = cfg.out.empty() || cfg.out == "-";
  std::fprintf(to_stdout ? stderr : stdout, "N = %lld\nc1 = %.12g\n", n, c1);
  return emit(cfg.out, body.str() + "\n");
}

/* ---------------------------------------------------------------- converge */

struct ConvergeConfig {
  std::string family;
  std::string family_json;
  std::string an = "1/n";
  double s = 1.0;
  double t = 1.0;
  std::string kind;
  double p = 2.0;
  double c = 1.0;
  double low = 0.0;
  double high = 1.0;
  GridSpec grid;
  std::vector<int> n_list;
  bool boundary_probes = true;
  double eps = 1e-3;
  std::string format = "json";
  std::string out;
};

int cmd_converge(const ConvergeConfig& cfg) {
  std::string family_json;
  if (cfg.family == "power_complement") {
    family_json = R"({"family":"power_complement"})";
  } else if (cfg.family == "constants") {
    double offset = 0.0, scale = 0.0;
    if (!parse_an(cfg.an, &offset, &scale)) {
      return fail_input("cannot parse --an rule '" + cfg.an +
                        "' (expected forms: A, B/n, A+B/n, A-B/n)");
    }
    family_json = nlohmann::json{{"family", "constants"},
                                 {"T", cfg.t},
                                 {"offset", offset},
                                 {"scale", scale}}
                      .dump();
  } else if (cfg.family == "figure1") {
    family_json =
        nlohmann::json{{"family", "figure1"}, {"S", cfg.s}, {"T", cfg.t}}
            .dump();
  } else if (cfg.family == "user") {
    if (cfg.family_json.empty()) {
      return fail_input("family 'user' requires --family-json");
    }
    std::string err;
    if (!read_spec_arg(cfg.family_json, &family_json, &err)) {
      return fail_input(err);
    }
  } else {
    return fail_input("unknown family '" + cfg.family +
                      "' (power_complement, constants, figure1, user)");
  }
  if (cfg.kind.empty()) return fail_input("--kind is required");
  std::vector<double> grid;
  if (int rc = build_grid(cfg.grid, &grid)) return rc;
  OwnedReport report;
  if (imb_status s = imb_converge(
          family_json.c_str(), cfg.kind.c_str(), cfg.p, cfg.c, cfg.low,
          cfg.high, grid.data(), grid.size(),
          cfg.n_list.empty() ? nullptr : cfg.n_list.data(), cfg.n_list.size(),
          cfg.boundary_probes ? 1 : 0, cfg.eps, &report.p)) {
    return fail_status(s);
  }
  OwnedString verdict;
  if (imb_status s = imb_report_verdict(report.p, &verdict.p)) {
    return fail_status(s);
  }
  OwnedString body;
  imb_status s = cfg.format == "csv"
                     ? imb_report_to_csv(report.p, nullptr, &body.p)
                     : imb_report_to_json(report.p, &body.p);
  if (s != IMB_OK) return fail_status(s);
  if (cfg.out.empty()) {
    std::printf("verdict: %s\n", verdict.str().c_str());
    return 0;
  }
  const bool to_stdout = cfg.out == "-";
  std::fprintf(to_stdout ? stderr : stdout, "verdict: %s\n",
               verdict.str().c_str());
  return emit(cfg.out, body.str() + "\n");
}

/* ---------------------------------------------------------------- classify */

struct ClassifyConfig {
  std::string format = "text";
  std::string out;
};

int cmd_classify(const ClassifyConfig& cfg) {
  OwnedSuite suite;
  if (imb_status s = imb_run_scenarios(&suite.p)) return fail_status(s);
  OwnedString body;
  imb_status s = cfg.format == "json" ? imb_suite_to_json(suite.p, &body.p)
                                      : imb_suite_text(suite.p, &body.p);
  if (s != IMB_OK) return fail_status(s);
  if (int rc = emit(cfg.out, body.str())) return rc;
  int all_pass = 0;
  imb_suite_all_pass(suite.p, &all_pass);
  if (all_pass) return 0;
  size_t count = 0;
  imb_suite_size(suite.p, &count);
  std::string failed;
  for (size_t i = 0; i < count; ++i) {
    int pass = 1;
    imb_suite_pass(suite.p, i, &pass);
    if (pass) continue;
    OwnedString id;
    imb_suite_id(suite.p, i, &id.p);
    if (!failed.empty()) failed += ", ";
    failed += id.str();
  }
  std::fprintf(stderr, "failed scenarios: %s\n", failed.c_str());
  return 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"impact measures on continuous rank-frequency models"};
  app.set_version_flag("--version", std::string(imb_version()));
  app.set_config("--config", "",
                 "Read defaults from an INI/TOML file ([subcommand] "
                 "sections; flags override)");
  app.require_subcommand(1);

  MeasureConfig measure;
  CLI::App* m = app.add_subcommand(
      "measure", "Evaluate one measure of one function model");
  m->add_option("--fn", measure.fn, "Function model: JSON spec or file path");
  m->add_option("--kind", measure.kind,
                "i|mu|percentile|h|g|kosmulski|r|polar|mlimit|ped|mf")
      ->capture_default_str();
  m->add_option("--theta", measure.theta, "Measure parameter");
  m->add_option("--phi", measure.phi, "Polar angle in (0, pi/2)");
  m->add_option("--p", measure.p, "Kosmulski exponent")
      ->capture_default_str();
  m->add_option("--fspec", measure.fspec,
                "Comparison curve for 'ped': JSON spec or file path");
  m->add_option("--c", measure.c, "Step threshold for 'mf'")
      ->capture_default_str();
  m->add_option("--low", measure.low, "Step value below the threshold")
      ->capture_default_str();
  m->add_option("--high", measure.high, "Step value at/above the threshold")
      ->capture_default_str();
  m->add_option("--beta", measure.beta, "Evaluation point for 'mf'");

  BundleConfig bundle;
  CLI::App* b = app.add_subcommand(
      "bundle", "Emit a measure curve over a parameter grid");
  b->add_option("--fn", bundle.fn, "Function model: JSON spec or file path");
  b->add_option("--kind", bundle.kind,
                "i|mu|percentile|h|g|kosmulski|r|mf|mlimit")
      ->capture_default_str();
  b->add_option("--p", bundle.p, "Kosmulski exponent")->capture_default_str();
  b->add_option("--c", bundle.c, "Step threshold for 'mf'")
      ->capture_default_str();
  b->add_option("--low", bundle.low, "Step value below the threshold")
      ->capture_default_str();
  b->add_option("--high", bundle.high, "Step value at/above the threshold")
      ->capture_default_str();
  add_grid_options(b, &bundle.grid);
  b->add_option("--format", bundle.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  b->add_option("--out", bundle.out, "Output path ('-' or empty: stdout)");

  IngestConfig ingest;
  CLI::App* g = app.add_subcommand(
      "ingest", "Build a function-model spec from CSV citation counts");
  g->add_option("--csv", ingest.csv, "Counts file, one per line ('-': stdin)");
  g->add_option("--tail", ingest.tail,
                "hold: keep the last count to rank N; zero: close at 0")
      ->check(CLI::IsMember({"hold", "zero"}))
      ->capture_default_str();
  g->add_option("--out", ingest.out, "Output path ('-' or empty: stdout)");

  ConvergeConfig converge;
  CLI::App* c = app.add_subcommand(
      "converge", "Run a function family against its declared limit");
  c->add_option("--family", converge.family,
                "power_complement|constants|figure1|user")
      ->required();
  c->add_option("--family-json", converge.family_json,
                "User family: JSON spec or file path");
  c->add_option("--an", converge.an,
                "Constants rule a_n (A, B/n, A+B/n or A-B/n)")
      ->capture_default_str();
  c->add_option("--S", converge.s, "figure1 start value")
      ->capture_default_str();
  c->add_option("--T", converge.t, "Domain end (constants, figure1)")
      ->capture_default_str();
  c->add_option("--kind", converge.kind,
                "function|i|mu|percentile|h|g|kosmulski|r|mf|mlimit")
      ->required();
  c->add_option("--p", converge.p, "Kosmulski exponent")
      ->capture_default_str();
  c->add_option("--c", converge.c, "Step threshold for 'mf'")
      ->capture_default_str();
  c->add_option("--low", converge.low, "Step value below the threshold")
      ->capture_default_str();
  c->add_option("--high", converge.high, "Step value at/above the threshold")
      ->capture_default_str();
  add_grid_options(c, &converge.grid);
  c->add_option("--n-list", converge.n_list,
                "Member indices (default 3,10,100,1000,10000)")
      ->delimiter(',');
  c->add_flag("--boundary-probes,!--no-boundary-probes",
              converge.boundary_probes,
              "Probe each member's admissibility boundary (default on)");
  c->add_option("--eps", converge.eps, "Uniform-evidence tolerance")
      ->capture_default_str();
  c->add_option("--format", converge.format, "json|csv")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  c->add_option("--out", converge.out,
                "Report path ('-': stdout; empty: verdict only)");

  ClassifyConfig classify;
  CLI::App* k = app.add_subcommand(
      "classify", "Run the scenario suite and print the classification");
  k->add_option("--format", classify.format, "text|json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  k->add_option("--out", classify.out, "Output path ('-' or empty: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  measure.theta_set = m->count("--theta") > 0;
  measure.phi_set = m->count("--phi") > 0;
  measure.beta_set = m->count("--beta") > 0;

  if (m->parsed()) return cmd_measure(measure);
  if (b->parsed()) return cmd_bundle(bundle);
  if (g->parsed()) return cmd_ingest(ingest);
  if (c->parsed()) return cmd_converge(converge);
  if (k->parsed()) return cmd_classify(classify);
  return fail_input("no subcommand given");
}
