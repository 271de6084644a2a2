#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include <json.hpp>

#include "impact/impact.h"

namespace {

constexpr const char* kConstant = R"({"type":"constant","a":2,"T":10})";
constexpr const char* kTallConstant = R"({"type":"constant","a":2,"T":1})";
constexpr const char* kLine =
    R"({"type":"piecewise_linear","T":1,"points":[[0,1],[1,0]]})";
constexpr const char* kMember10 =
    R"({"type":"piecewise_linear","T":1,
        "points":[[0,1],[0.5,0.5],[0.75,0.1],[1,0.1]]})";
constexpr const char* kFigure1Family = R"({"family":"figure1","S":1,"T":1})";

struct Fn {
  imb_function* p = nullptr;
  ~Fn() { imb_function_free(p); }
};

std::string take(char* s) {
  std::string out = s ? s : "";
  imb_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::strlen(imb_version()) > 0);
  CHECK(std::string(imb_status_name(IMB_OK)) == "ok");
  CHECK(std::string(imb_status_name(IMB_ERR_PARSE)) == "parse-error");
  CHECK(std::string(imb_status_name(IMB_ERR_NOT_ADMISSIBLE)) ==
        "not-admissible");
  CHECK(std::string(imb_status_name(IMB_ERR_CONTINUITY_REQUIRED)) ==
        "continuity-required");
}

TEST_CASE("function lifecycle through JSON") {
  Fn fn;
  REQUIRE(imb_function_from_json(kConstant, &fn.p) == IMB_OK);
  double v = 0.0;
  CHECK(imb_function_domain_end(fn.p, &v) == IMB_OK);
  CHECK(v == 10.0);
  CHECK(imb_function_eval(fn.p, 0.0, &v) == IMB_OK);
  CHECK(v == 2.0);
  CHECK(imb_function_left_limit(fn.p, 5.0, &v) == IMB_OK);
  CHECK(v == 2.0);
  CHECK(imb_function_cumulative(fn.p, 10.0, &v) == IMB_OK);
  CHECK(v == 20.0);
  int flag = 0;
  CHECK(imb_function_is_continuous(fn.p, &flag) == IMB_OK);
  CHECK(flag == 1);
  char* json = nullptr;
  REQUIRE(imb_function_to_json(fn.p, &json) == IMB_OK);
  const std::string text = take(json);
  Fn back;
  REQUIRE(imb_function_from_json(text.c_str(), &back.p) == IMB_OK);
  CHECK(imb_function_eval(back.p, 3.0, &v) == IMB_OK);
  CHECK(v == 2.0);
  // Out-of-domain evaluation maps to the domain status.
  CHECK(imb_function_eval(fn.p, 11.0, &v) == IMB_ERR_DOMAIN);
}

TEST_CASE("errors carry messages and statuses") {
  Fn fn;
  CHECK(imb_function_from_json("not json", &fn.p) == IMB_ERR_PARSE);
  CHECK(std::strlen(imb_last_error()) > 0);
  CHECK(imb_function_from_json(nullptr, &fn.p) == IMB_ERR_INVALID_ARGUMENT);
  double v = 0.0;
  CHECK(imb_measure(nullptr, "h", 1.0, 0.0, &v) == IMB_ERR_INVALID_ARGUMENT);
  REQUIRE(imb_function_from_json(kTallConstant, &fn.p) == IMB_OK);
  CHECK(imb_measure(fn.p, "h", 1.0, 0.0, &v) == IMB_ERR_NOT_ADMISSIBLE);
  CHECK(std::string(imb_last_error()).find("smallest admissible") !=
        std::string::npos);
  CHECK(imb_measure(fn.p, "nope", 1.0, 0.0, &v) == IMB_ERR_DOMAIN);
  CHECK(imb_measure(fn.p, "mf", 0.5, 0.0, &v) == IMB_ERR_INVALID_ARGUMENT);
  Fn step;
  REQUIRE(imb_function_from_json(
              R"({"type":"upper_step","T":1,"x0":0.5,"high":1,"low":0})",
              &step.p) == IMB_OK);
  CHECK(imb_measure(step.p, "h", 1.0, 0.0, &v) ==
        IMB_ERR_CONTINUITY_REQUIRED);
}

TEST_CASE("measure dispatch") {
  Fn fn;
  REQUIRE(imb_function_from_json(kConstant, &fn.p) == IMB_OK);
  double v = 0.0;
  CHECK(imb_measure(fn.p, "h", 1.0, 0.0, &v) == IMB_OK);
  CHECK(v == 2.0);
  CHECK(imb_measure(fn.p, "g", 1.0, 0.0, &v) == IMB_OK);
  CHECK(v == 2.0);
  CHECK(imb_measure(fn.p, "i", 10.0, 0.0, &v) == IMB_OK);
  CHECK(v == 20.0);
  CHECK(imb_measure(fn.p, "mu", 5.0, 0.0, &v) == IMB_OK);
  CHECK(v == 2.0);
  Fn line;
  REQUIRE(imb_function_from_json(kLine, &line.p) == IMB_OK);
  CHECK(imb_measure(line.p, "kosmulski", 1.0, 2.0, &v) == IMB_OK);
  CHECK(v == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-11));
  CHECK(imb_measure(line.p, "r", 1.0, 0.0, &v) == IMB_OK);
  CHECK(v == doctest::Approx(std::sqrt(0.375)).epsilon(1e-14));
  const double pi = std::acos(-1.0);
  CHECK(imb_measure(line.p, "polar", pi / 4.0, 0.0, &v) == IMB_OK);
  CHECK(v == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
  CHECK(imb_measure(line.p, "mlimit", 0.5, 0.0, &v) == IMB_OK);
  CHECK(v == 1.0);
  CHECK(imb_measure_ped(
            line.p,
            R"({"type":"increasing_polyline","points":[[0,0],[2,2]]})",
            &v) == IMB_OK);
  CHECK(v == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(imb_measure_mf(line.p, 0.6, 0.0, 1.0, 0.3, &v) == IMB_OK);
  CHECK(v == 1.0);
  CHECK(imb_theta0(line.p, "g", 0.0, &v) == IMB_OK);
  CHECK(v == 0.5);
}

TEST_CASE("counts ingestion") {
  const double counts[] = {1.0, 5.0, 3.0};
  int sorted = 1;
  Fn fn;
  REQUIRE(imb_function_from_counts(counts, 3, 0, &sorted, &fn.p) == IMB_OK);
  CHECK(sorted == 0);
  double v = 0.0;
  CHECK(imb_function_eval(fn.p, 0.0, &v) == IMB_OK);
  CHECK(v == 5.0);
  CHECK(imb_function_eval(fn.p, 2.5, &v) == IMB_OK);
  CHECK(v == 1.0);  // held tail

  Fn fromcsv;
  long long n = 0;
  double c1 = 0.0;
  REQUIRE(imb_function_from_counts_csv("counts\n5\n3\n1\n", 1, &sorted, &n,
                                       &c1, &fromcsv.p) == IMB_OK);
  CHECK(sorted == 1);
  CHECK(n == 3);
  CHECK(c1 == 5.0);
  CHECK(imb_function_eval(fromcsv.p, 3.0, &v) == IMB_OK);
  CHECK(v == 0.0);  // zero tail
  Fn bad;
  CHECK(imb_function_from_counts_csv("x\nabc\n", 0, nullptr, nullptr, nullptr,
                                     &bad.p) == IMB_ERR_PARSE);
}

TEST_CASE("distance between functions") {
  Fn a, b;
  REQUIRE(imb_function_from_json(R"({"type":"constant","a":2,"T":1})", &a.p) ==
          IMB_OK);
  REQUIRE(imb_function_from_json(R"({"type":"constant","a":0.5,"T":1})",
                                 &b.p) == IMB_OK);
  double v = 0.0;
  CHECK(imb_sup_distance(a.p, b.p, &v) == IMB_OK);
  CHECK(v == 1.5);
}

TEST_CASE("bundle curves and accessors") {
  Fn fn;
  REQUIRE(imb_function_from_json(kMember10, &fn.p) == IMB_OK);
  std::vector<double> grid(20);
  REQUIRE(imb_make_grid(0.05, 1.0, grid.size(), 0, grid.data()) == IMB_OK);
  CHECK(grid.front() == 0.05);
  CHECK(grid.back() == 1.0);
  imb_curve* curve = nullptr;
  REQUIRE(imb_bundle(fn.p, "h", 0.0, 0.0, 0.0, 1.0, grid.data(), grid.size(),
                     &curve) == IMB_OK);
  size_t count = 0;
  CHECK(imb_curve_size(curve, &count) == IMB_OK);
  CHECK(count == grid.size());
  double theta0 = 0.0;
  CHECK(imb_curve_theta0(curve, &theta0) == IMB_OK);
  CHECK(theta0 == 0.1);
  double theta = 0.0, value = 0.0;
  int admissible = 1;
  CHECK(imb_curve_point(curve, 0, &theta, &value, &admissible) == IMB_OK);
  CHECK(theta == 0.05);
  CHECK(admissible == 0);
  CHECK(imb_curve_point(curve, count - 1, &theta, &value, &admissible) ==
        IMB_OK);
  CHECK(theta == 1.0);
  CHECK(admissible == 1);
  CHECK(value == doctest::Approx(0.5).epsilon(1e-12));  // h_1 of the member
  CHECK(imb_curve_point(curve, count, &theta, &value, &admissible) ==
        IMB_ERR_INVALID_ARGUMENT);
  char* csv = nullptr;
  REQUIRE(imb_curve_to_csv(curve, &csv) == IMB_OK);
  CHECK(take(csv).rfind("theta,value,admissible\n", 0) == 0);
  char* json = nullptr;
  REQUIRE(imb_curve_to_json(curve, &json) == IMB_OK);
  const nlohmann::json j = nlohmann::json::parse(take(json));
  CHECK(j.at("points").size() == grid.size());
  imb_curve_free(curve);
  // Unknown bundle kind and polar-as-bundle are rejected.
  CHECK(imb_bundle(fn.p, "polar", 0.0, 0.0, 0.0, 1.0, grid.data(),
                   grid.size(), &curve) == IMB_ERR_DOMAIN);
}

TEST_CASE("convergence runs through the C surface") {
  std::vector<double> grid(10);
  REQUIRE(imb_make_grid(0.1, 1.0, grid.size(), 0, grid.data()) == IMB_OK);
  imb_report* report = nullptr;
  REQUIRE(imb_converge(kFigure1Family, "mu", 0.0, 0.0, 0.0, 1.0, grid.data(),
                       grid.size(), nullptr, 0, 1, 0.0, &report) == IMB_OK);
  char* verdict = nullptr;
  REQUIRE(imb_report_verdict(report, &verdict) == IMB_OK);
  CHECK(take(verdict) == "uniform-evidence");
  char* json = nullptr;
  REQUIRE(imb_report_to_json(report, &json) == IMB_OK);
  const nlohmann::json j = nlohmann::json::parse(take(json));
  CHECK(j.at("n_list").size() == 5);  // default member list
  char* csv = nullptr;
  REQUIRE(imb_report_to_csv(report, "lbl", &csv) == IMB_OK);
  const std::string rows = take(csv);
  CHECK(rows.rfind("scenario,n,theta,error\n", 0) == 0);
  CHECK(rows.find("lbl,3,") != std::string::npos);
  imb_report_free(report);

  // Custom member list and the raw-function kind: stopping at n = 10 leaves
  // the sup distance at 1/10, far above the tolerance.
  const int ns[] = {3, 10};
  const double xs[] = {0.0, 0.5, 1.0};
  REQUIRE(imb_converge(kFigure1Family, "function", 0.0, 0.0, 0.0, 1.0, xs, 3,
                       ns, 2, 1, 0.0, &report) == IMB_OK);
  REQUIRE(imb_report_to_json(report, &json) == IMB_OK);
  const nlohmann::json jf = nlohmann::json::parse(take(json));
  CHECK(jf.at("n_list") == nlohmann::json({3, 10}));
  CHECK(jf.at("kind") == "function");
  REQUIRE(imb_report_verdict(report, &verdict) == IMB_OK);
  CHECK(take(verdict) == "no-convergence-evidence");
  imb_report_free(report);

  CHECK(imb_converge("{bad", "mu", 0.0, 0.0, 0.0, 1.0, grid.data(),
                     grid.size(), nullptr, 0, 1, 0.0, &report) ==
        IMB_ERR_PARSE);
  CHECK(imb_converge(kFigure1Family, "mu", 0.0, 0.0, 0.0, 1.0, nullptr, 0,
                     nullptr, 0, 1, 0.0, &report) == IMB_ERR_INVALID_ARGUMENT);
}

TEST_CASE("scenario suite and classification") {
  imb_suite* suite = nullptr;
  REQUIRE(imb_run_scenarios(&suite) == IMB_OK);
  size_t count = 0;
  CHECK(imb_suite_size(suite, &count) == IMB_OK);
  CHECK(count == 12);
  int all = 0;
  CHECK(imb_suite_all_pass(suite, &all) == IMB_OK);
  CHECK(all == 1);
  for (size_t i = 0; i < count; ++i) {
    char* id = nullptr;
    REQUIRE(imb_suite_id(suite, i, &id) == IMB_OK);
    CHECK(take(id) == "S" + std::to_string(i + 1));
    int pass = 0;
    CHECK(imb_suite_pass(suite, i, &pass) == IMB_OK);
    CHECK(pass == 1);
  }
  char* text = nullptr;
  REQUIRE(imb_suite_text(suite, &text) == IMB_OK);
  const std::string block = take(text);
  CHECK(block.find("[PASS] S1") != std::string::npos);
  CHECK(block.find("bundle") != std::string::npos);  // table header
  char* json = nullptr;
  REQUIRE(imb_suite_to_json(suite, &json) == IMB_OK);
  const nlohmann::json j = nlohmann::json::parse(take(json));
  CHECK(j.at("all_pass") == true);
  CHECK(j.at("scenarios").size() == 12);
  CHECK(j.at("classification").size() == 10);
  char* ctext = nullptr;
  REQUIRE(imb_suite_classification_text(suite, &ctext) == IMB_OK);
  CHECK(take(ctext).find("mlimit") != std::string::npos);
  char* cjson = nullptr;
  REQUIRE(imb_suite_classification_json(suite, &cjson) == IMB_OK);
  const nlohmann::json rows = nlohmann::json::parse(take(cjson));
  CHECK(rows.size() == 10);
  // Only the R row carries a flag: its declared exclusion from the uniform
  // class has no realizable witness on the tested families.
  for (const auto& row : rows) {
    if (row.at("bundle") == "r") {
      CHECK(row.at("flags").get<std::string>().find("not witnessed") !=
            std::string::npos);
    } else {
      CHECK(row.at("flags") == "");
    }
  }
  char* csv = nullptr;
  REQUIRE(imb_suite_to_csv(suite, &csv) == IMB_OK);
  CHECK(take(csv).rfind("scenario,n,theta,error\n", 0) == 0);
  imb_suite_free(suite);
}

TEST_CASE("free functions tolerate null") {
  imb_function_free(nullptr);
  imb_curve_free(nullptr);
  imb_report_free(nullptr);
  imb_suite_free(nullptr);
  imb_string_free(nullptr);
}
