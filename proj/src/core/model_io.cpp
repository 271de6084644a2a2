#include "core/model_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <utility>

#include "core/errors.hpp"

namespace impact {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ParseError(msg); }

double require_number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    fail(std::string("missing numeric field \"") + key + "\"");
  }
  return j.at(key).get<double>();
}

json wrap_parse(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) fail("malformed JSON");
  return j;
}

std::vector<std::pair<double, double>> read_points(const json& j,
                                                   const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    fail(std::string("missing array field \"") + key + "\"");
  }
  std::vector<std::pair<double, double>> pts;
  for (const json& e : j.at(key)) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() ||
        !e[1].is_number()) {
      fail(std::string("\"") + key + "\" entries must be [x, y] pairs");
    }
    pts.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return pts;
}

FunctionModel piecewise_from_json(const json& j) {
  const double t = require_number(j, "T");
  auto pts = read_points(j, "points");
  std::map<double, Knot> knots;
  for (const auto& [x, y] : pts) {
    if (!knots.emplace(x, Knot{x, y, y}).second) {
      fail("duplicate breakpoint abscissa x=" + fmt17(x));
    }
  }
  if (j.contains("jumps")) {
    if (!j.at("jumps").is_array()) fail("\"jumps\" must be an array");
    for (const json& e : j.at("jumps")) {
      const double x = require_number(e, "x");
      const double left = require_number(e, "left");
      const double right = require_number(e, "right");
      knots.insert_or_assign(x, Knot{x, left, right});
    }
  }
  std::vector<Knot> ordered;
  ordered.reserve(knots.size());
  for (auto& [x, k] : knots) ordered.push_back(k);
  if (ordered.empty() || ordered.back().x != t) {
    fail("piecewise linear spec must end at x=T");
  }
  try {
    return FunctionModel::piecewise_linear(std::move(ordered));
  } catch (const DomainError& e) {
    fail(std::string("invalid piecewise linear spec: ") + e.what());
  }
}

}  // namespace

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json model_to_json(const FunctionModel& f) {
  json j;
  std::visit(
      [&j](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, FunctionModel::PiecewiseLinear>) {
          j["type"] = "piecewise_linear";
          j["T"] = m.knots.back().x;
          json pts = json::array();
          json jumps = json::array();
          for (const Knot& k : m.knots) {
            if (k.left_y == k.right_y) {
              pts.push_back(json::array({k.x, k.right_y}));
            } else {
              jumps.push_back(
                  {{"x", k.x}, {"left", k.left_y}, {"right", k.right_y}});
            }
          }
          j["points"] = std::move(pts);
          if (!jumps.empty()) j["jumps"] = std::move(jumps);
        } else if constexpr (std::is_same_v<M,
                                            FunctionModel::PowerComplement>) {
          j["type"] = "power_complement";
          j["n"] = m.n;
        } else if constexpr (std::is_same_v<M, FunctionModel::Constant>) {
          j["type"] = "constant";
          j["a"] = m.a;
          j["T"] = m.domain_end;
        } else {
          j["type"] = "upper_step";
          j["T"] = m.domain_end;
          j["x0"] = m.x0;
          j["high"] = m.high;
          j["low"] = m.low;
        }
      },
      f.node());
  return j;
}

FunctionModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    fail("model spec must be an object with a \"type\" field");
  }
  const std::string type = j.at("type").get<std::string>();
  try {
    if (type == "piecewise_linear") return piecewise_from_json(j);
    if (type == "power_complement") {
      const double n = require_number(j, "n");
      if (n != static_cast<int>(n)) fail("\"n\" must be an integer");
      return FunctionModel::power_complement(static_cast<int>(n));
    }
    if (type == "constant") {
      return FunctionModel::constant(require_number(j, "a"),
                                     require_number(j, "T"));
    }
    if (type == "upper_step") {
      return FunctionModel::upper_step(
          require_number(j, "T"), require_number(j, "x0"),
          require_number(j, "high"), require_number(j, "low"));
    }
  } catch (const DomainError& e) {
    fail(std::string("invalid model spec: ") + e.what());
  }
  fail("unknown model type \"" + type + "\"");
}

FunctionModel model_from_json_text(const std::string& text) {
  return model_from_json(wrap_parse(text));
}

FamilySpec family_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family") ||
      !j.at("family").is_string()) {
    fail("family spec must be an object with a \"family\" field");
  }
  const std::string kind = j.at("family").get<std::string>();
  try {
    if (kind == "power_complement") return FamilySpec::power_complement_seq();
    if (kind == "constants") {
      return FamilySpec::constant_seq(require_number(j, "T"),
                                      require_number(j, "offset"),
                                      require_number(j, "scale"));
    }
    if (kind == "figure1") {
      return FamilySpec::figure1(require_number(j, "S"),
                                 require_number(j, "T"));
    }
    if (kind == "user") {
      if (!j.contains("members") || !j.at("members").is_array() ||
          !j.contains("limit")) {
        fail("user family needs \"members\" and \"limit\"");
      }
      std::map<int, FunctionModel> members;
      for (const json& e : j.at("members")) {
        const double n = require_number(e, "n");
        if (n != static_cast<int>(n) || n < 1) {
          fail("member index must be a positive integer");
        }
        if (!e.contains("fn")) fail("member needs an \"fn\" model spec");
        members.insert_or_assign(static_cast<int>(n),
                                 model_from_json(e.at("fn")));
      }
      return FamilySpec::user(std::move(members),
                              model_from_json(j.at("limit")));
    }
  } catch (const DomainError& e) {
    fail(std::string("invalid family spec: ") + e.what());
  }
  fail("unknown family \"" + kind + "\"");
}

FamilySpec family_from_json_text(const std::string& text) {
  return family_from_json(wrap_parse(text));
}

FSpec fspec_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    fail("comparison curve spec must be an object with a \"type\" field");
  }
  const std::string type = j.at("type").get<std::string>();
  try {
    if (type == "linear") return FSpec::linear(require_number(j, "theta"));
    if (type == "power") {
      return FSpec::power(require_number(j, "theta"), require_number(j, "p"));
    }
    if (type == "increasing_polyline") {
      return FSpec::increasing_polyline(read_points(j, "points"));
    }
  } catch (const DomainError& e) {
    fail(std::string("invalid comparison curve spec: ") + e.what());
  }
  fail("unknown comparison curve type \"" + type + "\"");
}

FSpec fspec_from_json_text(const std::string& text) {
  return fspec_from_json(wrap_parse(text));
}

std::vector<double> counts_from_csv(std::istream& in) {
  std::vector<double> counts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' ||
                             line.back() == '\t')) {
      line.pop_back();
    }
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    const std::string token = line.substr(start);
    char* end = nullptr;
    const long long v = std::strtoll(token.c_str(), &end, 10);
    const bool numeric = end != token.c_str() && *end == '\0';
    if (!numeric) {
      if (lineno == 1) continue;  // header line
      fail("line " + std::to_string(lineno) +
           ": expected a nonnegative integer, got \"" + token + "\"");
    }
    if (v < 0) {
      fail("line " + std::to_string(lineno) + ": negative count " + token);
    }
    counts.push_back(static_cast<double>(v));
  }
  if (counts.empty()) fail("no citation counts found");
  return counts;
}

}  // namespace impact
