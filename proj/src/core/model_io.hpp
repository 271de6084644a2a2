#pragma once

#include <istream>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/function_model.hpp"
#include "core/measures.hpp"

namespace impact {

// Model spec schema, by "type":
//   {"type":"piecewise_linear","T":1.0,"points":[[0,1],[1,0]],
//    "jumps":[{"x":0.5,"left":1.0,"right":0.2}]}
//   {"type":"power_complement","n":5}
//   {"type":"constant","a":2.0,"T":10.0}
//   {"type":"upper_step","T":1.0,"x0":0.5,"high":1.0,"low":0.0}
// Jumps insert dual-valued interior breakpoints (or override an existing
// abscissa from "points").
nlohmann::json model_to_json(const FunctionModel& f);
FunctionModel model_from_json(const nlohmann::json& j);
FunctionModel model_from_json_text(const std::string& text);

// Family spec schema, by "family":
//   {"family":"power_complement"}
//   {"family":"constants","T":1.0,"offset":0.0,"scale":1.0}
//   {"family":"figure1","S":1.0,"T":1.0}
//   {"family":"user","members":[{"n":3,"fn":{...}},...],"limit":{...}}
FamilySpec family_from_json(const nlohmann::json& j);
FamilySpec family_from_json_text(const std::string& text);

// Comparison curve spec, by "type": {"type":"linear","theta":1.0},
// {"type":"power","theta":1.0,"p":2.0},
// {"type":"increasing_polyline","points":[[0,0],[1,2]]}.
FSpec fspec_from_json(const nlohmann::json& j);
FSpec fspec_from_json_text(const std::string& text);

// Single-column CSV of nonnegative integer citation counts; an optional
// non-numeric header line is skipped.
std::vector<double> counts_from_csv(std::istream& in);

// 17-significant-digit rendering used by every CSV emitter.
std::string fmt17(double v);

}  // namespace impact
