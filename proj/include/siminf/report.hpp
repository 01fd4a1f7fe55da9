#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "siminf/entailment.hpp"
#include "siminf/io.hpp"
#include "siminf/metrics.hpp"
#include "siminf/rational.hpp"
#include "siminf/structure.hpp"
#include "siminf/updates.hpp"

namespace siminf {

// Machine-readable run reports. Shape (schema_version 1):
//   { "schema_version": 1, "command": "...",
//     "inputs": [{"path": "...", "fnv1a64": "..."}],
//     "bounds": {"max_domain": K, "budget": N},
//     "result": {...}, "warnings": [...] }
// The full schema ships in docs/run_report.schema.json.

using Json = nlohmann::json;

inline Json rational_json(const Rational& r) {
  return Json{{"num", r.numerator()}, {"den", r.denominator()},
              {"decimal", to_double(r)}};
}

inline Json structure_json(const FiniteStructure& s) {
  Json sig = Json::array();
  for (const auto& sym : s.signature().symbols())
    sig.push_back(sym.name + "/" + std::to_string(sym.arity));
  Json constants = Json::object();
  for (const auto& [name, e] : s.constants()) constants[name] = e;
  Json relations = Json::object();
  for (const auto& [name, tuples] : s.relations()) {
    Json list = Json::array();
    for (const auto& t : tuples) list.push_back(t);
    relations[name] = std::move(list);
  }
  return Json{{"signature", std::move(sig)},
              {"domain", s.domain()},
              {"constants", std::move(constants)},
              {"relations", std::move(relations)}};
}

inline Json update_warnings_json(const Update& u) {
  Json out = Json::array();
  for (const auto& w : u.warnings()) {
    Json sentences = Json::array();
    for (const auto& f : w.unsatisfied) sentences.push_back(to_string(f));
    out.push_back(Json{{"step", w.step},
                       {"op", op_to_string(u.ops()[w.step - 1])},
                       {"unsatisfied", std::move(sentences)}});
  }
  return out;
}

struct RunReport {
  std::string command;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, content
  EntailmentOptions bounds;
  Json result = Json::object();
  Json warnings = Json::array();

  Json to_json() const {
    Json in = Json::array();
    for (const auto& [path, content] : inputs)
      in.push_back(Json{{"path", path}, {"fnv1a64", fnv1a64_hex(content)}});
    return Json{{"schema_version", 1},
                {"command", command},
                {"inputs", std::move(in)},
                {"bounds", Json{{"max_domain", bounds.max_domain},
                                {"budget", bounds.budget}}},
                {"result", result},
                {"warnings", warnings}};
  }
};

/// Metric payload: exact value, decimal rendering, first-true index,
/// relevant premises, coherence flag, and the bound that was used.
inline Json metric_result_json(const Rational& value,
                               const CoherencyResult& conclusion_coherency,
                               const std::vector<FormulaPtr>* relevant,
                               int bound_used) {
  Json premises = Json::array();
  if (relevant)
    for (const auto& p : *relevant) premises.push_back(to_string(p));
  Json m = conclusion_coherency.first_true
               ? Json(*conclusion_coherency.first_true)
               : Json(nullptr);
  return Json{{"value_num", value.numerator()},
              {"value_den", value.denominator()},
              {"value_decimal", to_double(value)},
              {"m_index", std::move(m)},
              {"relevant_premises", std::move(premises)},
              {"coherent", conclusion_coherency.coherent},
              {"bound_used", bound_used}};
}

}  // namespace siminf
