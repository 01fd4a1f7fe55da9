#pragma once

#include <string>

#include "siminf/siminf.hpp"

namespace testsupport {

inline std::string fixture_path(const std::string& name) {
  return std::string(SIMINF_FIXTURE_DIR) + "/" + name;
}

/// Parse against the bundled example signature (optionally with `b/0`).
inline siminf::FormulaPtr cities_formula(const std::string& text, bool with_b = false) {
  siminf::Signature sig = siminf::fixtures::cities().structure.signature();
  if (with_b) sig.add({"b", 0});
  return siminf::parse_formula(text, sig);
}

}  // namespace testsupport
