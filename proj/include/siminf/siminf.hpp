#pragma once

// Semantic informativity over finite first-order databases: structures and
// theories, validated insert/delete updates, exact coherency / relevancy /
// informativity metrics, bounded entailment by finite-model enumeration, and
// a breadth-first planner for minimal coherence-restoring updates.

#include "siminf/error.hpp"
#include "siminf/rational.hpp"
#include "siminf/syntax.hpp"
#include "siminf/parser.hpp"
#include "siminf/structure.hpp"
#include "siminf/entailment.hpp"
#include "siminf/updates.hpp"
#include "siminf/metrics.hpp"
#include "siminf/planner.hpp"
#include "siminf/io.hpp"
#include "siminf/report.hpp"
#include "siminf/verify.hpp"
