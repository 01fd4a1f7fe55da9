#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "siminf/entailment.hpp"
#include "siminf/error.hpp"
#include "siminf/rational.hpp"
#include "siminf/structure.hpp"
#include "siminf/updates.hpp"

namespace siminf {

/// A deduction: finite premise set plus a conclusion. Premises are kept in
/// first-given order with duplicates (by printed form) removed.
struct Deduction {
  std::vector<FormulaPtr> premises;
  FormulaPtr conclusion;

  static Deduction make(std::vector<FormulaPtr> premises, FormulaPtr conclusion) {
    Deduction d;
    std::set<std::string> seen;
    for (auto& p : premises)
      if (seen.insert(to_string(p)).second) d.premises.push_back(std::move(p));
    d.conclusion = std::move(conclusion);
    return d;
  }
};

struct CoherencyResult {
  Rational value{0};
  std::optional<int> first_true;  // 1-based index of the earliest satisfying db
  bool coherent = false;
};

/// Coherency of an update with a sentence: 0 unless the final database
/// satisfies it; otherwise m / (1 + 2 + ... + m) == 2/(m+1), where m is the
/// 1-based index of the first database in the chain that satisfies it.
/// Sentences outside a step's language are false at that step.
inline CoherencyResult coherency(const Update& u, const FormulaPtr& f) {
  if (!is_sentence(f))
    throw Error(ErrorKind::precondition,
                "coherency is defined for sentences, got '" + to_string(f) + "'");
  CoherencyResult out;
  int count = static_cast<int>(u.databases().size());
  if (!true_at_step(u, count - 1, f)) return out;
  for (int i = 0; i < count; ++i) {
    if (true_at_step(u, i, f)) {
      int m = i + 1;
      out.value = Rational(2, m + 1);
      out.first_true = m;
      out.coherent = true;
      return out;
    }
  }
  return out;  // unreachable: the final step satisfied f
}

struct RelevantPremisesResult {
  bool defined = false;  // false when the update is incoherent with the conclusion
  std::vector<FormulaPtr> premises;
};

/// Premises that are true in the final database but not bounded consequences
/// of the theory over the base signature. Undefined when the update is not
/// coherent with the conclusion.
inline RelevantPremisesResult relevant_premises(const Update& u, const Deduction& d,
                                                const EntailmentOptions& opts = {}) {
  RelevantPremisesResult out;
  int last = static_cast<int>(u.databases().size()) - 1;
  if (!true_at_step(u, last, d.conclusion)) return out;
  out.defined = true;
  const auto& theory = u.base().theory;
  const Signature& base_sig = u.base().structure.signature();
  for (const auto& p : d.premises) {
    if (!is_sentence(p))
      throw Error(ErrorKind::precondition,
                  "premise '" + to_string(p) + "' is not a sentence");
    if (!true_at_step(u, last, p)) continue;
    if (consequence_for_relevancy(theory, base_sig, p, opts)) continue;
    out.premises.push_back(p);
  }
  return out;
}

/// |relevant premises| / |premises|; 0 for an empty premise set or when the
/// update is incoherent with the conclusion.
inline Rational relevancy(const Update& u, const Deduction& d,
                          const EntailmentOptions& opts = {}) {
  if (d.premises.empty()) return Rational(0);
  RelevantPremisesResult r = relevant_premises(u, d, opts);
  if (!r.defined) return Rational(0);
  return Rational(static_cast<long long>(r.premises.size()),
                  static_cast<long long>(d.premises.size()));
}

/// Semantic informativity of a deduction: relevancy times coherency of the
/// conclusion.
inline Rational informativity(const Update& u, const Deduction& d,
                              const EntailmentOptions& opts = {}) {
  Rational r = relevancy(u, d, opts);
  if (r == Rational(0)) return r;
  return r * coherency(u, d.conclusion).value;
}

/// Informativity of a single sentence: the deduction with the sentence as its
/// own sole premise and conclusion.
inline Rational informativity(const Update& u, const FormulaPtr& f,
                              const EntailmentOptions& opts = {}) {
  return informativity(u, Deduction::make({f}, f), opts);
}

/// A sentence is new for a database when it is not falsified by the structure
/// (sentences outside the language are not falsified) and is not a bounded
/// consequence of the theory over the database's signature.
inline bool is_new(const Database& db, const FormulaPtr& f,
                   const EntailmentOptions& opts = {}) {
  if (!is_sentence(f))
    throw Error(ErrorKind::precondition,
                "newness is defined for sentences, got '" + to_string(f) + "'");
  const Signature& sig = db.structure.signature();
  bool falsified = symbols_of(f).subset_of(sig) && !satisfies(db.structure, f);
  if (falsified) return false;
  return !consequence_for_relevancy(db.theory, sig, f, opts);
}

/// Results produced by a deduction under an update: its relevant premises,
/// plus the conclusion when that is new for the base database. Requires
/// non-null relevancy.
inline std::vector<FormulaPtr> produced_results(const Update& u, const Deduction& d,
                                                const EntailmentOptions& opts = {}) {
  if (relevancy(u, d, opts) == Rational(0))
    throw Error(ErrorKind::precondition,
                "produced results are defined only for non-null relevancy");
  RelevantPremisesResult r = relevant_premises(u, d, opts);
  std::vector<FormulaPtr> out = r.premises;
  if (is_new(u.base(), d.conclusion, opts)) {
    bool already = false;
    for (const auto& p : out)
      if (formula_equal(p, d.conclusion)) already = true;
    if (!already) out.push_back(d.conclusion);
  }
  return out;
}

}  // namespace siminf
