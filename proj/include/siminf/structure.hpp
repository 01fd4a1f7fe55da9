#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "siminf/error.hpp"
#include "siminf/syntax.hpp"

namespace siminf {

using Element = std::string;

/// Variable binding used during evaluation.
using Assignment = std::map<std::string, Element>;

/// A finite first-order structure: nonempty ordered domain plus a total
/// interpretation of every signature symbol. Immutable after construction;
/// updates build fresh structures.
class FiniteStructure {
public:
  FiniteStructure(Signature sig, std::vector<Element> domain,
                  std::map<std::string, Element> constants,
                  std::map<std::string, std::set<std::vector<Element>>> relations)
      : sig_(std::move(sig)),
        domain_(std::move(domain)),
        constants_(std::move(constants)),
        relations_(std::move(relations)) {
    validate();
  }

  const Signature& signature() const { return sig_; }
  const std::vector<Element>& domain() const { return domain_; }
  bool has_element(const Element& e) const {
    return std::find(domain_.begin(), domain_.end(), e) != domain_.end();
  }

  const Element& constant(const std::string& name) const {
    auto it = constants_.find(name);
    if (it == constants_.end())
      throw Error(ErrorKind::unknown_symbol, "no constant '" + name + "'");
    return it->second;
  }

  const std::set<std::vector<Element>>& relation(const std::string& name) const {
    auto it = relations_.find(name);
    if (it == relations_.end())
      throw Error(ErrorKind::unknown_symbol, "no relation '" + name + "'");
    return it->second;
  }

  bool holds(const std::string& rel, const std::vector<Element>& tuple) const {
    return relation(rel).count(tuple) > 0;
  }

  const std::map<std::string, Element>& constants() const { return constants_; }
  const std::map<std::string, std::set<std::vector<Element>>>& relations() const {
    return relations_;
  }

  /// Extensional equality; domain order and symbol declaration order are
  /// presentation detail and do not matter.
  friend bool operator==(const FiniteStructure& a, const FiniteStructure& b) {
    return a.sig_ == b.sig_ &&
           std::set<Element>(a.domain_.begin(), a.domain_.end()) ==
               std::set<Element>(b.domain_.begin(), b.domain_.end()) &&
           a.constants_ == b.constants_ && a.relations_ == b.relations_;
  }

  /// Deterministic serialization of the extensional content. Equal
  /// structures map to equal keys; used for search deduplication.
  std::string canonical_key() const {
    std::ostringstream os;
    std::vector<Element> dom(domain_.begin(), domain_.end());
    std::sort(dom.begin(), dom.end());
    os << "D:";
    for (const auto& e : dom) os << e << ",";
    os << ";C:";
    for (const auto& [name, e] : constants_) os << name << "=" << e << ",";
    os << ";R:";
    for (const auto& [name, tuples] : relations_) {
      os << name << "={";
      for (const auto& t : tuples) {
        for (const auto& e : t) os << e << " ";
        os << "|";
      }
      os << "},";
    }
    return os.str();
  }

private:
  void validate() const {
    if (domain_.empty())
      throw Error(ErrorKind::malformed_input, "domain must be nonempty");
    std::set<Element> seen;
    for (const auto& e : domain_) {
      if (e.empty())
        throw Error(ErrorKind::malformed_input, "empty element id");
      if (!seen.insert(e).second)
        throw Error(ErrorKind::malformed_input, "duplicate domain element '" + e + "'");
    }
    for (const auto& sym : sig_.symbols()) {
      if (sym.is_constant()) {
        auto it = constants_.find(sym.name);
        if (it == constants_.end())
          throw Error(ErrorKind::malformed_input,
                      "constant '" + sym.name + "' has no interpretation");
        if (!seen.count(it->second))
          throw Error(ErrorKind::malformed_input,
                      "constant '" + sym.name + "' points at unknown element '" +
                          it->second + "'");
      } else {
        auto it = relations_.find(sym.name);
        if (it == relations_.end())
          throw Error(ErrorKind::malformed_input,
                      "relation '" + sym.name + "' has no interpretation");
        for (const auto& tuple : it->second) {
          if (static_cast<int>(tuple.size()) != sym.arity)
            throw Error(ErrorKind::arity_mismatch,
                        "tuple of wrong arity in relation '" + sym.name + "'");
          for (const auto& e : tuple)
            if (!seen.count(e))
              throw Error(ErrorKind::malformed_input,
                          "relation '" + sym.name + "' mentions unknown element '" +
                              e + "'");
        }
      }
    }
    // no interpretations for undeclared symbols
    for (const auto& [name, _] : constants_)
      if (!sig_.find(name) || !sig_.find(name)->is_constant())
        throw Error(ErrorKind::unknown_symbol,
                    "interpretation for undeclared constant '" + name + "'");
    for (const auto& [name, _] : relations_)
      if (!sig_.find(name) || !sig_.find(name)->is_relation())
        throw Error(ErrorKind::unknown_symbol,
                    "interpretation for undeclared relation '" + name + "'");
  }

  Signature sig_;
  std::vector<Element> domain_;
  std::map<std::string, Element> constants_;
  std::map<std::string, std::set<std::vector<Element>>> relations_;
};

// ---------------------------------------------------------------------------
// Satisfaction
// ---------------------------------------------------------------------------

namespace detail {

inline const Element& eval_term(const FiniteStructure& s, const Term& t,
                                const Assignment& a) {
  if (t.is_constant()) return s.constant(t.name);
  auto it = a.find(t.name);
  if (it == a.end())
    throw Error(ErrorKind::free_variable,
                "variable '" + t.name + "' has no binding");
  if (!s.has_element(it->second))
    throw Error(ErrorKind::malformed_input,
                "assignment binds '" + t.name + "' outside the domain");
  return it->second;
}

inline bool satisfies_rec(const FiniteStructure& s, const Formula& f, Assignment& a) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AtomNode>) {
          const Symbol* sym = s.signature().find(n.relation);
          if (!sym || !sym->is_relation())
            throw Error(ErrorKind::unknown_symbol,
                        "relation '" + n.relation + "' not in structure signature");
          if (sym->arity != static_cast<int>(n.args.size()))
            throw Error(ErrorKind::arity_mismatch,
                        "relation '" + n.relation + "' applied to " +
                            std::to_string(n.args.size()) + " argument(s)");
          std::vector<Element> tuple;
          tuple.reserve(n.args.size());
          for (const auto& t : n.args) tuple.push_back(eval_term(s, t, a));
          return s.holds(n.relation, tuple);
        } else if constexpr (std::is_same_v<T, EqualityNode>) {
          return eval_term(s, n.lhs, a) == eval_term(s, n.rhs, a);
        } else if constexpr (std::is_same_v<T, NegationNode>) {
          return !satisfies_rec(s, *n.body, a);
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          switch (n.op) {
            case Connective::conjunction:
              return satisfies_rec(s, *n.lhs, a) && satisfies_rec(s, *n.rhs, a);
            case Connective::disjunction:
              return satisfies_rec(s, *n.lhs, a) || satisfies_rec(s, *n.rhs, a);
            case Connective::implication:
              return !satisfies_rec(s, *n.lhs, a) || satisfies_rec(s, *n.rhs, a);
            case Connective::biconditional:
              return satisfies_rec(s, *n.lhs, a) == satisfies_rec(s, *n.rhs, a);
          }
          return false;
        } else {
          auto saved = a.find(n.var);
          std::string prev;
          bool had = saved != a.end();
          if (had) prev = saved->second;
          bool result = n.q == Quantifier::universal;
          for (const auto& e : s.domain()) {
            a[n.var] = e;
            bool v = satisfies_rec(s, *n.body, a);
            if (n.q == Quantifier::universal ? !v : v) {
              result = !result;
              break;
            }
          }
          if (had)
            a[n.var] = prev;
          else
            a.erase(n.var);
          return result;
        }
      },
      f.node());
}

}  // namespace detail

/// Tarskian satisfaction. The assignment must bind every free variable of f
/// to a domain element; symbols of f must be interpreted by the structure.
inline bool satisfies(const FiniteStructure& s, const Formula& f,
                      const Assignment& a = {}) {
  Assignment env = a;
  return detail::satisfies_rec(s, f, env);
}
inline bool satisfies(const FiniteStructure& s, const FormulaPtr& f,
                      const Assignment& a = {}) {
  return satisfies(s, *f, a);
}

// ---------------------------------------------------------------------------
// Databases
// ---------------------------------------------------------------------------

/// A database is a finite structure together with a finite theory over its
/// signature. A database is *correct* when every theory sentence holds in the
/// structure; deletions may temporarily break correctness (reported as
/// warnings by the update layer), so the type itself does not force it.
struct Database {
  FiniteStructure structure;
  std::vector<FormulaPtr> theory;
};

struct CorrectnessReport {
  bool ok = true;
  std::vector<FormulaPtr> failing;  // theory order
};

inline CorrectnessReport check_correctness(const Database& db) {
  CorrectnessReport report;
  for (const auto& f : db.theory) {
    if (!satisfies(db.structure, f)) {
      report.ok = false;
      report.failing.push_back(f);
    }
  }
  return report;
}

/// Validates that the theory consists of sentences over the structure's
/// signature, then packs a database. Correctness is *not* enforced here.
inline Database make_database(FiniteStructure structure,
                              std::vector<FormulaPtr> theory) {
  for (const auto& f : theory) {
    if (!is_sentence(f))
      throw Error(ErrorKind::free_variable,
                  "theory formula '" + to_string(f) + "' has free variables");
    if (!symbols_of(f).subset_of(structure.signature()))
      throw Error(ErrorKind::out_of_language,
                  "theory sentence '" + to_string(f) +
                      "' uses symbols outside the signature");
  }
  return Database{std::move(structure), std::move(theory)};
}

}  // namespace siminf
