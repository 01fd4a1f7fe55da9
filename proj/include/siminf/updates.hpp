#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "siminf/error.hpp"
#include "siminf/structure.hpp"
#include "siminf/syntax.hpp"

namespace siminf {

// Structural update calculus. Each step changes the interpretation of exactly
// one symbol:
//   insertion  — add one tuple to a relation, or (re)point a constant,
//                possibly introducing fresh domain elements; rejected when a
//                theory sentence would become false;
//   deletion   — remove one tuple or re-point a constant, optionally dropping
//                now-unreferenced elements from the domain; structural
//                conditions are enforced, while theory sentences that become
//                false are reported as warnings rather than rejections (the
//                worked examples this artifact reproduces rely on such
//                deletions being admissible).

/// Element mentioned in an insertion payload; fresh ids extend the domain.
struct ElementRef {
  Element id;
  bool fresh = false;

  friend bool operator==(const ElementRef&, const ElementRef&) = default;
};

struct InsertionSpec {
  Symbol symbol;
  std::vector<ElementRef> payload;  // one entry for constants, arity entries else

  friend bool operator==(const InsertionSpec&, const InsertionSpec&) = default;
};

struct DeletionSpec {
  Symbol symbol;
  std::vector<Element> payload;  // constants: {new referent}; relations: the tuple
  std::vector<Element> drop;     // elements to remove from the domain

  friend bool operator==(const DeletionSpec&, const DeletionSpec&) = default;
};

using UpdateOp = std::variant<InsertionSpec, DeletionSpec>;

inline std::string op_to_string(const UpdateOp& op) {
  return std::visit(
      [](const auto& spec) -> std::string {
        using T = std::decay_t<decltype(spec)>;
        std::string out;
        if constexpr (std::is_same_v<T, InsertionSpec>) {
          out = "insert " + spec.symbol.name;
          if (spec.symbol.is_constant()) {
            out += " = " + spec.payload[0].id + (spec.payload[0].fresh ? "*" : "");
          } else {
            out += " (";
            for (std::size_t i = 0; i < spec.payload.size(); ++i) {
              if (i) out += ", ";
              out += spec.payload[i].id + (spec.payload[i].fresh ? "*" : "");
            }
            out += ")";
          }
        } else {
          out = "delete " + spec.symbol.name;
          if (spec.symbol.is_constant()) {
            out += " -> " + spec.payload[0];
          } else {
            out += " (";
            for (std::size_t i = 0; i < spec.payload.size(); ++i) {
              if (i) out += ", ";
              out += spec.payload[i];
            }
            out += ")";
          }
          if (!spec.drop.empty()) {
            out += " drop ";
            for (std::size_t i = 0; i < spec.drop.size(); ++i) {
              if (i) out += ", ";
              out += spec.drop[i];
            }
          }
        }
        return out;
      },
      op);
}

namespace detail {

inline bool valid_element_id(const Element& e) { return is_identifier(e); }

inline bool element_referenced(const std::map<std::string, Element>& constants,
                               const std::map<std::string, std::set<std::vector<Element>>>& relations,
                               const Element& e, std::string& where) {
  for (const auto& [name, ref] : constants)
    if (ref == e) {
      where = "constant '" + name + "'";
      return true;
    }
  for (const auto& [name, tuples] : relations)
    for (const auto& t : tuples)
      if (std::find(t.begin(), t.end(), e) != t.end()) {
        where = "relation '" + name + "'";
        return true;
      }
  return false;
}

}  // namespace detail

/// Applies one insertion. Throws on malformed payloads, arity clashes,
/// unknown elements, and — per the correctness proviso — whenever the result
/// would falsify a theory sentence.
inline Database apply_insertion(const Database& db, const InsertionSpec& spec) {
  const FiniteStructure& s = db.structure;
  std::size_t expected = spec.symbol.is_constant() ? 1 : spec.symbol.arity;
  if (spec.payload.size() != expected)
    throw Error(ErrorKind::arity_mismatch,
                "insert " + spec.symbol.name + ": expected " +
                    std::to_string(expected) + " payload element(s), got " +
                    std::to_string(spec.payload.size()));

  std::vector<Element> domain = s.domain();
  std::set<Element> present(domain.begin(), domain.end());
  for (const auto& ref : spec.payload) {
    if (!detail::valid_element_id(ref.id))
      throw Error(ErrorKind::malformed_input, "invalid element id '" + ref.id + "'");
    if (ref.fresh) {
      if (s.has_element(ref.id))
        throw Error(ErrorKind::malformed_input,
                    "element '" + ref.id + "' marked fresh but already exists");
      if (present.insert(ref.id).second) domain.push_back(ref.id);
    } else if (!present.count(ref.id)) {
      throw Error(ErrorKind::malformed_input,
                  "unknown element '" + ref.id + "' (mark fresh elements with '*')");
    }
  }

  Signature sig = s.signature();
  sig.add(spec.symbol);  // arity clash with an existing symbol throws here

  auto constants = s.constants();
  auto relations = s.relations();
  if (spec.symbol.is_constant()) {
    constants[spec.symbol.name] = spec.payload[0].id;
  } else {
    std::vector<Element> tuple;
    for (const auto& ref : spec.payload) tuple.push_back(ref.id);
    relations[spec.symbol.name].insert(std::move(tuple));
  }

  Database next{FiniteStructure(std::move(sig), std::move(domain),
                                std::move(constants), std::move(relations)),
                db.theory};
  std::string violated;
  for (const auto& f : next.theory)
    if (!satisfies(next.structure, f)) {
      if (!violated.empty()) violated += "; ";
      violated += to_string(f);
    }
  if (!violated.empty())
    throw Error(ErrorKind::theory_violation,
                "insert " + spec.symbol.name +
                    " rejected: theory sentence(s) would become false: " + violated);
  return next;
}

struct DeletionResult {
  Database database;
  std::vector<FormulaPtr> unsatisfied;  // theory sentences false after the step
};

/// Applies one deletion. Structural conditions (symbol known, tuple present,
/// dropped elements unreferenced, domain nonempty) are hard errors; theory
/// sentences that become false are returned in `unsatisfied`.
inline DeletionResult apply_deletion(const Database& db, const DeletionSpec& spec) {
  const FiniteStructure& s = db.structure;
  const Symbol* declared = s.signature().find(spec.symbol.name);
  if (!declared)
    throw Error(ErrorKind::unknown_symbol,
                "delete " + spec.symbol.name + ": symbol not in signature");
  if (declared->arity != spec.symbol.arity)
    throw Error(ErrorKind::arity_mismatch,
                "delete " + spec.symbol.name + ": declared arity " +
                    std::to_string(declared->arity) + ", spec says " +
                    std::to_string(spec.symbol.arity));

  std::size_t expected = declared->is_constant() ? 1 : declared->arity;
  if (spec.payload.size() != expected)
    throw Error(ErrorKind::arity_mismatch,
                "delete " + spec.symbol.name + ": expected " +
                    std::to_string(expected) + " payload element(s), got " +
                    std::to_string(spec.payload.size()));
  for (const auto& e : spec.payload)
    if (!s.has_element(e))
      throw Error(ErrorKind::malformed_input,
                  "delete " + spec.symbol.name + ": unknown element '" + e + "'");

  auto constants = s.constants();
  auto relations = s.relations();
  std::vector<Element> droppable;  // which elements the drop list may name

  if (declared->is_constant()) {
    droppable.push_back(constants.at(declared->name));
    constants[declared->name] = spec.payload[0];
  } else {
    std::vector<Element> tuple = spec.payload;
    auto& tuples = relations.at(declared->name);
    if (!tuples.count(tuple)) {
      std::string shown;
      for (const auto& e : tuple) shown += (shown.empty() ? "" : ", ") + e;
      throw Error(ErrorKind::tuple_not_present,
                  "delete " + declared->name + ": tuple (" + shown +
                      ") not present");
    }
    tuples.erase(tuple);
    droppable = tuple;
  }

  std::set<Element> drops;
  for (const auto& e : spec.drop) {
    if (std::find(droppable.begin(), droppable.end(), e) == droppable.end())
      throw Error(ErrorKind::malformed_input,
                  "delete " + declared->name + ": '" + e +
                      "' is not part of the removed interpretation");
    drops.insert(e);
  }
  for (const auto& e : drops) {
    std::string where;
    if (detail::element_referenced(constants, relations, e, where))
      throw Error(ErrorKind::dangling_element,
                  "cannot drop '" + e + "': still referenced by " + where);
  }

  std::vector<Element> domain;
  for (const auto& e : s.domain())
    if (!drops.count(e)) domain.push_back(e);
  if (domain.empty())
    throw Error(ErrorKind::malformed_input, "deletion would empty the domain");

  DeletionResult result{Database{FiniteStructure(s.signature(), std::move(domain),
                                                 std::move(constants),
                                                 std::move(relations)),
                                 db.theory},
                        {}};
  for (const auto& f : result.database.theory)
    if (!satisfies(result.database.structure, f)) result.unsatisfied.push_back(f);
  return result;
}

struct StepWarning {
  int step = 0;  // 1-based op index
  std::vector<FormulaPtr> unsatisfied;
};

/// A validated update: the base database followed by the database after each
/// step. All databases share the base's theory.
class Update {
public:
  static Update initial(Database base) {
    Update u;
    u.databases_.push_back(std::move(base));
    return u;
  }

  const std::vector<Database>& databases() const { return databases_; }
  const std::vector<UpdateOp>& ops() const { return ops_; }
  const std::vector<StepWarning>& warnings() const { return warnings_; }

  const Database& base() const { return databases_.front(); }
  const Database& final_database() const { return databases_.back(); }
  int steps() const { return static_cast<int>(ops_.size()); }

  friend Update build_update(const Database&, const std::vector<UpdateOp>&);

private:
  std::vector<Database> databases_;
  std::vector<UpdateOp> ops_;
  std::vector<StepWarning> warnings_;
};

/// Applies the ops in order, validating every step. Throws Error carrying the
/// 1-based step index on the first invalid op; nothing is returned partially.
inline Update build_update(const Database& base, const std::vector<UpdateOp>& ops) {
  Update u = Update::initial(base);
  for (std::size_t i = 0; i < ops.size(); ++i) {
    int step = static_cast<int>(i) + 1;
    try {
      if (const auto* ins = std::get_if<InsertionSpec>(&ops[i])) {
        u.databases_.push_back(apply_insertion(u.databases_.back(), *ins));
      } else {
        DeletionResult r =
            apply_deletion(u.databases_.back(), std::get<DeletionSpec>(ops[i]));
        u.databases_.push_back(std::move(r.database));
        if (!r.unsatisfied.empty())
          u.warnings_.push_back({step, std::move(r.unsatisfied)});
      }
    } catch (const Error& e) {
      throw Error(e.kind(),
                  "step " + std::to_string(step) + " (" + op_to_string(ops[i]) +
                      "): " + e.what(),
                  step);
    }
    u.ops_.push_back(ops[i]);
  }
  return u;
}

/// Truth of f at the 0-based step i. A formula whose symbols are not all in
/// that step's signature counts as false there ("false by absence").
inline bool true_at_step(const Update& u, int i, const FormulaPtr& f) {
  const Database& db = u.databases().at(static_cast<std::size_t>(i));
  if (!symbols_of(f).subset_of(db.structure.signature())) return false;
  return satisfies(db.structure, f);
}

/// Whether the final database satisfies f. Unlike the metric layer this is
/// strict: asking about a sentence outside the final language is an error.
inline bool is_coherent_with(const Update& u, const FormulaPtr& f) {
  if (!is_sentence(f))
    throw Error(ErrorKind::precondition,
                "coherence is defined for sentences, got '" + to_string(f) + "'");
  if (!symbols_of(f).subset_of(u.final_database().structure.signature()))
    throw Error(ErrorKind::out_of_language,
                "'" + to_string(f) + "' uses symbols outside the final signature");
  return satisfies(u.final_database().structure, f);
}

}  // namespace siminf
