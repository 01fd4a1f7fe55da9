#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "siminf/error.hpp"

namespace siminf {

// ---------------------------------------------------------------------------
// Symbols and signatures
// ---------------------------------------------------------------------------

/// A non-logical symbol: a constant (arity 0) or a relation (arity >= 1).
/// Equality is a logical symbol and never appears in a signature.
struct Symbol {
  std::string name;
  int arity = 0;

  bool is_constant() const { return arity == 0; }
  bool is_relation() const { return arity >= 1; }

  friend bool operator==(const Symbol&, const Symbol&) = default;
  friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

inline bool is_identifier(const std::string& s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_';
  });
}

inline bool is_reserved_word(const std::string& s) {
  return s == "forall" || s == "exists";
}

/// Finite set of symbols with unique names. Declaration order is kept and is
/// the canonical symbol order used for enumeration, planning and output.
class Signature {
public:
  Signature() = default;
  Signature(std::initializer_list<Symbol> symbols) {
    for (const auto& s : symbols) add(s);
  }

  /// Adds a symbol. Re-adding an identical symbol is a no-op; a name clash
  /// with a different arity is an error.
  void add(const Symbol& symbol) {
    if (!is_identifier(symbol.name) || is_reserved_word(symbol.name))
      throw Error(ErrorKind::malformed_input,
                  "invalid symbol name '" + symbol.name + "'");
    if (symbol.arity < 0)
      throw Error(ErrorKind::malformed_input,
                  "negative arity for symbol '" + symbol.name + "'");
    auto it = index_.find(symbol.name);
    if (it == index_.end()) {
      index_.emplace(symbol.name, symbols_.size());
      symbols_.push_back(symbol);
      return;
    }
    if (symbols_[it->second].arity != symbol.arity)
      throw Error(ErrorKind::arity_mismatch,
                  "symbol '" + symbol.name + "' redeclared with arity " +
                      std::to_string(symbol.arity) + " (was " +
                      std::to_string(symbols_[it->second].arity) + ")");
  }

  bool contains(const std::string& name) const { return index_.count(name) > 0; }

  const Symbol* find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &symbols_[it->second];
  }

  const std::vector<Symbol>& symbols() const { return symbols_; }
  std::size_t size() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }

  bool subset_of(const Signature& other) const {
    return std::all_of(symbols_.begin(), symbols_.end(), [&](const Symbol& s) {
      const Symbol* t = other.find(s.name);
      return t && t->arity == s.arity;
    });
  }

  /// Union keeping this signature's order, then the other's new symbols.
  Signature merged(const Signature& other) const {
    Signature out = *this;
    for (const auto& s : other.symbols()) out.add(s);
    return out;
  }

  friend bool operator==(const Signature& a, const Signature& b) {
    auto key = [](const Signature& s) {
      std::set<std::pair<std::string, int>> k;
      for (const auto& sym : s.symbols()) k.emplace(sym.name, sym.arity);
      return k;
    };
    return key(a) == key(b);
  }

private:
  std::vector<Symbol> symbols_;
  std::map<std::string, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

/// A term is a variable or a constant; there are no function symbols.
struct Term {
  enum class Kind { variable, constant };
  Kind kind = Kind::variable;
  std::string name;

  static Term var(std::string n) { return {Kind::variable, std::move(n)}; }
  static Term constant(std::string n) { return {Kind::constant, std::move(n)}; }

  bool is_variable() const { return kind == Kind::variable; }
  bool is_constant() const { return kind == Kind::constant; }

  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term&, const Term&) = default;
};

// ---------------------------------------------------------------------------
// Formulas
// ---------------------------------------------------------------------------

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

enum class Connective { conjunction, disjunction, implication, biconditional };
enum class Quantifier { universal, existential };

struct AtomNode {
  std::string relation;
  std::vector<Term> args;
};
struct EqualityNode {
  Term lhs;
  Term rhs;
};
struct NegationNode {
  FormulaPtr body;
};
struct BinaryNode {
  Connective op;
  FormulaPtr lhs;
  FormulaPtr rhs;
};
struct QuantifierNode {
  Quantifier q;
  std::string var;
  FormulaPtr body;
};

/// Immutable formula tree. Shared subtrees are fine; all operations treat
/// formulas as values.
class Formula {
public:
  using Node =
      std::variant<AtomNode, EqualityNode, NegationNode, BinaryNode, QuantifierNode>;

  explicit Formula(Node node) : node_(std::move(node)) {}
  const Node& node() const { return node_; }

private:
  Node node_;
};

inline FormulaPtr atom(std::string relation, std::vector<Term> args) {
  return std::make_shared<Formula>(AtomNode{std::move(relation), std::move(args)});
}
inline FormulaPtr equality(Term lhs, Term rhs) {
  return std::make_shared<Formula>(EqualityNode{std::move(lhs), std::move(rhs)});
}
inline FormulaPtr negation(FormulaPtr body) {
  return std::make_shared<Formula>(NegationNode{std::move(body)});
}
inline FormulaPtr binary(Connective op, FormulaPtr lhs, FormulaPtr rhs) {
  return std::make_shared<Formula>(BinaryNode{op, std::move(lhs), std::move(rhs)});
}
inline FormulaPtr conjunction(FormulaPtr l, FormulaPtr r) {
  return binary(Connective::conjunction, std::move(l), std::move(r));
}
inline FormulaPtr disjunction(FormulaPtr l, FormulaPtr r) {
  return binary(Connective::disjunction, std::move(l), std::move(r));
}
inline FormulaPtr implication(FormulaPtr l, FormulaPtr r) {
  return binary(Connective::implication, std::move(l), std::move(r));
}
inline FormulaPtr biconditional(FormulaPtr l, FormulaPtr r) {
  return binary(Connective::biconditional, std::move(l), std::move(r));
}
inline FormulaPtr quantified(Quantifier q, std::string var, FormulaPtr body) {
  return std::make_shared<Formula>(QuantifierNode{q, std::move(var), std::move(body)});
}
inline FormulaPtr universal(std::string var, FormulaPtr body) {
  return quantified(Quantifier::universal, std::move(var), std::move(body));
}
inline FormulaPtr existential(std::string var, FormulaPtr body) {
  return quantified(Quantifier::existential, std::move(var), std::move(body));
}

// --- structural equality ---

inline bool formula_equal(const Formula& a, const Formula& b);

inline bool formula_equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return formula_equal(*a, *b);
}

inline bool formula_equal(const Formula& a, const Formula& b) {
  if (a.node().index() != b.node().index()) return false;
  return std::visit(
      [&](const auto& na) -> bool {
        using T = std::decay_t<decltype(na)>;
        const auto& nb = std::get<T>(b.node());
        if constexpr (std::is_same_v<T, AtomNode>) {
          return na.relation == nb.relation && na.args == nb.args;
        } else if constexpr (std::is_same_v<T, EqualityNode>) {
          return na.lhs == nb.lhs && na.rhs == nb.rhs;
        } else if constexpr (std::is_same_v<T, NegationNode>) {
          return formula_equal(na.body, nb.body);
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          return na.op == nb.op && formula_equal(na.lhs, nb.lhs) &&
                 formula_equal(na.rhs, nb.rhs);
        } else {
          return na.q == nb.q && na.var == nb.var && formula_equal(na.body, nb.body);
        }
      },
      a.node());
}

// --- printing ---
//
// Connective spellings: ~ & | -> <->, quantifiers "forall x. F" and
// "exists x. F". Binary and quantified children of binary nodes are
// parenthesized, so output always re-parses to the same tree.

inline std::string to_string(const Term& t) { return t.name; }

inline std::string to_string(const Formula& f);

inline std::string to_string(const FormulaPtr& f) { return to_string(*f); }

namespace detail {

inline const char* connective_spelling(Connective c) {
  switch (c) {
    case Connective::conjunction: return "&";
    case Connective::disjunction: return "|";
    case Connective::implication: return "->";
    case Connective::biconditional: return "<->";
  }
  return "?";
}

inline bool needs_parens_as_child(const Formula& f) {
  return std::holds_alternative<BinaryNode>(f.node()) ||
         std::holds_alternative<QuantifierNode>(f.node());
}

inline std::string print_child(const FormulaPtr& f) {
  std::string s = to_string(*f);
  return needs_parens_as_child(*f) ? "(" + s + ")" : s;
}

}  // namespace detail

inline std::string to_string(const Formula& f) {
  return std::visit(
      [&](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AtomNode>) {
          std::string s = n.relation + "(";
          for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i) s += ",";
            s += to_string(n.args[i]);
          }
          return s + ")";
        } else if constexpr (std::is_same_v<T, EqualityNode>) {
          return to_string(n.lhs) + " = " + to_string(n.rhs);
        } else if constexpr (std::is_same_v<T, NegationNode>) {
          const Formula& b = *n.body;
          if (std::holds_alternative<AtomNode>(b.node()) ||
              std::holds_alternative<NegationNode>(b.node()))
            return "~" + to_string(b);
          return "~(" + to_string(b) + ")";
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          // a quantified right operand needs no parentheses: printed last,
          // its maximal scope is exactly the operand itself
          std::string rhs = std::holds_alternative<QuantifierNode>(n.rhs->node())
                                ? to_string(*n.rhs)
                                : detail::print_child(n.rhs);
          return detail::print_child(n.lhs) + " " +
                 detail::connective_spelling(n.op) + " " + rhs;
        } else {
          std::string head = n.q == Quantifier::universal ? "forall" : "exists";
          const Formula& b = *n.body;
          std::string body = to_string(b);
          if (std::holds_alternative<BinaryNode>(b.node())) body = "(" + body + ")";
          return head + " " + n.var + ". " + body;
        }
      },
      f.node());
}

/// Canonical formula order: lexicographic on the printed form.
inline bool formula_less(const FormulaPtr& a, const FormulaPtr& b) {
  return to_string(*a) < to_string(*b);
}

// --- free variables and symbols ---

namespace detail {

inline void collect_free_variables(const Formula& f, std::set<std::string>& bound,
                                   std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AtomNode>) {
          for (const auto& t : n.args)
            if (t.is_variable() && !bound.count(t.name)) out.insert(t.name);
        } else if constexpr (std::is_same_v<T, EqualityNode>) {
          for (const Term* t : {&n.lhs, &n.rhs})
            if (t->is_variable() && !bound.count(t->name)) out.insert(t->name);
        } else if constexpr (std::is_same_v<T, NegationNode>) {
          collect_free_variables(*n.body, bound, out);
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          collect_free_variables(*n.lhs, bound, out);
          collect_free_variables(*n.rhs, bound, out);
        } else {
          bool fresh = bound.insert(n.var).second;
          collect_free_variables(*n.body, bound, out);
          if (fresh) bound.erase(n.var);
        }
      },
      f.node());
}

inline void collect_symbols(const Formula& f, Signature& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AtomNode>) {
          out.add({n.relation, static_cast<int>(n.args.size())});
          for (const auto& t : n.args)
            if (t.is_constant()) out.add({t.name, 0});
        } else if constexpr (std::is_same_v<T, EqualityNode>) {
          for (const Term* t : {&n.lhs, &n.rhs})
            if (t->is_constant()) out.add({t->name, 0});
        } else if constexpr (std::is_same_v<T, NegationNode>) {
          collect_symbols(*n.body, out);
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          collect_symbols(*n.lhs, out);
          collect_symbols(*n.rhs, out);
        } else {
          collect_symbols(*n.body, out);
        }
      },
      f.node());
}

}  // namespace detail

inline std::set<std::string> free_variables(const Formula& f) {
  std::set<std::string> bound, out;
  detail::collect_free_variables(f, bound, out);
  return out;
}
inline std::set<std::string> free_variables(const FormulaPtr& f) {
  return free_variables(*f);
}

/// Non-logical symbols occurring in the formula, in first-occurrence order.
/// Equality contributes nothing (it is logical vocabulary).
inline Signature symbols_of(const Formula& f) {
  Signature out;
  detail::collect_symbols(f, out);
  return out;
}
inline Signature symbols_of(const FormulaPtr& f) { return symbols_of(*f); }

inline bool is_sentence(const Formula& f) { return free_variables(f).empty(); }
inline bool is_sentence(const FormulaPtr& f) { return is_sentence(*f); }

}  // namespace siminf
