#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "siminf/error.hpp"
#include "siminf/structure.hpp"
#include "siminf/syntax.hpp"

namespace siminf {

/// Bounds for model enumeration. `budget` caps the number of candidate
/// structures (counted before pruning); exceeding it raises an explicit
/// resource error instead of silently truncating the search.
struct EntailmentOptions {
  int max_domain = 3;
  std::uint64_t budget = 20'000'000;
  bool prune_isomorphic = true;
};

enum class EntailmentOutcome { entailed_up_to_bound, countermodel_found };

struct EntailmentVerdict {
  EntailmentOutcome outcome = EntailmentOutcome::entailed_up_to_bound;
  std::optional<FiniteStructure> witness;  // present iff countermodel_found
  int bound = 0;                           // the max_domain actually used
  std::uint64_t structures_checked = 0;

  bool entailed() const {
    return outcome == EntailmentOutcome::entailed_up_to_bound;
  }
};

namespace detail {

// Compact enumeration domain: constants as element indices, relations as
// bitmasks over the mixed-radix tuple space of size n^arity.

struct EnumSymbols {
  std::vector<Symbol> constants;
  std::vector<Symbol> relations;
  std::map<std::string, int> const_slot;
  std::map<std::string, int> rel_slot;

  static EnumSymbols from(const Signature& sig) {
    EnumSymbols out;
    for (const auto& s : sig.symbols()) {
      if (s.is_constant()) {
        out.const_slot.emplace(s.name, out.constants.size());
        out.constants.push_back(s);
      } else {
        out.rel_slot.emplace(s.name, out.relations.size());
        out.relations.push_back(s);
      }
    }
    return out;
  }
};

struct CompiledNode {
  enum class Kind { atom, equality, negation, binary, quantifier } kind;
  int rel = -1;                             // atom
  std::vector<std::pair<bool, int>> args;   // (is_var, slot) — atom / equality
  int a = -1, b = -1;                       // children
  Connective op = Connective::conjunction;  // binary
  bool universal_q = false;                 // quantifier
  int var_slot = -1;                        // quantifier
};

struct CompiledFormula {
  std::vector<CompiledNode> nodes;
  int root = -1;
  int depth = 0;  // quantifier nesting, sizes the variable environment
};

inline int compile_rec(const Formula& f, const EnumSymbols& syms,
                       std::map<std::string, int>& var_slots, int depth,
                       CompiledFormula& out) {
  int self = static_cast<int>(out.nodes.size());
  out.nodes.emplace_back();
  auto term_ref = [&](const Term& t) -> std::pair<bool, int> {
    if (t.is_variable()) {
      auto it = var_slots.find(t.name);
      if (it == var_slots.end())
        throw Error(ErrorKind::free_variable,
                    "variable '" + t.name + "' not bound during compilation");
      return {true, it->second};
    }
    return {false, syms.const_slot.at(t.name)};
  };
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AtomNode>) {
          CompiledNode node;
          node.kind = CompiledNode::Kind::atom;
          node.rel = syms.rel_slot.at(n.relation);
          for (const auto& t : n.args) node.args.push_back(term_ref(t));
          out.nodes[self] = std::move(node);
        } else if constexpr (std::is_same_v<T, EqualityNode>) {
          CompiledNode node;
          node.kind = CompiledNode::Kind::equality;
          node.args = {term_ref(n.lhs), term_ref(n.rhs)};
          out.nodes[self] = std::move(node);
        } else if constexpr (std::is_same_v<T, NegationNode>) {
          int child = compile_rec(*n.body, syms, var_slots, depth, out);
          out.nodes[self].kind = CompiledNode::Kind::negation;
          out.nodes[self].a = child;
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          int lhs = compile_rec(*n.lhs, syms, var_slots, depth, out);
          int rhs = compile_rec(*n.rhs, syms, var_slots, depth, out);
          out.nodes[self].kind = CompiledNode::Kind::binary;
          out.nodes[self].op = n.op;
          out.nodes[self].a = lhs;
          out.nodes[self].b = rhs;
        } else {
          auto prev = var_slots.find(n.var);
          int saved = prev == var_slots.end() ? -1 : prev->second;
          var_slots[n.var] = depth;
          out.depth = std::max(out.depth, depth + 1);
          int child = compile_rec(*n.body, syms, var_slots, depth + 1, out);
          if (saved >= 0)
            var_slots[n.var] = saved;
          else
            var_slots.erase(n.var);
          out.nodes[self].kind = CompiledNode::Kind::quantifier;
          out.nodes[self].universal_q = n.q == Quantifier::universal;
          out.nodes[self].var_slot = depth;
          out.nodes[self].a = child;
        }
      },
      f.node());
  return self;
}

inline CompiledFormula compile(const Formula& f, const EnumSymbols& syms) {
  CompiledFormula out;
  std::map<std::string, int> var_slots;
  out.root = compile_rec(f, syms, var_slots, 0, out);
  return out;
}

struct Candidate {
  int n = 1;
  std::vector<int> consts;
  std::vector<std::vector<std::uint64_t>> rel_masks;
  std::vector<std::uint64_t> tuple_counts;

  bool rel_has(int rel, std::uint64_t idx) const {
    return (rel_masks[rel][idx >> 6] >> (idx & 63)) & 1u;
  }
};

inline bool eval(const Candidate& c, const CompiledFormula& cf, int node,
                 std::vector<int>& env) {
  const CompiledNode& nd = cf.nodes[node];
  switch (nd.kind) {
    case CompiledNode::Kind::atom: {
      std::uint64_t idx = 0;
      for (const auto& [is_var, slot] : nd.args)
        idx = idx * static_cast<std::uint64_t>(c.n) +
              static_cast<std::uint64_t>(is_var ? env[slot] : c.consts[slot]);
      return c.rel_has(nd.rel, idx);
    }
    case CompiledNode::Kind::equality: {
      auto value = [&](const std::pair<bool, int>& r) {
        return r.first ? env[r.second] : c.consts[r.second];
      };
      return value(nd.args[0]) == value(nd.args[1]);
    }
    case CompiledNode::Kind::negation:
      return !eval(c, cf, nd.a, env);
    case CompiledNode::Kind::binary:
      switch (nd.op) {
        case Connective::conjunction:
          return eval(c, cf, nd.a, env) && eval(c, cf, nd.b, env);
        case Connective::disjunction:
          return eval(c, cf, nd.a, env) || eval(c, cf, nd.b, env);
        case Connective::implication:
          return !eval(c, cf, nd.a, env) || eval(c, cf, nd.b, env);
        case Connective::biconditional:
          return eval(c, cf, nd.a, env) == eval(c, cf, nd.b, env);
      }
      return false;
    case CompiledNode::Kind::quantifier:
      for (int e = 0; e < c.n; ++e) {
        env[nd.var_slot] = e;
        bool v = eval(c, cf, nd.a, env);
        if (nd.universal_q ? !v : v) return !nd.universal_q;
      }
      return nd.universal_q;
  }
  return false;
}

// saturating helpers for the budget estimate
inline std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > std::numeric_limits<std::uint64_t>::max() / b)
    return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}
inline std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a + b;
  return s < a ? std::numeric_limits<std::uint64_t>::max() : s;
}
inline std::uint64_t sat_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t out = 1;
  for (std::uint64_t i = 0; i < exp; ++i) out = sat_mul(out, base);
  return out;
}

/// Unpruned candidate count for domain sizes 1..k (upper bound on work).
inline std::uint64_t candidate_count(const EnumSymbols& syms, int k) {
  std::uint64_t total = 0;
  for (int n = 1; n <= k; ++n) {
    std::uint64_t per = sat_pow(n, syms.constants.size());
    for (const auto& r : syms.relations) {
      std::uint64_t tc = sat_pow(n, static_cast<std::uint64_t>(r.arity));
      per = sat_mul(per, tc >= 64 ? std::numeric_limits<std::uint64_t>::max()
                                  : (std::uint64_t{1} << tc));
    }
    total = sat_add(total, per);
  }
  return total;
}

// Constant-vector successor. Canonical (pruned) mode walks restricted growth
// strings: consts[i] <= max(consts[0..i-1]) + 1. Every structure is isomorphic
// to one whose constants form such a string, and relation interpretations are
// enumerated exhaustively, so verdicts are unchanged.
inline bool next_const_vector(std::vector<int>& consts, int n, bool prune) {
  if (consts.empty()) return false;
  for (int i = static_cast<int>(consts.size()) - 1; i >= 0; --i) {
    int cap = n - 1;
    if (prune) {
      int prefix_max = -1;
      for (int j = 0; j < i; ++j) prefix_max = std::max(prefix_max, consts[j]);
      cap = std::min(cap, prefix_max + 1);
    }
    if (consts[i] < cap) {
      ++consts[i];
      for (std::size_t j = i + 1; j < consts.size(); ++j) consts[j] = 0;
      return true;
    }
  }
  return false;
}

/// Advances the relation masks as one big odometer (last relation fastest).
inline bool next_rel_masks(Candidate& c) {
  for (int r = static_cast<int>(c.rel_masks.size()) - 1; r >= 0; --r) {
    auto& mask = c.rel_masks[r];
    std::uint64_t tc = c.tuple_counts[r];
    bool carried = true;
    for (auto& word : mask) {
      if (++word != 0) {
        carried = false;
        break;
      }
    }
    bool overflow = carried;
    if (!overflow && (tc & 63) != 0) {
      std::uint64_t top = mask[(tc - 1) >> 6] >> (tc & 63);
      overflow = top != 0;
    }
    if (!overflow) return true;
    std::fill(mask.begin(), mask.end(), 0);
  }
  return false;
}

/// Calls visit(candidate) for every candidate structure with domain size
/// 1..max_domain in canonical order. Stops early when visit returns true.
template <typename Visit>
void enumerate_candidates(const EnumSymbols& syms, int max_domain, bool prune,
                          Visit&& visit) {
  for (int n = 1; n <= max_domain; ++n) {
    Candidate c;
    c.n = n;
    c.consts.assign(syms.constants.size(), 0);
    c.tuple_counts.clear();
    c.rel_masks.clear();
    for (const auto& r : syms.relations) {
      std::uint64_t tc = sat_pow(n, static_cast<std::uint64_t>(r.arity));
      c.tuple_counts.push_back(tc);
      c.rel_masks.emplace_back((tc + 63) / 64, 0);
    }
    while (true) {
      if (visit(c)) return;
      if (!next_rel_masks(c)) {
        if (!next_const_vector(c.consts, n, prune)) break;
      }
    }
  }
}

inline FiniteStructure candidate_to_structure(const Candidate& c,
                                              const EnumSymbols& syms) {
  std::vector<Element> domain;
  for (int i = 0; i < c.n; ++i) domain.push_back("e" + std::to_string(i + 1));
  Signature sig;
  std::map<std::string, Element> constants;
  std::map<std::string, std::set<std::vector<Element>>> relations;
  for (std::size_t i = 0; i < syms.constants.size(); ++i) {
    sig.add(syms.constants[i]);
    constants[syms.constants[i].name] = domain[c.consts[i]];
  }
  for (std::size_t r = 0; r < syms.relations.size(); ++r) {
    sig.add(syms.relations[r]);
    auto& tuples = relations[syms.relations[r].name];
    int arity = syms.relations[r].arity;
    for (std::uint64_t idx = 0; idx < c.tuple_counts[r]; ++idx) {
      if (!c.rel_has(static_cast<int>(r), idx)) continue;
      std::vector<Element> tuple(arity);
      std::uint64_t rest = idx;
      for (int pos = arity - 1; pos >= 0; --pos) {
        tuple[pos] = domain[rest % c.n];
        rest /= c.n;
      }
      tuples.insert(std::move(tuple));
    }
  }
  return FiniteStructure(std::move(sig), std::move(domain), std::move(constants),
                         std::move(relations));
}

}  // namespace detail

/// Decides T |= f over all structures with domain size 1..max_domain,
/// interpreting the symbols of T and f. Sound for refutation: a returned
/// countermodel really satisfies T and falsifies f (it is re-checked against
/// the reference evaluator before being returned). "Entailed" means only
/// "no countermodel up to the bound".
inline EntailmentVerdict entails_bounded(const std::vector<FormulaPtr>& theory,
                                         const FormulaPtr& f,
                                         const EntailmentOptions& opts = {}) {
  if (opts.max_domain < 1)
    throw Error(ErrorKind::precondition, "max_domain must be at least 1");
  for (const auto& t : theory)
    if (!is_sentence(t))
      throw Error(ErrorKind::precondition,
                  "theory formula '" + to_string(t) + "' is not a sentence");
  if (!is_sentence(f))
    throw Error(ErrorKind::precondition,
                "entailment requires a sentence, got '" + to_string(f) + "'");

  Signature sig;
  for (const auto& t : theory) sig = sig.merged(symbols_of(t));
  sig = sig.merged(symbols_of(f));
  auto syms = detail::EnumSymbols::from(sig);

  std::uint64_t needed = detail::candidate_count(syms, opts.max_domain);
  if (needed > opts.budget)
    throw Error(ErrorKind::resource_budget,
                "enumeration needs " + std::to_string(needed) +
                    " candidate structures, budget is " +
                    std::to_string(opts.budget));

  std::vector<detail::CompiledFormula> compiled_theory;
  compiled_theory.reserve(theory.size());
  for (const auto& t : theory) compiled_theory.push_back(detail::compile(*t, syms));
  detail::CompiledFormula compiled_goal = detail::compile(*f, syms);
  int depth = compiled_goal.depth;
  for (const auto& ct : compiled_theory) depth = std::max(depth, ct.depth);
  std::vector<int> env(static_cast<std::size_t>(depth), 0);

  EntailmentVerdict verdict;
  verdict.bound = opts.max_domain;
  detail::enumerate_candidates(
      syms, opts.max_domain, opts.prune_isomorphic,
      [&](const detail::Candidate& c) -> bool {
        ++verdict.structures_checked;
        for (const auto& ct : compiled_theory)
          if (!detail::eval(c, ct, ct.root, env)) return false;
        if (detail::eval(c, compiled_goal, compiled_goal.root, env)) return false;
        FiniteStructure witness = detail::candidate_to_structure(c, syms);
        for (const auto& t : theory)
          if (!satisfies(witness, t))
            throw std::logic_error("internal: countermodel fails theory re-check");
        if (satisfies(witness, f))
          throw std::logic_error("internal: countermodel satisfies goal on re-check");
        verdict.outcome = EntailmentOutcome::countermodel_found;
        verdict.witness = std::move(witness);
        return true;
      });
  return verdict;
}

inline bool is_tautology_bounded(const FormulaPtr& f,
                                 const EntailmentOptions& opts = {}) {
  return entails_bounded({}, f, opts).entailed();
}

/// True when f has no model with domain size up to the bound. Exact for real
/// contradictions; sentences satisfiable only above the bound are
/// misclassified, which callers must surface as a bounded verdict.
inline bool is_contradiction_bounded(const FormulaPtr& f,
                                     const EntailmentOptions& opts = {}) {
  return entails_bounded({}, negation(f), opts).entailed();
}

/// Consequence test used by the relevancy metric: a formula mentioning
/// symbols outside `language` is never counted as a consequence of T, no
/// matter what the enumeration would say.
inline bool consequence_for_relevancy(const std::vector<FormulaPtr>& theory,
                                      const Signature& language, const FormulaPtr& f,
                                      const EntailmentOptions& opts = {}) {
  if (!symbols_of(f).subset_of(language)) return false;
  return entails_bounded(theory, f, opts).entailed();
}

}  // namespace siminf
