#pragma once

#include <algorithm>
#include <deque>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "siminf/entailment.hpp"
#include "siminf/error.hpp"
#include "siminf/metrics.hpp"
#include "siminf/rational.hpp"
#include "siminf/structure.hpp"
#include "siminf/updates.hpp"

namespace siminf {

struct PlanBounds {
  int max_steps = 2;
  int max_fresh_elements = 2;  // total fresh ids over the whole plan
  int max_branch = 5000;       // cap on successors generated per state
  EntailmentOptions entailment;
};

struct Plan {
  Update update;
  Rational coherency_achieved{0};
  int steps_used = 0;
};

enum class PlanFailureReason {
  impossible_up_to_bound,  // target unsatisfiable in all structures <= bound
  bounds_exhausted,        // search space exceeded the given bounds
};

struct PlanResult {
  std::optional<Plan> plan;
  PlanFailureReason reason = PlanFailureReason::bounds_exhausted;
  std::string note;
};

namespace detail {

/// Smallest fresh id "fN" with N > last_index that is not a domain element.
inline Element next_fresh_id(const std::vector<Element>& domain, int& last_index) {
  while (true) {
    ++last_index;
    Element id = "f" + std::to_string(last_index);
    if (std::find(domain.begin(), domain.end(), id) == domain.end()) return id;
  }
}

struct SearchNode {
  Database db;
  std::vector<UpdateOp> ops;
  int fresh_used = 0;
};

/// Successors in canonical order: insertions before deletions; symbols in
/// signature order (target symbols missing from it appended, sorted by name);
/// payload tuples lexicographic with existing elements (domain order) before
/// fresh ids. Fresh ids are drawn from a canonical pool in first-use order,
/// which quotients away fresh-element renamings.
inline std::vector<SearchNode> successors(const SearchNode& node,
                                          const Signature& target_syms,
                                          int max_fresh, int max_branch) {
  const Database& db = node.db;
  const FiniteStructure& s = db.structure;
  const auto& domain = s.domain();

  std::vector<Symbol> order = s.signature().symbols();
  {
    std::vector<Symbol> extra;
    for (const auto& sym : target_syms.symbols())
      if (!s.signature().contains(sym.name)) extra.push_back(sym);
    std::sort(extra.begin(), extra.end(),
              [](const Symbol& a, const Symbol& b) { return a.name < b.name; });
    order.insert(order.end(), extra.begin(), extra.end());
  }

  std::vector<SearchNode> out;
  auto emit = [&](Database next, UpdateOp op, int fresh_spent) {
    if (static_cast<int>(out.size()) >= max_branch)
      throw Error(ErrorKind::bounds_exhausted,
                  "more than " + std::to_string(max_branch) +
                      " candidate steps from one state");
    SearchNode child{std::move(next), node.ops, node.fresh_used + fresh_spent};
    child.ops.push_back(std::move(op));
    out.push_back(std::move(child));
  };

  // --- insertions ---
  for (const auto& sym : order) {
    int budget = max_fresh - node.fresh_used;
    if (sym.is_constant()) {
      const Element* current = nullptr;
      if (s.signature().contains(sym.name)) current = &s.constant(sym.name);
      std::vector<ElementRef> candidates;
      for (const auto& e : domain) candidates.push_back({e, false});
      if (budget > 0) {
        int idx = 0;
        candidates.push_back({next_fresh_id(domain, idx), true});
      }
      for (const auto& ref : candidates) {
        if (current && *current == ref.id) continue;  // no-op
        InsertionSpec spec{sym, {ref}};
        try {
          emit(apply_insertion(db, spec), spec, ref.fresh ? 1 : 0);
        } catch (const Error& e) {
          if (e.kind() == ErrorKind::bounds_exhausted) throw;
        }
      }
    } else {
      std::vector<Element> pool;  // canonical fresh ids, in forced first-use order
      {
        int idx = 0;
        for (int i = 0; i < std::min(sym.arity, budget); ++i)
          pool.push_back(next_fresh_id(domain, idx));
      }
      std::vector<Element> universe = domain;
      universe.insert(universe.end(), pool.begin(), pool.end());
      std::size_t existing = domain.size();

      std::vector<std::size_t> digits(sym.arity, 0);
      while (true) {
        // canonical fresh use: the i-th distinct fresh id appearing must be pool[i]
        std::vector<std::size_t> fresh_seen;
        bool canonical = true;
        for (std::size_t d : digits) {
          if (d < existing) continue;
          std::size_t pool_pos = d - existing;
          auto it = std::find(fresh_seen.begin(), fresh_seen.end(), pool_pos);
          if (it == fresh_seen.end()) {
            if (pool_pos != fresh_seen.size()) { canonical = false; break; }
            fresh_seen.push_back(pool_pos);
          }
        }
        if (canonical) {
          std::vector<ElementRef> payload;
          for (std::size_t d : digits) payload.push_back({universe[d], d >= existing});
          bool noop = s.signature().contains(sym.name) && [&] {
            std::vector<Element> tuple;
            for (const auto& r : payload) tuple.push_back(r.id);
            return s.holds(sym.name, tuple);
          }();
          if (!noop) {
            InsertionSpec spec{sym, std::move(payload)};
            try {
              emit(apply_insertion(db, spec), spec,
                   static_cast<int>(fresh_seen.size()));
            } catch (const Error& e) {
              if (e.kind() == ErrorKind::bounds_exhausted) throw;
            }
          }
        }
        int pos = sym.arity - 1;
        while (pos >= 0 && digits[pos] + 1 == universe.size()) digits[pos--] = 0;
        if (pos < 0) break;
        ++digits[pos];
      }
    }
  }

  // --- deletions (only over symbols the state interprets) ---
  for (const auto& sym : s.signature().symbols()) {
    if (sym.is_constant()) {
      const Element& old = s.constant(sym.name);
      for (const auto& e : domain) {
        if (e == old) continue;
        for (bool with_drop : {false, true}) {
          DeletionSpec spec{sym, {e}, {}};
          if (with_drop) spec.drop = {old};
          try {
            emit(apply_deletion(db, spec).database, spec, 0);
          } catch (const Error& err) {
            if (err.kind() == ErrorKind::bounds_exhausted) throw;
          }
        }
      }
    } else {
      for (const auto& tuple : s.relation(sym.name)) {
        std::vector<Element> unique;
        for (const auto& e : tuple)
          if (std::find(unique.begin(), unique.end(), e) == unique.end())
            unique.push_back(e);
        for (std::size_t mask = 0; mask < (std::size_t{1} << unique.size()); ++mask) {
          DeletionSpec spec{sym, tuple, {}};
          for (std::size_t i = 0; i < unique.size(); ++i)
            if (mask & (std::size_t{1} << i)) spec.drop.push_back(unique[i]);
          try {
            emit(apply_deletion(db, spec).database, spec, 0);
          } catch (const Error& err) {
            if (err.kind() == ErrorKind::bounds_exhausted) throw;
          }
        }
      }
    }
  }
  return out;
}

}  // namespace detail

/// Breadth-first search for a shortest valid update making the target
/// sentence true in the final database. Deterministic: candidate steps are
/// generated in a fixed canonical order, so reruns return byte-identical
/// plans. Targets that are unsatisfiable in every structure with domain size
/// up to the entailment bound are reported as impossible.
inline PlanResult plan_coherent_update(const Database& db, const FormulaPtr& target,
                                       const PlanBounds& bounds = {}) {
  if (!is_sentence(target))
    throw Error(ErrorKind::precondition,
                "plan target must be a sentence, got '" + to_string(target) + "'");
  // surfaces arity clashes between the target and the database up front
  Signature target_syms = symbols_of(target);
  (void)db.structure.signature().merged(target_syms);

  PlanResult result;
  if (is_contradiction_bounded(target, bounds.entailment)) {
    result.reason = PlanFailureReason::impossible_up_to_bound;
    result.note = "target is unsatisfiable in every structure with domain size up to " +
                  std::to_string(bounds.entailment.max_domain);
    return result;
  }

  auto goal = [&](const Database& state) {
    return symbols_of(target).subset_of(state.structure.signature()) &&
           satisfies(state.structure, target);
  };
  auto finish = [&](const detail::SearchNode& node) {
    Plan plan;
    plan.update = build_update(db, node.ops);
    plan.steps_used = static_cast<int>(node.ops.size());
    CoherencyResult h = coherency(plan.update, target);
    if (!h.coherent || h.first_true != plan.steps_used + 1)
      throw std::logic_error("internal: planner produced a non-minimal plan");
    plan.coherency_achieved = h.value;
    result.plan = std::move(plan);
    return result;
  };

  detail::SearchNode start{db, {}, 0};
  if (goal(start.db)) return finish(start);

  std::set<std::string> visited;
  visited.insert(start.db.structure.canonical_key() + "#0");
  std::deque<detail::SearchNode> queue{start};

  try {
    while (!queue.empty()) {
      detail::SearchNode node = std::move(queue.front());
      queue.pop_front();
      if (static_cast<int>(node.ops.size()) >= bounds.max_steps) continue;
      for (auto& child : detail::successors(node, target_syms,
                                            bounds.max_fresh_elements,
                                            bounds.max_branch)) {
        std::string key = child.db.structure.canonical_key() + "#" +
                          std::to_string(child.fresh_used);
        if (!visited.insert(key).second) continue;
        if (goal(child.db)) return finish(child);
        queue.push_back(std::move(child));
      }
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::bounds_exhausted) throw;
    result.reason = PlanFailureReason::bounds_exhausted;
    result.note = e.what();
    return result;
  }

  result.reason = PlanFailureReason::bounds_exhausted;
  result.note = "no plan within " + std::to_string(bounds.max_steps) + " step(s)";
  return result;
}

/// Minimal number of steps needed, when a plan exists within bounds.
inline std::optional<int> changes_required(const Database& db, const FormulaPtr& target,
                                           const PlanBounds& bounds = {}) {
  PlanResult r = plan_coherent_update(db, target, bounds);
  if (!r.plan) return std::nullopt;
  return r.plan->steps_used;
}

inline std::string deduction_to_string(const Deduction& d) {
  std::string out;
  for (std::size_t i = 0; i < d.premises.size(); ++i) {
    if (i) out += "; ";
    out += to_string(d.premises[i]);
  }
  out += " |- " + to_string(d.conclusion);
  return out;
}

struct RankedCandidate {
  Deduction deduction;
  std::optional<Plan> plan;
  Rational informativity_value{0};
  Rational relevancy_value{0};
  Rational coherency_value{0};
  int results_count = 0;
  bool ranked = false;
  std::string note;  // failure description when not ranked
};

/// Plans each candidate's conclusion, scores the deduction under that plan,
/// and sorts: informativity desc, then fewer steps, then more produced
/// results, then canonical text. Candidates whose planning fails are returned
/// after the ranked ones, unranked, with the failure noted.
inline std::vector<RankedCandidate> rank_deductions(const Database& db,
                                                    const std::vector<Deduction>& candidates,
                                                    const PlanBounds& bounds = {}) {
  std::vector<RankedCandidate> ranked, failed;
  for (const auto& d : candidates) {
    RankedCandidate rc;
    rc.deduction = d;
    try {
      PlanResult pr = plan_coherent_update(db, d.conclusion, bounds);
      if (!pr.plan) {
        rc.note = pr.note.empty()
                      ? (pr.reason == PlanFailureReason::impossible_up_to_bound
                             ? "impossible"
                             : "bounds exhausted")
                      : pr.note;
        failed.push_back(std::move(rc));
        continue;
      }
      const Update& u = pr.plan->update;
      rc.relevancy_value = relevancy(u, d, bounds.entailment);
      rc.coherency_value = coherency(u, d.conclusion).value;
      rc.informativity_value = informativity(u, d, bounds.entailment);
      rc.results_count =
          rc.relevancy_value == Rational(0)
              ? 0
              : static_cast<int>(produced_results(u, d, bounds.entailment).size());
      rc.plan = std::move(pr.plan);
      rc.ranked = true;
      ranked.push_back(std::move(rc));
    } catch (const Error& e) {
      rc.note = e.what();
      failed.push_back(std::move(rc));
    }
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedCandidate& a, const RankedCandidate& b) {
                     if (a.informativity_value != b.informativity_value)
                       return a.informativity_value > b.informativity_value;
                     if (a.plan->steps_used != b.plan->steps_used)
                       return a.plan->steps_used < b.plan->steps_used;
                     if (a.results_count != b.results_count)
                       return a.results_count > b.results_count;
                     return deduction_to_string(a.deduction) <
                            deduction_to_string(b.deduction);
                   });
  for (auto& f : failed) ranked.push_back(std::move(f));
  return ranked;
}

}  // namespace siminf
