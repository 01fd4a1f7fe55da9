// Acceptance suite: seven top-level checks, one [PASS]/[FAIL] line printed
// per check (see the listener at the bottom). Run the binary directly to see
// the lines; the process exit code is nonzero if any line fails.
#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "siminf/siminf.hpp"
#include "support/common.hpp"
#include "support/generators.hpp"
#include "support/oracle.hpp"

using namespace siminf;
using Clock = std::chrono::steady_clock;

namespace {

Database load_cities() {
  return parse_database_text(read_file(testsupport::fixture_path("cities.db")));
}

Update load_update(const Database& base, const std::string& script_name) {
  return build_update(
      base, parse_update_script(read_file(testsupport::fixture_path(script_name))));
}

Signature with_b(const Database& base) {
  Signature sig = base.structure.signature();
  sig.add({"b", 0});
  return sig;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

TEST_CASE(
    "criterion 1: bundled update scripts replay with exact accept/reject verdicts") {
  auto t0 = Clock::now();
  Database base = load_cities();

  Update extend = load_update(base, "extend.upd");
  CHECK(extend.steps() == 1);
  CHECK(extend.warnings().empty());
  CHECK(extend.final_database().structure.constant("b") == "e_a");

  Update chain = load_update(base, "extend_chain.upd");
  CHECK(chain.steps() == 2);
  CHECK(chain.warnings().empty());
  CHECK(chain.final_database().structure.domain().size() == 4);
  CHECK(chain.final_database().structure.relation("E").count({"e_b"}) == 1);

  Update retract = load_update(base, "retract.upd");
  CHECK(retract.steps() == 3);
  REQUIRE(retract.warnings().size() == 3);
  CHECK(retract.warnings()[0].step == 1);
  REQUIRE(retract.warnings()[0].unsatisfied.size() == 1);
  CHECK(to_string(retract.warnings()[0].unsatisfied[0]) == "C(s)");
  CHECK(retract.final_database().structure.domain().size() == 2);

  Update roundtrip = load_update(base, "roundtrip.upd");
  CHECK(roundtrip.steps() == 4);
  REQUIRE(roundtrip.warnings().size() == 1);
  CHECK(roundtrip.warnings()[0].step == 4);
  REQUIRE(roundtrip.warnings()[0].unsatisfied.size() == 1);
  CHECK(to_string(roundtrip.warnings()[0].unsatisfied[0]) ==
        "forall x. (C(x) | E(x))");
  CHECK(roundtrip.final_database().structure.constant("b") == "e_b");
  CHECK(roundtrip.final_database().structure.domain().size() == 4);

  try {
    load_update(base, "reject_fresh.upd");
    FAIL("reject_fresh.upd must not apply");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::theory_violation);
    CHECK(e.step() == 1);
  }
  try {
    load_update(base, "retract_early_drop.upd");
    FAIL("retract_early_drop.upd must not apply");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::dangling_element);
    CHECK(e.step() == 2);
  }

  CHECK(seconds_since(t0) < 1.0);
}

TEST_CASE("criterion 2: worked-example metrics reproduce their exact rational values") {
  Database base = load_cities();
  Signature sig = with_b(base);
  auto f = [&](const char* text) { return parse_sentence(text, sig); };
  EntailmentOptions opts;

  Update single = build_update(base, {});
  Update extend = load_update(base, "extend.upd");
  Update retract = load_update(base, "retract.upd");
  Update roundtrip = load_update(base, "roundtrip.upd");

  // coherency of sentences across the bundled updates
  CHECK(coherency(single, f("C(s)")).value == Rational(1));
  CHECK(coherency(single, f("E(s)")).value == Rational(0));
  CHECK(coherency(extend, f("E(b)")).value == Rational(2, 3));
  CHECK(coherency(extend, f("H(l,b)")).value == Rational(2, 3));
  CHECK(coherency(extend, f("b = a")).value == Rational(2, 3));
  CHECK(coherency(retract, f("E(a)")).value == Rational(1));
  CHECK(coherency(retract, f("E(s)")).value == Rational(2, 3));
  CHECK(coherency(retract, f("C(s)")).value == Rational(0));
  CHECK(coherency(roundtrip, f("~E(b)")).value == Rational(1, 3));

  // relevancy and informativity, proposition and deduction forms
  CHECK(informativity(extend, f("E(b)"), opts) == Rational(2, 3));
  CHECK(informativity(single, f("C(s)"), opts) == Rational(0));
  CHECK(informativity(single, f("forall x. (C(x) | E(x))"), opts) == Rational(0));
  Deduction mixed = Deduction::make({f("E(b)"), f("forall x. (C(x) | E(x))")},
                                    f("exists x. E(x)"));
  CHECK(relevancy(extend, mixed, opts) == Rational(1, 2));
  CHECK(informativity(extend, mixed, opts) == Rational(1, 2));

  // the four documented values this artifact deliberately computes differently:
  // each must equal the derived value, never drift back or away
  CHECK(coherency(retract, f("~H(s,a)")).value == Rational(2, 3));
  CHECK(coherency(retract, f("E(s) & ~H(s,a)")).value == Rational(2, 3));
  CHECK(informativity(roundtrip, f("~E(b)"), opts) == Rational(1, 3));
  CHECK(informativity(roundtrip,
                      f("(forall x. (C(x) -> ~E(x)) & C(b)) -> ~E(b)"), opts) ==
        Rational(2, 3));
}

TEST_CASE("criterion 3: every documented-value deviation is flagged, traced, and pinned") {
  FixtureReport report = run_fixture_suite(EntailmentOptions{});
  CHECK(report.ok());
  CHECK(report.rows.size() == 49);
  CHECK(report.deviations() == 4);

  const std::map<std::string, std::string> pinned = {
      {"coherency/retract-not-Hsa", "2/3"},
      {"coherency/retract-Es-and-not-Hsa", "2/3"},
      {"informativity/prop-not-Eb", "1/3"},
      {"informativity/conditional-fresh", "2/3"},
  };
  int deviations_seen = 0;
  for (const auto& row : report.rows) {
    auto it = pinned.find(row.id);
    if (it == pinned.end()) {
      INFO("row " << row.id << ": " << row.note);
      CHECK(row.status == FixtureRow::Status::match);
      continue;
    }
    ++deviations_seen;
    INFO("deviation row " << row.id);
    CHECK(row.status == FixtureRow::Status::deviation);
    CHECK(row.computed == it->second);           // drift = mismatch = failure
    CHECK_FALSE(row.trace.empty());              // must carry a reference trace
    CHECK(row.note.find("pinned") != std::string::npos);
  }
  CHECK(deviations_seen == 4);
}

TEST_CASE("criterion 4: in-language tautologies are maximally coherent and uninformative") {
  testgen::Rng rng(20260825);
  int cases = 0;
  for (int i = 0; i < 200; ++i) {
    Database db = testgen::random_correct_database(rng, 3, 4);
    FormulaPtr any = testgen::random_sentence(rng, db.structure.signature(), 2);
    FormulaPtr taut = disjunction(any, negation(any));
    Update u = testgen::random_update(rng, db, 3);
    INFO("case " << i << ": " << to_string(taut) << " under "
                 << u.steps() << " step(s)");
    CoherencyResult h = coherency(u, taut);
    CHECK(h.value == Rational(1));
    REQUIRE(h.first_true.has_value());
    CHECK(*h.first_true == 1);
    CHECK(informativity(u, taut) == Rational(0));
    ++cases;
  }
  CHECK(cases == 200);
}

TEST_CASE("criterion 5: relevancy vanishes exactly where it should, and fresh symbols restore it") {
  Database base = load_cities();
  Signature sig = with_b(base);
  auto f = [&](const char* text) { return parse_sentence(text, sig); };
  EntailmentOptions opts;
  Update single = build_update(base, {});

  // no premises: nothing can be relevant
  CHECK(relevancy(single, Deduction::make({}, f("C(s)")), opts) == Rational(0));

  // premises drawn from the theory itself: all filtered as consequences
  CHECK(relevancy(single, Deduction::make(base.theory, f("C(s)")), opts) ==
        Rational(0));

  // valid in-language deductions, folded into conditionals, stay uninformative
  // under arbitrary updates
  testgen::Rng rng(50505);
  int conditionals = 0, update_checks = 0;
  while (conditionals < 50) {
    Database db = testgen::random_correct_database(rng, 3, 4);
    if (db.theory.empty()) continue;
    FormulaPtr conclusion = rng.choose(db.theory);
    FormulaPtr antecedent = db.theory.front();
    for (std::size_t k = 1; k < db.theory.size(); ++k)
      antecedent = conjunction(antecedent, db.theory[k]);
    FormulaPtr conditional = implication(antecedent, conclusion);
    for (int r = 0; r < 10; ++r) {
      Update u = testgen::random_update(rng, db, 2);
      INFO("conditional " << conditionals << ", update " << r << ": "
                          << to_string(conditional));
      CHECK(informativity(u, conditional) == Rational(0));
      ++update_checks;
    }
    ++conditionals;
  }
  CHECK(conditionals == 50);
  CHECK(update_checks == 500);

  // the same conditional shape over a symbol the base database lacks is
  // informative once a planned update introduces the symbol
  FormulaPtr fresh_taut = f("E(b) -> E(b)");
  PlanResult pr = plan_coherent_update(base, fresh_taut);
  REQUIRE(pr.plan.has_value());
  CHECK(pr.plan->steps_used == 1);
  Rational informative = informativity(pr.plan->update, fresh_taut, opts);
  CHECK(informative == Rational(2, 3));
  CHECK(informative > Rational(0));
}

TEST_CASE("criterion 6: production semantics agree with three independent oracles on 500 instances") {
  auto t0 = Clock::now();
  int instances = 0;

  // 300 satisfaction checks against the relational-algebra evaluator
  {
    testgen::Rng rng(60606);
    for (int i = 0; i < 300; ++i) {
      Signature sig = testgen::random_signature(rng);
      FiniteStructure s = testgen::random_structure(rng, sig, 3);
      FormulaPtr f = testgen::random_sentence(rng, sig, 4);
      INFO("satisfaction case " << i << ": " << to_string(f));
      CHECK(satisfies(s, f) == oracle::oracle_satisfies(s, f));
      ++instances;
    }
  }

  // 100 propositional entailments against the truth-table oracle (with at
  // most three constants every valuation is realizable within the bound, so
  // the bounded verdict is the exact one)
  {
    testgen::Rng rng(70707);
    for (int i = 0; i < 100; ++i) {
      Signature sig = testgen::random_signature(rng);
      std::vector<FormulaPtr> theory;
      for (int t = rng.pick(0, 2); t > 0; --t)
        theory.push_back(testgen::random_propositional_sentence(rng, sig, 3));
      FormulaPtr goal = testgen::random_propositional_sentence(rng, sig, 3);
      INFO("truth-table case " << i << ": goal " << to_string(goal));
      CHECK(entails_bounded(theory, goal).entailed() ==
            oracle::tt_entails(theory, goal));
      ++instances;
    }
  }

  // 100 first-order entailments at bound 2 against the naive enumerator
  {
    testgen::Rng rng(80808);
    for (int i = 0; i < 100; ++i) {
      Signature sig = testgen::random_signature(rng);
      std::vector<FormulaPtr> theory;
      for (int t = rng.pick(0, 2); t > 0; --t)
        theory.push_back(testgen::random_sentence(rng, sig, 3));
      FormulaPtr goal = testgen::random_sentence(rng, sig, 3);
      INFO("enumerator case " << i << ": goal " << to_string(goal));
      EntailmentVerdict fast = entails_bounded(theory, goal, {.max_domain = 2});
      oracle::NaiveVerdict naive = oracle::naive_entails(theory, goal, 2);
      CHECK(fast.entailed() == naive.entailed);
      ++instances;
    }
  }

  CHECK(instances == 500);
  CHECK(seconds_since(t0) < 300.0);
}

TEST_CASE("criterion 7: planner output is minimal against exhaustive search and deterministic") {
  testgen::Rng rng(90909);
  int pairs = 0, reachable = 0;
  for (int i = 0; i < 50; ++i) {
    Database db = testgen::random_correct_database(rng, 2, 1);
    FormulaPtr target = testgen::random_sentence(rng, db.structure.signature(), 2);
    INFO("pair " << i << ": " << to_string(target) << " over "
                 << save_database_text(db));
    std::optional<int> brute = oracle::exhaustive_min_steps(db, target, 2, 1);
    PlanBounds bounds{.max_steps = 2, .max_fresh_elements = 1};
    PlanResult r = plan_coherent_update(db, target, bounds);
    if (r.plan) {
      REQUIRE(brute.has_value());
      CHECK(r.plan->steps_used == *brute);  // never longer than optimal
      // byte-identical rerun
      PlanResult again = plan_coherent_update(db, target, bounds);
      REQUIRE(again.plan.has_value());
      CHECK(save_update_script(again.plan->update.ops()) ==
            save_update_script(r.plan->update.ops()));
      ++reachable;
    } else {
      // whatever the planner cannot reach, exhaustive search cannot either
      CHECK_FALSE(brute.has_value());
    }
    ++pairs;
  }
  CHECK(pairs == 50);
  CHECK(reachable > 10);  // the sample genuinely exercises the search

  // ranking the bundled candidate list twice gives identical output
  Database base = load_cities();
  std::vector<Deduction> candidates = parse_deductions(
      read_file(testsupport::fixture_path("deductions.txt")), with_b(base));
  auto first = rank_deductions(base, candidates);
  auto second = rank_deductions(base, candidates);
  REQUIRE(first.size() == second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(deduction_to_string(first[i].deduction) ==
          deduction_to_string(second[i].deduction));
    CHECK(first[i].informativity_value == second[i].informativity_value);
    REQUIRE(first[i].plan.has_value());
    REQUIRE(second[i].plan.has_value());
    CHECK(save_update_script(first[i].plan->update.ops()) ==
          save_update_script(second[i].plan->update.ops()));
  }
}

namespace {

class CriterionLines : public Catch::EventListenerBase {
 public:
  using Catch::EventListenerBase::EventListenerBase;
  void testCaseEnded(const Catch::TestCaseStats& stats) override {
    bool ok = stats.totals.assertions.failed == 0;
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << stats.testInfo->name << "\n"
              << std::flush;
  }
};

}  // namespace

CATCH_REGISTER_LISTENER(CriterionLines)
