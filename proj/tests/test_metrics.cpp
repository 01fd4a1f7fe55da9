#include <catch2/catch_amalgamated.hpp>

#include "siminf/siminf.hpp"
#include "support/common.hpp"
#include "support/generators.hpp"

using namespace siminf;
using testsupport::cities_formula;

namespace {

Rational frac(long long n, long long d) { return Rational(n, d); }

Deduction ded(std::initializer_list<const char*> premises, const char* conclusion,
              bool with_b = true) {
  std::vector<FormulaPtr> ps;
  for (const char* p : premises) ps.push_back(cities_formula(p, with_b));
  return Deduction::make(std::move(ps), cities_formula(conclusion, with_b));
}

}  // namespace

TEST_CASE("the coherency closed form matches the literal weighted sum") {
  // value = m / (1 + 2 + ... + m): the closed form divides out to 2/(m+1)
  for (long long m = 1; m <= 12; ++m) {
    Rational literal(m, m * (m + 1) / 2);
    CHECK(frac(2, m + 1) == literal);
  }
}

TEST_CASE("coherency of the worked updates") {
  auto H = [](const Update& u, const FormulaPtr& f) { return coherency(u, f); };

  SECTION("no update: sentences true in the base get full marks") {
    Update u = fixtures::single_update();
    CHECK(H(u, cities_formula("C(s)")).value == frac(1, 1));
    CHECK(H(u, cities_formula("C(s)")).first_true == 1);
    CHECK(H(u, cities_formula("E(s)")).value == frac(0, 1));
    CHECK_FALSE(H(u, cities_formula("E(s)")).coherent);
  }
  SECTION("one-step extension: new names arrive at the second database") {
    Update u = fixtures::extend_update();
    for (const char* text : {"E(b)", "H(l,b)", "E(b) & H(l,b)", "b = a"}) {
      INFO(text);
      CoherencyResult r = H(u, cities_formula(text, true));
      CHECK(r.value == frac(2, 3));
      CHECK(r.first_true == 2);
      CHECK(r.coherent);
    }
    // sentences already true at the base keep m = 1 through the update
    CHECK(H(u, cities_formula("C(s)")).value == frac(1, 1));
  }
  SECTION("repointing s at step one already flips the s-facts") {
    Update u = fixtures::retract_update();
    // after step 1 the constant s names the exurb: E(s) and ~H(s,a) hold at
    // the second database, well before the later record deletions
    CHECK(H(u, cities_formula("~H(s,a)")).value == frac(2, 3));
    CHECK(H(u, cities_formula("~H(s,a)")).first_true == 2);
    CHECK(H(u, cities_formula("E(s) & ~H(s,a)")).value == frac(2, 3));
    CHECK(H(u, cities_formula("E(s)")).value == frac(2, 3));
    CHECK(H(u, cities_formula("E(s)")).first_true == 2);
    // still true everywhere
    CHECK(H(u, cities_formula("E(a)")).value == frac(1, 1));
    // true at the base, false at the end: incoherent
    CHECK(H(u, cities_formula("C(s)")).value == frac(0, 1));
    CHECK_FALSE(H(u, cities_formula("C(s)")).first_true.has_value());
  }
  SECTION("the roundtrip makes the withdrawn negation true only at the end") {
    Update u = fixtures::roundtrip_update();
    CoherencyResult r = H(u, cities_formula("~E(b)", true));
    CHECK(r.value == frac(1, 3));  // m = 5 of 5 databases
    CHECK(r.first_true == 5);
  }
  SECTION("non-sentences are rejected") {
    Update u = fixtures::single_update();
    FormulaPtr open = parse_formula("C(x)", u.base().structure.signature());
    try {
      coherency(u, open);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::precondition);
    }
  }
}

TEST_CASE("relevant premises separate news from theory consequences") {
  SECTION("single-sentence deduction over the extension") {
    Update u = fixtures::extend_update();
    Deduction d = ded({"E(b)"}, "E(b)");
    RelevantPremisesResult r = relevant_premises(u, d);
    REQUIRE(r.defined);
    REQUIRE(r.premises.size() == 1);
    CHECK(to_string(r.premises[0]) == "E(b)");
    CHECK(relevancy(u, d) == frac(1, 1));
    CHECK(informativity(u, d) == frac(2, 3));
  }
  SECTION("theory members are never relevant") {
    Update u = fixtures::extend_update();
    Deduction d = ded({"C(s)", "E(b)"}, "C(s) & E(b)");
    RelevantPremisesResult r = relevant_premises(u, d);
    REQUIRE(r.defined);
    REQUIRE(r.premises.size() == 1);
    CHECK(to_string(r.premises[0]) == "E(b)");
    CHECK(relevancy(u, d) == frac(1, 2));
  }
  SECTION("incoherent conclusions leave the premise set undefined") {
    Update u = fixtures::single_update();
    Deduction d = ded({"C(s)"}, "E(s)", false);
    CHECK_FALSE(relevant_premises(u, d).defined);
    CHECK(relevancy(u, d) == frac(0, 1));
    CHECK(informativity(u, d) == frac(0, 1));
  }
}

TEST_CASE("relevancy counts the relevant fraction of the premise set") {
  Update u = fixtures::roundtrip_update();
  //   premises: C(a) | E(a)  — consequence of the theory, not relevant
  //             ~E(b)        — true at the end, not a consequence: relevant
  Deduction d = ded({"C(a) | E(a)", "~E(b)"}, "~E(b)");
  RelevantPremisesResult r = relevant_premises(u, d);
  REQUIRE(r.defined);
  REQUIRE(r.premises.size() == 1);
  CHECK(to_string(r.premises[0]) == "~E(b)");
  CHECK(relevancy(u, d) == frac(1, 2));
  CHECK(informativity(u, d) == frac(1, 6));  // 1/2 * 1/3

  SECTION("empty premise sets have null relevancy by convention") {
    Deduction empty = Deduction::make({}, cities_formula("E(a)"));
    CHECK(relevancy(fixtures::single_update(), empty) == frac(0, 1));
    CHECK(informativity(fixtures::single_update(), empty) == frac(0, 1));
  }
  SECTION("premises false at the final database are not relevant") {
    Deduction d2 = ded({"E(b)", "~E(b)"}, "~E(b)");
    RelevantPremisesResult r2 = relevant_premises(u, d2);
    REQUIRE(r2.defined);
    REQUIRE(r2.premises.size() == 1);
    CHECK(to_string(r2.premises[0]) == "~E(b)");
    CHECK(relevancy(u, d2) == frac(1, 2));
  }
}

TEST_CASE("single-sentence informativity values from the worked examples") {
  CHECK(informativity(fixtures::extend_update(), cities_formula("E(b)", true)) ==
        frac(2, 3));
  CHECK(informativity(fixtures::roundtrip_update(), cities_formula("~E(b)", true)) ==
        frac(1, 3));
  CHECK(informativity(fixtures::retract_update(), cities_formula("E(s) & ~H(s,a)")) ==
        frac(2, 3));

  SECTION("theory consequences carry no information") {
    CHECK(informativity(fixtures::extend_update(), cities_formula("C(s)")) ==
          frac(0, 1));
    CHECK(informativity(fixtures::extend_update(), cities_formula("C(l) | E(l)")) ==
          frac(0, 1));
  }
  SECTION("in-language tautologies carry no information") {
    CHECK(informativity(fixtures::single_update(), cities_formula("E(a) -> E(a)")) ==
          frac(0, 1));
    CHECK(informativity(fixtures::extend_update(), cities_formula("forall x. x = x")) ==
          frac(0, 1));
  }
  SECTION("tautologies over fresh symbols do carry information") {
    // the language gate keeps E(b) -> E(b) from counting as a consequence at
    // the base, and the extension makes it true from step 2 on… but it is a
    // tautology, so it is true wherever its symbols exist — m = 2
    Update u = fixtures::extend_update();
    CHECK(informativity(u, cities_formula("E(b) -> E(b)", true)) == frac(2, 3));
  }
}

TEST_CASE("newness requires non-falsification and non-consequence") {
  Database base = fixtures::cities();
  Signature with_b = fixtures::cities_signature_with_b();

  CHECK(is_new(base, parse_formula("E(b)", with_b)));        // outside language
  CHECK(is_new(base, parse_formula("E(s)", with_b)) == false);  // falsified
  CHECK(is_new(base, parse_formula("C(s)", with_b)) == false);  // consequence
  CHECK(is_new(base, parse_formula("E(a)", with_b)));  // true but not entailed
  CHECK(is_new(base, parse_formula("E(b) -> E(b)", with_b)));  // gated tautology
  CHECK(is_new(base, parse_formula("E(a) -> E(a)", with_b)) == false);
}

TEST_CASE("produced results") {
  SECTION("relevant premises plus a new conclusion") {
    Update u = fixtures::extend_update();
    // E(b) & C(s) mentions b, so the base neither falsifies nor entails it: new
    Deduction d = ded({"E(b)", "C(s)"}, "E(b) & C(s)");
    auto results = produced_results(u, d);
    std::vector<std::string> texts;
    for (const auto& f : results) texts.push_back(to_string(f));
    CHECK(texts == std::vector<std::string>{"E(b)", "E(b) & C(s)"});
  }
  SECTION("a conclusion falsified at the base is not new") {
    Update u = fixtures::extend_chain_update();
    // two distinct exurbs exist at the end, but the base said otherwise
    Deduction d = ded({"E(b)"}, "exists x. (E(x) & ~(x = a))");
    auto results = produced_results(u, d);
    REQUIRE(results.size() == 1);
    CHECK(to_string(results[0]) == "E(b)");
  }
  SECTION("a conclusion that is itself a premise is not duplicated") {
    Update u = fixtures::extend_update();
    Deduction d = ded({"E(b)"}, "E(b)");
    auto results = produced_results(u, d);
    REQUIRE(results.size() == 1);
    CHECK(to_string(results[0]) == "E(b)");
  }
  SECTION("an old conclusion adds nothing beyond the relevant premises") {
    Update u = fixtures::extend_update();
    // conclusion C(s) is entailed by the theory: not new
    Deduction d = ded({"E(b)"}, "C(s)");
    auto results = produced_results(u, d);
    REQUIRE(results.size() == 1);
    CHECK(to_string(results[0]) == "E(b)");
  }
  SECTION("null relevancy means no results, loudly") {
    Update u = fixtures::single_update();
    Deduction d = ded({"C(s)"}, "C(s)", false);  // premise is a theory member
    try {
      produced_results(u, d);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::precondition);
    }
  }
}

TEST_CASE("informativity is the product of its factors and stays in [0,1]") {
  testgen::Rng rng(5522);
  int nonzero = 0;
  for (int i = 0; i < 60; ++i) {
    Database db = testgen::random_correct_database(rng, 3, 2);
    Update u = testgen::random_update(rng, db, 2);
    std::vector<FormulaPtr> premises;
    for (int p = rng.pick(1, 3); p > 0; --p)
      premises.push_back(testgen::random_sentence(rng, db.structure.signature(), 3));
    Deduction d = Deduction::make(
        premises, testgen::random_sentence(rng, db.structure.signature(), 3));
    Rational r = relevancy(u, d);
    Rational h = coherency(u, d.conclusion).value;
    Rational i_val = informativity(u, d);
    INFO("case " << i << ": concl " << to_string(d.conclusion));
    CHECK(i_val == r * h);
    CHECK(r >= Rational(0));
    CHECK(r <= Rational(1));
    CHECK(h >= Rational(0));
    CHECK(h <= Rational(1));
    CHECK(i_val <= r);
    CHECK(i_val <= h);
    if (i_val > Rational(0)) ++nonzero;
  }
  CHECK(nonzero > 3);  // the corpus is not degenerate
}

TEST_CASE("tautologies in the base language are maximally coherent, never informative") {
  testgen::Rng rng(9944);
  for (int i = 0; i < 25; ++i) {
    Database db = testgen::random_correct_database(rng, 3, 2);
    // build an in-language tautology from a random sentence
    FormulaPtr any = testgen::random_sentence(rng, db.structure.signature(), 2);
    FormulaPtr taut = disjunction(any, negation(any));
    Update u = testgen::random_update(rng, db, 2);
    INFO("case " << i << ": " << to_string(taut));
    CHECK(coherency(u, taut).value == frac(1, 1));
    CHECK(informativity(u, taut) == frac(0, 1));
  }
}
