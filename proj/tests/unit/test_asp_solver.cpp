#include "doctest.h"

#include "propositional_oracle.hpp"
#include "spasp/asp/parser.hpp"
#include "spasp/asp/safety.hpp"
#include "spasp/asp/solver.hpp"

#include <algorithm>
#include <map>
#include <random>

using namespace spasp::asp;

namespace {

std::vector<std::string> atoms_of(const SolverOutcome& outcome) {
  REQUIRE_MESSAGE(outcome.has_model(), outcome.message());
  std::vector<std::string> out;
  for (const auto& a : outcome.model().atoms) out.push_back(to_string(a));
  return out;
}

const char* kQuantifierRule =
    "query(Block):- block(Block), not object(_, _, black, _, OtherBlock): block(OtherBlock), "
    "OtherBlock != Block.\n";

}  // namespace

TEST_CASE("definite program") {
  CHECK(atoms_of(evaluate("a. b :- a.")) == std::vector<std::string>{"a", "b"});
}

TEST_CASE("violated constraint is unsat") {
  SolverOutcome o = evaluate("a.\n:- a.");
  CHECK(o.kind() == OutcomeKind::unsatisfiable);
  CHECK(o.message() == "UNSAT: integrity constraint violated ':- a.' @ 2:1");
}

TEST_CASE("quantifier scene: only one block lacks black objects elsewhere") {
  // A black object sits only in block a, so "no black object in any other
  // block" holds for a alone.
  std::string text =
      "block(a). block(b).\n"
      "object(o1,small,black,circle,a). object(o2,big,black,square,a).\n";
  text += kQuantifierRule;
  SolverOutcome o = evaluate(text);
  REQUIRE(o.has_model());
  CHECK(extract_answers(o.model(), "query") == AnswerSet{{Value::symbol("a")}});
}

TEST_CASE("quantifier scene with black objects in both blocks has no answer") {
  std::string text =
      "block(a). block(b).\n"
      "object(o1,small,black,circle,a). object(o2,big,black,square,b).\n";
  text += kQuantifierRule;
  SolverOutcome o = evaluate(text);
  REQUIRE(o.has_model());
  CHECK(extract_answers(o.model(), "query").empty());
}

TEST_CASE("negative cycle is reported with its path") {
  SolverOutcome o = evaluate("p :- not q.\nq :- not p.");
  REQUIRE(o.kind() == OutcomeKind::unstratifiable);
  const auto& u = std::get<Unstratifiable>(o.value);
  CHECK(u.cycle.find("-not->") != std::string::npos);
  CHECK((u.cycle == "p/0 -not-> q/0 -not-> p/0" || u.cycle == "q/0 -not-> p/0 -not-> q/0"));
}

TEST_CASE("negation through a positive loop is unstratifiable") {
  SolverOutcome o = evaluate("s(1).\np(X) :- s(X), not q(X).\nq(X) :- p(X).");
  REQUIRE(o.kind() == OutcomeKind::unstratifiable);
}

TEST_CASE("positive recursion is fine") {
  SolverOutcome o = evaluate("e(1,2). e(2,3). r(X,Y) :- e(X,Y). r(X,Z) :- r(X,Y), e(Y,Z).");
  CHECK(extract_answers(o.model(), "r") ==
        AnswerSet{{Value::integer(1), Value::integer(2)},
                  {Value::integer(1), Value::integer(3)},
                  {Value::integer(2), Value::integer(3)}});
}

TEST_CASE("answers are sorted tuples") {
  SolverOutcome o = evaluate("answer(top). answer(right).");
  CHECK(extract_answers(o.model(), "answer") ==
        AnswerSet{{Value::symbol("right")}, {Value::symbol("top")}});
  CHECK(extract_answers(o.model(), "missing").empty());
}

TEST_CASE("integers order before symbols before strings") {
  SolverOutcome o = evaluate("v(\"s\"). v(b). v(3). v(-1).");
  CHECK(atoms_of(o) == std::vector<std::string>{"v(-1)", "v(3)", "v(b)", "v(\"s\")"});
}

TEST_CASE("outcome kinds cover every stage") {
  CHECK(evaluate("p(").kind() == OutcomeKind::parse_error);
  CHECK(evaluate("p(X).").kind() == OutcomeKind::unsafe_variable);
  CHECK(evaluate("p(a+1).").kind() == OutcomeKind::ground_error);
}

// Property: on stratified propositional programs the solver agrees with
// brute-force enumeration of stable models (exactly one or none).
TEST_CASE("agrees with brute-force stable model enumeration") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 500; ++i) {
    auto prop = spasp::testing::random_stratified_program(rng);
    auto expected = spasp::testing::brute_force_stable_models(prop);
    REQUIRE(expected.size() <= 1);
    std::string text = prop.to_text();
    SolverOutcome o = evaluate(text);
    if (expected.empty()) {
      CHECK_MESSAGE(o.kind() == OutcomeKind::unsatisfiable, text);
      continue;
    }
    REQUIRE_MESSAGE(o.has_model(), text << o.message());
    std::uint32_t mask = 0;
    for (const auto& a : o.model().atoms) mask |= 1u << std::stoi(a.predicate.substr(1));
    CHECK_MESSAGE(mask == expected.front(), text);
  }
}

// Property: no atom derived in stratum i appears negated in a rule whose head
// lies in a stratum j < i.
TEST_CASE("strata are evaluated bottom-up") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 200; ++i) {
    auto prop = spasp::testing::random_stratified_program(rng);
    auto parsed = parse_program(prop.to_text());
    REQUIRE(std::holds_alternative<Program>(parsed));
    auto g = ground(std::get<Program>(parsed));
    REQUIRE(std::holds_alternative<GroundProgram>(g));
    const auto& gp = std::get<GroundProgram>(g);
    SolveStats stats;
    solve(gp, &stats);
    std::map<std::string, std::size_t> stratum_of;
    for (std::size_t s = 0; s < stats.strata.size(); ++s)
      for (const auto& sig : stats.strata[s]) stratum_of[sig.name] = s;
    for (const auto& rule : gp.rules) {
      if (!rule.head) continue;
      std::size_t head_stratum = stratum_of.at(gp.atoms[*rule.head].predicate);
      for (AtomId n : rule.negative) CHECK(stratum_of.at(gp.atoms[n].predicate) < head_stratum);
      for (AtomId p : rule.positive) CHECK(stratum_of.at(gp.atoms[p].predicate) <= head_stratum);
    }
  }
}

TEST_CASE("repeated evaluation is deterministic") {
  std::string text = "block(a). block(b). block(c).\n"
                     "object(o1,small,black,circle,c).\n";
  text += kQuantifierRule;
  SolverOutcome first = evaluate(text);
  for (int i = 0; i < 5; ++i) CHECK(atoms_of(evaluate(text)) == atoms_of(first));
}

TEST_CASE("parallel batch matches the serial reference") {
  std::mt19937_64 rng(5);
  std::vector<std::string> programs;
  for (int i = 0; i < 300; ++i) programs.push_back(spasp::testing::random_stratified_program(rng).to_text());
  programs.push_back("p :- not q.\nq :- not p.");
  programs.push_back("p(");
  auto serial = evaluate_batch_serial(programs);
  auto parallel = evaluate_batch(programs, {}, 4);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].kind() == parallel[i].kind());
    CHECK(serial[i].message() == parallel[i].message());
    if (serial[i].has_model()) CHECK(serial[i].model().atoms == parallel[i].model().atoms);
  }
}
