#include "doctest.h"

#include "spasp/asp/safety.hpp"
#include "spasp/asp/solver.hpp"
#include "spasp/spatial/knowledge.hpp"
#include "spasp/spatial/relation.hpp"
#include "spasp/spatial/stepgame_synth.hpp"
#include "spasp/spatial/synonyms.hpp"

#include <cstdlib>
#include <map>
#include <random>
#include <set>

using namespace spasp;
using namespace spasp::spatial;

namespace {

asp::SolverOutcome with_knowledge(const std::string& facts, Dataset dataset,
                                  std::int64_t bound = 100) {
  std::string text = facts + "\n" + std::string(knowledge_text(dataset));
  return asp::evaluate(text, asp::GroundOptions{bound, 1'000'000});
}

std::vector<std::string> stepgame_answers(const std::string& facts, std::int64_t bound = 100) {
  auto outcome = with_knowledge(facts, Dataset::stepgame, bound);
  REQUIRE_MESSAGE(outcome.has_model(), outcome.message());
  std::vector<std::string> out;
  for (const auto& tuple : asp::extract_answers(outcome.model(), "answer")) {
    auto rel = parse_step_relation(tuple.at(0).text);
    REQUIRE(rel);
    out.emplace_back(label(*rel));
  }
  return out;
}

}  // namespace

TEST_CASE("offsets follow the east/north axis convention") {
  CHECK(to_offset(StepRelation::top) == Offset{0, 1});
  CHECK(to_offset(StepRelation::left) == Offset{-1, 0});
  CHECK(from_offset(0, 0) == StepRelation::overlap);
  // sign(3) = 1, sign(-2) = -1 -> (1,-1)
  CHECK(from_offset(3, -2) == StepRelation::down_right);
  CHECK(label(StepRelation::down_right) == "down-right");
  CHECK(asp_constant(StepRelation::down_right) == "down_right");
}

TEST_CASE("relation_offset is a bijection") {
  std::set<Offset> seen;
  for (auto rel : kStepRelations) {
    Offset o = to_offset(rel);
    CHECK(std::abs(o.dx) <= 1);
    CHECK(std::abs(o.dy) <= 1);
    CHECK(from_offset(o.dx, o.dy) == rel);
    CHECK(parse_step_relation(label(rel)) == rel);
    CHECK(parse_step_relation(asp_constant(rel)) == rel);
    CHECK(inverse(inverse(rel)) == rel);
    seen.insert(o);
  }
  CHECK(seen.size() == 9);
  CHECK(kSparqaRelations.size() == 8);
}

TEST_CASE("knowledge programs are safe") {
  CHECK_FALSE(asp::check_safety(stepgame_knowledge()));
  CHECK_FALSE(asp::check_safety(sparqa_knowledge()));
  CHECK(with_knowledge("", Dataset::stepgame).has_model());
  CHECK(with_knowledge("", Dataset::sparqa).has_model());
}

TEST_CASE("stepgame knowledge: two hops to the left") {
  // c = (0,0), b = (-1,0), a = (-2,0)
  CHECK(stepgame_answers("is(a,left,b). is(b,left,c). query(a,c).") ==
        std::vector<std::string>{"left"});
}

TEST_CASE("stepgame knowledge: one hop is the stated relation") {
  for (auto rel : kStepRelations) {
    std::string facts = "is(a," + std::string(asp_constant(rel)) + ",b). query(a,b).";
    CHECK(stepgame_answers(facts) == std::vector<std::string>{std::string(label(rel))});
  }
}

TEST_CASE("stepgame knowledge: link through a shared anchor") {
  // c = (0,0), a = (1,0), b = (1,-1)
  CHECK(stepgame_answers("is(a,top,b). is(a,right,c). query(b,c).") ==
        std::vector<std::string>{"down-right"});
}

TEST_CASE("stepgame knowledge: disconnected endpoints give no answer") {
  CHECK(stepgame_answers("is(a,left,b). is(c,top,d). query(a,d).").empty());
}

TEST_CASE("stepgame knowledge recovers every synthetic story") {
  auto stories = synth_stepgame(1, 10, 30, 11);
  for (const auto& story : stories) {
    auto answers = stepgame_answers(story.facts, story.hops + 1);
    CHECK_MESSAGE(answers == std::vector<std::string>{std::string(label(story.answer))},
                  story.id << "\n" << story.facts);
  }
}

TEST_CASE("synthetic stories are reproducible") {
  auto a = synth_stepgame(3, 3, 5, 42);
  auto b = synth_stepgame(3, 3, 5, 42);
  REQUIRE(a.size() == 5);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].facts == b[i].facts);
    CHECK(a[i].sentences == b[i].sentences);
    CHECK(a[i].sentences.size() == 3);
  }
}

namespace {

std::set<std::string> is_atoms(const std::string& facts) {
  auto outcome = with_knowledge(facts, Dataset::sparqa);
  REQUIRE_MESSAGE(outcome.has_model(), outcome.message());
  std::set<std::string> out;
  for (const auto& t : asp::extract_answers(outcome.model(), "is")) {
    out.insert(t[0].text + " " + t[1].text + " " + t[2].text);
  }
  return out;
}

}  // namespace

TEST_CASE("sparqa knowledge: inverse, transitive, lifting") {
  CHECK(is_atoms("is(o1,left,o2).").count("o2 right o1"));
  CHECK(is_atoms("is(o1,left,o2). is(o2,left,o3).").count("o1 left o3"));
  auto lifted = is_atoms(
      "block(a). block(b). is(a,left,b).\n"
      "object(o1,small,black,circle,a). object(o2,big,blue,square,b).");
  CHECK(lifted.count("o1 left o2"));
  CHECK(lifted.count("o2 right o1"));
  // Only directional relations lift.
  auto near = is_atoms(
      "block(a). block(b). is(a,near_to,b).\n"
      "object(o1,small,black,circle,a). object(o2,big,blue,square,b).");
  CHECK_FALSE(near.count("o1 near_to o2"));
  CHECK(near.count("b near_to a"));
}

// Random two-block scenes on a grid. Facts are true statements about the
// geometry; every derived relation must also be true of the geometry.
namespace {

struct Box {
  int x0, x1, y0, y1;
};

bool holds(const std::string& rel, const Box& p, const Box& q) {
  if (rel == "left") return p.x1 < q.x0;
  if (rel == "right") return p.x0 > q.x1;
  if (rel == "above") return p.y0 > q.y1;
  if (rel == "below") return p.y1 < q.y0;
  int dx = std::abs(p.x0 - q.x0);
  int dy = std::abs(p.y0 - q.y0);
  if (rel == "near_to") return dx + dy <= 3;
  if (rel == "far_from") return dx + dy >= 15;
  if (rel == "touching") return std::max(dx, dy) == 1;
  return false;
}

}  // namespace

TEST_CASE("sparqa algebra is sound on random geometric scenes") {
  std::mt19937_64 rng(17);
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  const char* rels[] = {"left", "right", "above", "below", "near_to", "far_from", "touching"};
  for (int scene = 0; scene < 300; ++scene) {
    std::map<std::string, Box> where;
    bool horizontal = pick(2) == 0;
    where["a"] = {0, 9, 0, 9};
    where["b"] = horizontal ? Box{20, 29, 0, 9} : Box{0, 9, -20, -11};
    std::string facts = "block(a). block(b).\n";
    facts += pick(2) ? (horizontal ? "is(a,left,b).\n" : "is(a,above,b).\n")
                     : (horizontal ? "is(b,right,a).\n" : "is(b,below,a).\n");
    int n = 1 + pick(4);
    std::vector<std::string> objects;
    for (int i = 0; i < n; ++i) {
      std::string id = "o" + std::to_string(i);
      std::string blk = pick(2) ? "a" : "b";
      const Box& b = where[blk];
      int x = b.x0 + pick(10);
      int y = b.y0 + pick(10);
      where[id] = {x, x, y, y};
      facts += "object(" + id + ",small,black,circle," + blk + ").\n";
      objects.push_back(id);
    }
    for (const auto& p : objects) {
      for (const auto& q : objects) {
        if (p == q || pick(3) != 0) continue;
        std::vector<std::string> true_rels;
        for (const char* r : rels) {
          if (holds(r, where[p], where[q])) true_rels.push_back(r);
        }
        if (true_rels.empty()) continue;
        facts += "is(" + p + "," + true_rels[static_cast<std::size_t>(pick(static_cast<int>(true_rels.size())))] +
                 "," + q + ").\n";
      }
    }
    for (const auto& atom : is_atoms(facts)) {
      auto s1 = atom.find(' ');
      auto s2 = atom.rfind(' ');
      std::string x = atom.substr(0, s1);
      std::string r = atom.substr(s1 + 1, s2 - s1 - 1);
      std::string y = atom.substr(s2 + 1);
      CHECK_MESSAGE(holds(r, where.at(x), where.at(y)), atom << "\n" << facts);
    }
  }
}

TEST_CASE("left and right are coherent in every model") {
  std::mt19937_64 rng(3);
  const char* rels[] = {"left", "right", "above", "below", "near_to"};
  for (int i = 0; i < 100; ++i) {
    std::string facts;
    for (int k = 0; k < 6; ++k) {
      facts += "is(o" + std::to_string(rng() % 5) + "," + rels[rng() % 5] + ",o" +
               std::to_string(rng() % 5) + ").\n";
    }
    auto atoms = is_atoms(facts);
    for (const auto& a : atoms) {
      auto s1 = a.find(' ');
      auto s2 = a.rfind(' ');
      std::string x = a.substr(0, s1);
      std::string r = a.substr(s1 + 1, s2 - s1 - 1);
      std::string y = a.substr(s2 + 1);
      if (r == "left") CHECK(atoms.count(y + " right " + x));
      if (r == "right") CHECK(atoms.count(y + " left " + x));
    }
  }
}

TEST_CASE("answer normalization") {
  CHECK(normalize_answer("north-east", Dataset::stepgame) == "top-right");
  CHECK(normalize_answer("LEFT ", Dataset::stepgame) == "left");
  CHECK(normalize_answer("upper-left", Dataset::stepgame) == "top-left");
  CHECK(normalize_answer("lower-left", Dataset::stepgame) == "down-left");
  CHECK(normalize_answer("north", Dataset::stepgame) == "top");
  CHECK(normalize_answer("beneath", Dataset::sparqa) == "below");
  CHECK(normalize_answer("near to", Dataset::sparqa) == "near_to");
  CHECK(normalize_answer("DK", Dataset::sparqa) == "dk");
  CHECK(normalize_answer("don't know", Dataset::sparqa) == "dk");
  CHECK(normalize_answer("Block A", Dataset::sparqa) == "a");
  CHECK(normalize_answer("2", Dataset::sparqa) == "2");
  std::string miss = normalize_answer("sideways", Dataset::stepgame);
  CHECK(is_unknown(miss));
  CHECK(miss == "unknown:sideways");
}

TEST_CASE("canonical labels are fixed points of the dictionaries") {
  for (auto dataset : {Dataset::stepgame, Dataset::sparqa}) {
    const auto& dict = SynonymDictionary::builtin(dataset);
    for (const auto& [key, canonical] : dict.entries()) {
      CHECK_MESSAGE(dict.lookup(canonical) == canonical, key);
      CHECK(normalize_answer(canonical, dataset) == canonical);
    }
  }
  for (auto rel : kStepRelations) {
    CHECK(normalize_answer(label(rel), Dataset::stepgame) == label(rel));
    CHECK(normalize_answer(asp_constant(rel), Dataset::stepgame) == label(rel));
  }
  for (auto rel : kSparqaRelations) CHECK(normalize_answer(label(rel), Dataset::sparqa) == label(rel));
}

TEST_CASE("synonym files are validated") {
  auto dict = SynonymDictionary::parse_tsv("# c\nnorth\ttop\n\nup\ttop\n");
  CHECK(dict.lookup("NORTH") == "top");
  CHECK(dict.lookup("top") == "top");
  CHECK_THROWS_WITH(SynonymDictionary::parse_tsv("north top\n"),
                    "synonyms line 1: expected 'token<TAB>canonical'");
}
