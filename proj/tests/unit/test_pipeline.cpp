#include "doctest.h"

#include "spasp/pipeline/pipeline.hpp"
#include "spasp/spatial/stepgame_synth.hpp"

#include <mutex>
#include <random>

using namespace spasp;
using namespace spasp::pipeline;
using eval::Example;
using eval::QType;
using spatial::Dataset;

namespace {

Example stepgame_example(std::string id = "s1") {
  Example ex;
  ex.id = std::move(id);
  ex.dataset = Dataset::stepgame;
  ex.context = "A is to the left of B.";
  ex.question = "What is the relation of the agent A to the agent B?";
  ex.gold = {"left"};
  ex.hop = 1;
  return ex;
}

Example sparqa_example(QType q, std::string id = "q1") {
  Example ex;
  ex.id = std::move(id);
  ex.dataset = Dataset::sparqa;
  ex.qtype = q;
  ex.context = "There are two blocks, A and B. Block A has a black circle. Block B has a black square.";
  ex.question = "Where is the circle relative to the square?";
  if (q == QType::CO) ex.choices = {"the black circle", "the black square", "both of them", "none of them"};
  if (q == QType::FB) ex.choices = {"A", "B"};
  return ex;
}

llm::Gateway mock_gateway(std::vector<std::string> script) {
  return llm::Gateway(std::make_shared<llm::MockBackend>(std::move(script)));
}

struct PromptLog {
  std::mutex mu;
  std::vector<std::string> prompts;
};

}  // namespace

TEST_CASE("classify_outcome is total and follows the outcome kind") {
  using asp::evaluate;
  CHECK(classify_outcome(evaluate("a :- ."), {}) == ErrorClass::parse);
  CHECK(classify_outcome(evaluate("p(X) :- not q(X)."), {}) == ErrorClass::ground);
  CHECK(classify_outcome(evaluate("n(1). m(X+1) :- n(X), top(X). top(a). k(Y) :- top(X), Y = X + 1."), {}) ==
        ErrorClass::ground);
  CHECK(classify_outcome(evaluate("p :- not q. q :- not p."), {}) == ErrorClass::unstratifiable);
  CHECK(classify_outcome(evaluate("a. :- a."), {}) == ErrorClass::unsat);
  auto model = evaluate("a.");
  CHECK(classify_outcome(model, {}) == ErrorClass::no_result);
  CHECK(classify_outcome(model, {{asp::Value::symbol("a")}}) == ErrorClass::none);
  for (std::string_view name : {"parse", "ground", "unstratifiable", "unsat", "no_result", "gateway", "none"}) {
    auto c = parse_error_class(name);
    REQUIRE(c);
    CHECK(to_string(*c) == name);
  }
}

TEST_CASE("sanitize strips fences and prose") {
  CHECK(sanitize_program("```asp\nis(a,left,b).\nquery(a,b).\n```\nThat is all.") == "is(a,left,b).\nquery(a,b).\n");
  CHECK(sanitize_program("Here is the program:\nis(a,left,b).\n\nThis encodes the story.") == "is(a,left,b).\n");
  // Continuation lines of an open rule are kept whatever they start with.
  std::string rule =
      "query(Block) :-\n  block(Block), not object(_, _, black, _, Other) :\n  Other != Block, block(Other).\n";
  CHECK(sanitize_program("Sure.\n" + rule + "Done.") == rule);
  CHECK(sanitize_program("% facts\nis(a,top,b). % a over b\n") == "% facts\nis(a,top,b). % a over b\n");
  // An unterminated last statement survives for the parser to report.
  CHECK(sanitize_program("is(a,left,b)") == "is(a,left,b)\n");
  CHECK(sanitize_program("The answer is left.") == "");
}

TEST_CASE("direct: plain label") {
  auto gw = mock_gateway({"right"});
  auto trace = run_direct(stepgame_example(), gw, {});
  CHECK(trace.answers == std::vector<std::string>{"right"});
  CHECK(trace.gateway_calls == 1);
  CHECK(trace.final_error == ErrorClass::none);
}

TEST_CASE("direct: label embedded in a sentence is normalized") {
  auto gw = mock_gateway({"The answer is: upper-left."});
  auto trace = run_direct(stepgame_example(), gw, {});
  CHECK(trace.answers == std::vector<std::string>{"top-left"});
}

TEST_CASE("extract_labels") {
  const auto& sg = spatial::SynonymDictionary::builtin(Dataset::stepgame);
  const auto& sq = spatial::SynonymDictionary::builtin(Dataset::sparqa);
  auto ex = stepgame_example();
  CHECK(extract_labels("Lower-Left", ex, sg) == std::vector<std::string>{"down-left"});
  CHECK(extract_labels("I think it is north east of B.", ex, sg) == std::vector<std::string>{"top-right"});
  CHECK(extract_labels("blorp", ex, sg) == std::vector<std::string>{"unknown:blorp"});

  auto fr = sparqa_example(QType::FR);
  CHECK(extract_labels("left, near", fr, sq) == std::vector<std::string>{"left", "near_to"});
  CHECK(extract_labels("Answer: below and far from", fr, sq) == std::vector<std::string>{"below", "far_from"});
  auto yn = sparqa_example(QType::YN);
  CHECK(extract_labels("No, the circle is not left of it.", yn, sq) == std::vector<std::string>{"no"});
  auto co = sparqa_example(QType::CO);
  CHECK(extract_labels("the black square", co, sq) == std::vector<std::string>{"1"});
  CHECK(extract_labels("Answer: 0", co, sq) == std::vector<std::string>{"0"});
  auto fb = sparqa_example(QType::FB);
  CHECK(extract_labels("Block B", fb, sq) == std::vector<std::string>{"b"});
}

TEST_CASE("asp: correct first program") {
  auto gw = mock_gateway({"is(a,left,b).\nquery(a,b)."});
  auto trace = run_asp_pipeline(stepgame_example(), gw, {});
  CHECK(trace.executable);
  CHECK(trace.answers == std::vector<std::string>{"left"});
  REQUIRE(trace.iterations.size() == 1);
  CHECK(trace.iterations[0].error == ErrorClass::none);
  CHECK(trace.gateway_calls == 1);
}

TEST_CASE("asp: parse error is repaired with the verbatim message") {
  PromptLog log;
  auto backend = std::make_shared<llm::MockBackend>([&](const llm::MockCall& call) -> std::optional<std::string> {
    log.prompts.push_back(call.prompt);
    if (call.index == 0) return "is(a left b).\nquery(a,b).";
    return "is(a,left,b).\nquery(a,b).";
  });
  llm::Gateway gw(backend);
  auto trace = run_asp_pipeline(stepgame_example(), gw, {});
  REQUIRE(trace.iterations.size() == 2);
  CHECK(trace.iterations[0].error == ErrorClass::parse);
  CHECK(trace.iterations[0].message.starts_with("PARSE: "));
  CHECK(trace.iterations[1].error == ErrorClass::none);
  CHECK(trace.answers == std::vector<std::string>{"left"});
  CHECK(trace.executable);
  REQUIRE(log.prompts.size() == 2);
  CHECK(log.prompts[1].find(trace.iterations[0].message) != std::string::npos);
  CHECK(log.prompts[1].find("is(a left b).") != std::string::npos);
}

TEST_CASE("asp: unknown relation gives no_result and an unknown answer") {
  auto backend = std::make_shared<llm::MockBackend>(
      [](const llm::MockCall&) -> std::optional<std::string> { return "is(a,besides,b).\nquery(a,b)."; });
  llm::Gateway gw(backend);
  auto trace = run_asp_pipeline(stepgame_example(), gw, {});
  CHECK_FALSE(trace.executable);
  CHECK(trace.final_error == ErrorClass::no_result);
  REQUIRE(trace.answers.size() == 1);
  CHECK(spatial::is_unknown(trace.answers[0]));
  CHECK(trace.iterations.size() == 3);
  CHECK(trace.gateway_calls == 3);
}

TEST_CASE("asp: unstratifiable candidate is classified") {
  auto gw = mock_gateway({"is(a,left,b).\nquery(a,b).\np :- not q.\nq :- not p."});
  PipelineConfig cfg;
  cfg.max_iterations = 1;
  auto trace = run_asp_pipeline(stepgame_example(), gw, cfg);
  CHECK(trace.final_error == ErrorClass::unstratifiable);
  CHECK(trace.iterations[0].message.find("p/0 -not-> q/0") != std::string::npos);
}

TEST_CASE("asp: a gateway failure mid-repair ends the example") {
  auto gw = mock_gateway({"is(a left b)."});
  auto trace = run_asp_pipeline(stepgame_example(), gw, {});
  CHECK(trace.final_error == ErrorClass::gateway);
  CHECK(trace.gateway_error.find("script_exhausted") != std::string::npos);
  CHECK(trace.iterations.size() == 1);
  CHECK(trace.answers == std::vector<std::string>{"unknown:gateway"});
}

TEST_CASE("asp: SparQA answers") {
  const std::string scene =
      "block(a). block(b).\nobject(o1,none,black,circle,a).\nobject(o2,none,black,square,b).\nis(a,left,b).\n";
  SUBCASE("FR") {
    auto gw = mock_gateway({scene + "query(R) :- is(o1,R,o2)."});
    auto t = run_asp_pipeline(sparqa_example(QType::FR), gw, {});
    CHECK(t.answers == std::vector<std::string>{"left"});
  }
  SUBCASE("YN yes") {
    auto gw = mock_gateway({scene + "query :- is(o1,left,o2)."});
    auto t = run_asp_pipeline(sparqa_example(QType::YN), gw, {});
    CHECK(t.answers == std::vector<std::string>{"yes"});
  }
  SUBCASE("YN no") {
    auto gw = mock_gateway({scene + "query :- is(o1,right,o2)."});
    auto t = run_asp_pipeline(sparqa_example(QType::YN), gw, {});
    CHECK(t.answers == std::vector<std::string>{"no"});
    CHECK(t.executable);
  }
  SUBCASE("FB") {
    auto gw = mock_gateway({scene + "query(B) :- object(_,_,_,circle,B)."});
    auto t = run_asp_pipeline(sparqa_example(QType::FB), gw, {});
    CHECK(t.answers == std::vector<std::string>{"a"});
  }
  SUBCASE("CO") {
    auto gw = mock_gateway({scene + "query(0) :- is(o1,left,o2).\nquery(1) :- is(o2,left,o1)."});
    auto t = run_asp_pipeline(sparqa_example(QType::CO), gw, {});
    CHECK(t.answers == std::vector<std::string>{"0"});
  }
}

TEST_CASE("facts+rules: two calls, malformed facts passed on verbatim") {
  PromptLog log;
  auto backend = std::make_shared<llm::MockBackend>([&](const llm::MockCall& call) -> std::optional<std::string> {
    log.prompts.push_back(call.prompt);
    if (call.index == 0) return "A is left of B, B is (above";
    return "Reasoning...\nAnswer: left";
  });
  llm::Gateway gw(backend);
  auto trace = run_facts_rules(stepgame_example(), gw, {});
  CHECK(trace.gateway_calls == 2);
  CHECK(trace.malformed_intermediate);
  CHECK(trace.answers == std::vector<std::string>{"left"});
  REQUIRE(log.prompts.size() == 2);
  CHECK(log.prompts[1].find("A is left of B, B is (above") != std::string::npos);

  auto ok = mock_gateway({"is(a,left,b).", "Answer: left"});
  CHECK_FALSE(run_facts_rules(stepgame_example(), ok, {}).malformed_intermediate);
}

TEST_CASE("replay miss is isolated to its example") {
  std::vector<Example> batch = {stepgame_example("e0"), stepgame_example("e1"), stepgame_example("e2")};
  batch[1].context = "A is to the right of B.";
  // Record everything, then drop the entry for e1.
  auto recorder = std::make_shared<llm::TranscriptRecorder>();
  llm::Gateway rec_gw(std::make_shared<llm::MockBackend>(
                          [](const llm::MockCall&) -> std::optional<std::string> { return "is(a,left,b).\nquery(a,b)."; }),
                      nullptr, recorder);
  run_batch_serial(batch, Strategy::asp, rec_gw, {});
  llm::Transcript kept;
  llm::Transcript all = recorder->snapshot();
  for (const auto& e : all.entries()) {
    if (e.prompt.find("to the right of") == std::string::npos) kept.add(e);
  }
  llm::Gateway replay(std::make_shared<llm::ReplayBackend>(kept));
  auto traces = run_batch(batch, Strategy::asp, replay, {}, 2);
  REQUIRE(traces.size() == 3);
  CHECK(traces[0].answers == std::vector<std::string>{"left"});
  CHECK(traces[1].final_error == ErrorClass::gateway);
  CHECK(traces[1].gateway_error.find("fingerprint_miss") != std::string::npos);
  CHECK(spatial::is_unknown(traces[1].answers.at(0)));
  CHECK(traces[2].answers == std::vector<std::string>{"left"});
}

namespace {

// Deterministic per prompt, so serial and parallel runs see the same text.
std::optional<std::string> chaotic(const llm::MockCall& call) {
  std::uint64_t h = std::hash<std::string>{}(call.prompt);
  static const std::vector<std::string> pool = {
      "is(a,left,b).\nquery(a,b).",
      "is(a left b).",
      "query(a,b).\nis(a,besides,b).",
      "p :- not q. q :- not p.",
      "is(a,top,b).\nquery(a,b).\n:- is(a,top,b).",
      "```\nis(a,down_left,b).\nquery(a,b).\n```",
      "x(X) :- not y(X).",
      "I am not sure.",
  };
  return pool[h % pool.size()];
}

}  // namespace

TEST_CASE("property: bounded calls, bounded iterations, executable implies an answer") {
  auto stories = spatial::synth_stepgame(1, 4, 10, 5);
  std::vector<Example> batch;
  for (const auto& s : stories) {
    Example ex;
    ex.id = s.id;
    ex.context = s.sentences.empty() ? "" : s.sentences[0];
    for (std::size_t i = 1; i < s.sentences.size(); ++i) ex.context += " " + s.sentences[i];
    ex.question = s.question;
    ex.gold = {std::string(spatial::label(s.answer))};
    ex.hop = s.hops;
    batch.push_back(ex);
  }
  for (int max_it : {1, 2, 3, 5}) {
    PipelineConfig cfg;
    cfg.max_iterations = max_it;
    llm::Gateway gw(std::make_shared<llm::MockBackend>(chaotic));
    for (const auto& t : run_batch_serial(batch, Strategy::asp, gw, cfg)) {
      CHECK(t.gateway_calls <= 1 + 2 * max_it);
      CHECK(static_cast<int>(t.iterations.size()) <= max_it);
      if (t.executable) {
        CHECK(t.final_error == ErrorClass::none);
        CHECK_FALSE(t.answers.empty());
      } else {
        CHECK(t.final_error != ErrorClass::none);
      }
    }
  }
}

TEST_CASE("parallel batch matches the serial reference and round-trips through JSON") {
  std::vector<Example> batch;
  for (int i = 0; i < 40; ++i) {
    Example ex = stepgame_example("e" + std::to_string(i));
    ex.context = "Story " + std::to_string(i) + ": A is to the left of B.";
    batch.push_back(ex);
  }
  for (Strategy s : {Strategy::direct, Strategy::facts_rules, Strategy::asp}) {
    llm::Gateway a(std::make_shared<llm::MockBackend>(chaotic));
    llm::Gateway b(std::make_shared<llm::MockBackend>(chaotic));
    auto serial = run_batch_serial(batch, s, a, {});
    auto parallel = run_batch(batch, s, b, {}, 4);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
      CHECK(parallel[i].example_id == batch[i].id);
      std::string line = trace_to_json(serial[i]);
      CHECK(line == trace_to_json(parallel[i]));
      CHECK(trace_to_json(trace_from_json(line)) == line);
    }
  }
}

TEST_CASE("strategy names") {
  CHECK(parse_strategy("asp") == Strategy::asp);
  CHECK(parse_strategy("facts+rules") == Strategy::facts_rules);
  CHECK(parse_strategy("direct") == Strategy::direct);
  CHECK_FALSE(parse_strategy("cot"));
}
