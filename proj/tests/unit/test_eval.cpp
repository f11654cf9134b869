#include "doctest.h"

#include "json.hpp"
#include "spasp/eval/dataset.hpp"
#include "spasp/eval/report.hpp"

#include <fstream>
#include <numeric>
#include <random>

#include <unistd.h>

using namespace spasp;
using namespace spasp::eval;
using pipeline::ErrorClass;
using pipeline::PipelineTrace;
using spatial::Dataset;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("spasp_eval_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string read(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

nlohmann::json stepgame_file(int hop, int records) {
  static const char* labels[] = {"left", "upper-left", "below", "lower-right", "overlap", "right"};
  nlohmann::json doc = nlohmann::json::object();
  for (int i = 0; i < records; ++i) {
    doc[std::to_string(i)] = {
        {"story", {"A is left of B.", "B is above C."}},
        {"question", "What is the relation of the agent A to the agent C?"},
        {"label", labels[(i + hop) % 6]},
        {"k_hop", hop},
    };
  }
  return doc;
}

Example sg(std::string id, int hop, std::string gold) {
  Example ex;
  ex.id = std::move(id);
  ex.hop = hop;
  ex.gold = {std::move(gold)};
  return ex;
}

Example sq(std::string id, QType q, LabelSet gold) {
  Example ex;
  ex.id = std::move(id);
  ex.dataset = Dataset::sparqa;
  ex.qtype = q;
  ex.gold = std::move(gold);
  return ex;
}

PipelineTrace trace_for(const Example& ex, std::vector<std::string> answers) {
  PipelineTrace t;
  t.example_id = ex.id;
  t.dataset = ex.dataset;
  t.answers = std::move(answers);
  t.executable = !t.answers.empty() && !spatial::is_unknown(t.answers.front());
  t.final_error = t.executable ? ErrorClass::none : ErrorClass::no_result;
  return t;
}

}  // namespace

TEST_CASE("score: documented cases") {
  struct Case {
    LabelSet pred;
    LabelSet gold;
    bool multi;
    MatchKind kind;
    int score;
  };
  const std::vector<Case> cases = {
      {{"left"}, {"left"}, false, MatchKind::exact, 1},
      {{"left"}, {"left", "near_to"}, true, MatchKind::partial, 1},
      {{"left", "above"}, {"left"}, false, MatchKind::miss, 0},
      {{"left", "near_to"}, {"left", "near_to"}, true, MatchKind::exact, 1},
      {{"left", "above"}, {"left", "near_to"}, true, MatchKind::miss, 0},
      {{}, {"left"}, false, MatchKind::miss, 0},
      {{"dk"}, {"dk"}, false, MatchKind::exact, 1},
      {{"unknown:sideways"}, {"left"}, false, MatchKind::miss, 0},
      {{"left", "unknown:x"}, {"left", "near_to"}, true, MatchKind::miss, 0},
      {{"left"}, {"left", "near_to"}, false, MatchKind::miss, 0},
  };
  for (const auto& c : cases) {
    auto m = score(c.pred, c.gold, c.multi);
    CHECK(m.kind == c.kind);
    CHECK(m.score == c.score);
  }
}

TEST_CASE("score: multi-answer only for FR and CO with several gold labels") {
  CHECK(is_multi_answer(sq("a", QType::FR, {"left", "near_to"})));
  CHECK(is_multi_answer(sq("b", QType::CO, {"0", "1"})));
  CHECK_FALSE(is_multi_answer(sq("c", QType::FR, {"left"})));
  CHECK_FALSE(is_multi_answer(sq("d", QType::FB, {"a", "b"})));
  CHECK_FALSE(is_multi_answer(sq("e", QType::YN, {"yes"})));
  CHECK_FALSE(is_multi_answer(sg("f", 3, "left")));
}

TEST_CASE("score: idempotent under normalization of canonical labels") {
  const auto& dict = spatial::SynonymDictionary::builtin(Dataset::sparqa);
  std::vector<std::string> canon = {"left", "right", "above", "below", "near_to", "far_from", "touching", "dk"};
  std::mt19937_64 rng(7);
  for (int n = 0; n < 300; ++n) {
    LabelSet p, g;
    for (const auto& l : canon) {
      if (rng() % 3 == 0) p.insert(l);
      if (rng() % 3 == 0) g.insert(l);
    }
    LabelSet np, ng;
    for (const auto& l : p) np.insert(spatial::normalize_answer(l, Dataset::sparqa, &dict));
    for (const auto& l : g) ng.insert(spatial::normalize_answer(l, Dataset::sparqa, &dict));
    for (bool multi : {false, true}) {
      auto a = score(np, ng, multi);
      auto b = score(p, g, multi);
      CHECK(a.kind == b.kind);
      CHECK(a.score == b.score);
    }
  }
}

TEST_CASE("sample_indices is deterministic, sorted and distinct") {
  auto a = sample_indices(1000, 300, 42);
  CHECK(a == sample_indices(1000, 300, 42));
  CHECK(a != sample_indices(1000, 300, 43));
  CHECK(a.size() == 300);
  CHECK(std::is_sorted(a.begin(), a.end()));
  CHECK(std::adjacent_find(a.begin(), a.end()) == a.end());
  CHECK(sample_indices(5, 10, 1) == std::vector<std::size_t>{0, 1, 2, 3, 4});
}

TEST_CASE("load_stepgame") {
  TempDir dir;
  for (int hop = 1; hop <= 10; ++hop) {
    write(dir.path / ("qa" + std::to_string(hop) + "_test.json"), stepgame_file(hop, 40).dump());
  }

  std::set<int> hops;
  for (int k = 1; k <= 10; ++k) hops.insert(k);
  auto all = load_stepgame(dir.path, hops, 30);
  CHECK(all.size() == 300);
  for (int k = 1; k <= 10; ++k) {
    CHECK(std::count_if(all.begin(), all.end(), [&](const Example& e) { return e.hop == k; }) == 30);
  }

  auto one = load_stepgame(dir.path, {3}, 1, 9);
  auto again = load_stepgame(dir.path, {3}, 1, 9);
  REQUIRE(one.size() == 1);
  CHECK(one[0].id == again[0].id);
  CHECK(one[0].context == "A is left of B. B is above C.");

  // Record 0 of hop 1 carries "upper-left".
  auto full = load_stepgame(dir.path, {1}, 0);
  CHECK(full.size() == 40);
  CHECK(full[0].id == "k1-0");
  CHECK(full[0].gold == LabelSet{"top-left"});
  CHECK(full[2].gold == LabelSet{"down-right"});

  auto bad = stepgame_file(2, 3);
  bad["1"]["label"] = "sideways";
  write(dir.path / "qa2_test.json", bad.dump());
  try {
    load_stepgame(dir.path, {2}, 0);
    FAIL("expected a schema error");
  } catch (const SchemaError& err) {
    CHECK(std::string(err.what()) == "qa2_test.json record '1': label 'sideways' is not a relation");
  }
  bad["1"].erase("label");
  write(dir.path / "qa2_test.json", bad.dump());
  CHECK_THROWS_AS(load_stepgame(dir.path, {2}, 0), SchemaError);
  CHECK_THROWS(load_stepgame(dir.path, {11}, 0));
}

TEST_CASE("load_sparqa: nested layout") {
  TempDir dir;
  nlohmann::json questions = nlohmann::json::array();
  const char* types[] = {"FR", "FB", "YN", "CO"};
  for (int i = 0; i < 20; ++i) {
    std::string t = types[i % 4];
    nlohmann::json q = {{"q_id", i}, {"q_type", t}, {"question", "Q" + std::to_string(i)}};
    if (t == "FR") {
      q["candidate_answers"] = {"left", "right", "above", "below", "near to", "far from", "touching", "DK"};
      q["answer"] = i == 0 ? nlohmann::json{0, 4} : nlohmann::json{"DK"};
    } else if (t == "FB") {
      q["answer"] = {"Block B"};
    } else if (t == "YN") {
      q["answer"] = {i == 2 ? "DK" : "Yes"};
    } else {
      q["candidate_answers"] = {"the big circle", "the small square", "both of them", "none of them"};
      q["answer"] = i == 3 ? nlohmann::json{1} : nlohmann::json{"both of them"};
    }
    questions.push_back(q);
  }
  nlohmann::json story = {
      {"identifier", "st"}, {"story", {"Block A is left of block B."}}, {"questions", questions}};
  nlohmann::json doc = {{"data", {story}}};
  write(dir.path / "human_test.json", doc.dump());

  auto per1 = load_sparqa(dir.path / "human_test.json", 1);
  REQUIRE(per1.size() == 4);
  CHECK(per1[0].qtype == QType::FR);
  CHECK(per1[3].qtype == QType::CO);

  auto all = load_sparqa(dir.path / "human_test.json", 0);
  REQUIRE(all.size() == 20);
  auto find = [&](const std::string& id) {
    return *std::find_if(all.begin(), all.end(), [&](const Example& e) { return e.id == id; });
  };
  CHECK(find("st-0").gold == LabelSet{"left", "near_to"});
  CHECK(find("st-4").gold == LabelSet{"dk"});
  CHECK(find("st-1").gold == LabelSet{"b"});
  CHECK(find("st-2").gold == LabelSet{"dk"});
  CHECK(find("st-6").gold == LabelSet{"yes"});
  CHECK(find("st-3").gold == LabelSet{"1"});
  CHECK(find("st-7").gold == LabelSet{"2"});
  CHECK(find("st-7").choices.size() == 4);
  CHECK(find("st-0").context == "Block A is left of block B.");

  auto per3 = load_sparqa(dir.path / "human_test.json", 3, 5);
  CHECK(per3.size() == 12);
  std::vector<std::string> ids, ids2;
  for (const auto& e : per3) ids.push_back(e.id);
  for (const auto& e : load_sparqa(dir.path / "human_test.json", 3, 5)) ids2.push_back(e.id);
  CHECK(ids == ids2);
}

TEST_CASE("load_sparqa: flat layout and schema errors") {
  TempDir dir;
  nlohmann::json flat = nlohmann::json::array();
  flat.push_back({{"id", "x1"}, {"context", "c"}, {"question", "q"}, {"qtype", "YN"}, {"answer", "no"}});
  flat.push_back({{"id", "x2"}, {"context", "c"}, {"question", "q"}, {"qtype", "FR"}, {"answer", {"below", "far"}}});
  write(dir.path / "flat.json", flat.dump());
  auto ex = load_sparqa(dir.path / "flat.json", 0);
  REQUIRE(ex.size() == 2);
  CHECK(ex[0].id == "x2");
  CHECK(ex[0].gold == LabelSet{"below", "far_from"});
  CHECK(ex[1].gold == LabelSet{"no"});

  flat.push_back({{"id", "x3"}, {"context", "c"}, {"question", "q"}, {"qtype", "ZZ"}, {"answer", "no"}});
  write(dir.path / "flat.json", flat.dump());
  try {
    load_sparqa(dir.path / "flat.json", 0);
    FAIL("expected a schema error");
  } catch (const SchemaError& err) {
    CHECK(std::string(err.what()) == "flat.json record 'x3': unknown question type 'ZZ'");
  }
}

TEST_CASE("example JSON round trip") {
  Example ex = sq("s-1", QType::CO, {"0", "2"});
  ex.context = "ctx \"quoted\"";
  ex.question = "q?";
  ex.choices = {"a", "b", "c"};
  Example back = example_from_json(example_to_json(ex));
  CHECK(back.id == ex.id);
  CHECK(back.dataset == ex.dataset);
  CHECK(back.context == ex.context);
  CHECK(back.choices == ex.choices);
  CHECK(back.gold == ex.gold);
  CHECK(back.qtype == ex.qtype);
  CHECK_FALSE(back.hop);
  Example s = sg("k2-5", 2, "left");
  CHECK(example_from_json(example_to_json(s)).hop == 2);
}

TEST_CASE("report: all correct") {
  std::vector<Example> examples;
  std::vector<PipelineTrace> traces;
  for (int k = 1; k <= 3; ++k) {
    for (int i = 0; i < 4; ++i) {
      examples.push_back(sg("k" + std::to_string(k) + "-" + std::to_string(i), k, "left"));
      traces.push_back(trace_for(examples.back(), {"left"}));
    }
  }
  auto r = build_report(traces, examples, "m");
  CHECK(r.overall == 1.0);
  REQUIRE(r.cells.size() == 3);
  for (const auto& c : r.cells) CHECK(c.accuracy == 1.0);
  CHECK(r.cells[0].cell == "k=1");
  CHECK(r.flags.empty());
}

TEST_CASE("report: overall recomputed from a published per-hop row") {
  // Independent oracle: plain mean of the ten cells (equal cell sizes).
  const std::vector<double> row = {93.7, 89.2, 92.5, 89.3, 88.5, 87.7, 86.3, 85.2, 84.5, 79.8};
  const double expected = std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(row.size());
  std::vector<Example> examples;
  std::vector<PipelineTrace> traces;
  for (int k = 1; k <= 10; ++k) {
    const int correct = static_cast<int>(row[static_cast<std::size_t>(k - 1)] * 10 + 0.5);
    for (int i = 0; i < 1000; ++i) {
      examples.push_back(sg("k" + std::to_string(k) + "-" + std::to_string(i), k, "left"));
      traces.push_back(trace_for(examples.back(), {i < correct ? "left" : "right"}));
    }
  }
  auto r = build_report(traces, examples);
  CHECK(r.overall * 100 == doctest::Approx(expected).epsilon(1e-12));
  CHECK(std::abs(r.overall * 100 - 87.7) <= 0.05);
  for (std::size_t k = 0; k < 10; ++k) CHECK(r.cells[k].accuracy * 100 == doctest::Approx(row[k]));
}

TEST_CASE("report: executability curve, histogram conservation, flags") {
  // 500 examples; 229 execute at round 0, 155 more at round 1, the rest never.
  std::vector<Example> examples;
  std::vector<PipelineTrace> traces;
  std::size_t non_exec_iterations = 0;
  for (int i = 0; i < 500; ++i) {
    examples.push_back(sg("e" + std::to_string(i), 1, "left"));
    PipelineTrace t;
    t.example_id = examples.back().id;
    auto failing = [&](int it, ErrorClass c) {
      pipeline::IterationRecord rec;
      rec.iteration = it;
      rec.error = c;
      ++non_exec_iterations;
      return rec;
    };
    pipeline::IterationRecord ok;
    ok.answers = {"left"};
    if (i < 229) {
      t.iterations = {ok};
    } else if (i < 384) {
      ok.iteration = 1;
      t.iterations = {failing(0, ErrorClass::parse), ok};
    } else {
      t.iterations = {failing(0, ErrorClass::ground), failing(1, ErrorClass::no_result)};
    }
    t.executable = i < 384;
    t.answers = t.executable ? std::vector<std::string>{"left"} : std::vector<std::string>{"unknown:no_result"};
    t.final_error = t.executable ? ErrorClass::none : ErrorClass::no_result;
    traces.push_back(t);
  }
  auto r = build_report(traces, examples);
  REQUIRE(r.executability.size() == 2);
  CHECK(r.executability[0].rate == doctest::Approx(0.458));
  CHECK(r.executability[1].rate == doctest::Approx(0.768));
  CHECK(r.executability[1].accuracy == doctest::Approx(0.768));
  std::size_t total = 0;
  for (const auto& [c, n] : r.iteration_errors) total += n;
  CHECK(total == non_exec_iterations);
  std::size_t cell_total = 0;
  for (const auto& c : r.cells) cell_total += c.n;
  CHECK(cell_total == examples.size());

  CHECK(feedback_dat(r) == "# round executability accuracy\n0 0.4580 0.4580\n1 0.7680 0.7680\n");

  // Executable with a contradicting answer, and with two answers.
  traces[0].answers = {"right"};
  traces[0].iterations[0].answers = {"right"};
  traces[1].answers = {"left", "right"};
  auto flagged = build_report(traces, examples);
  REQUIRE(flagged.flags.size() == 2);
  CHECK(flagged.flags[0].reason == "answer_differs");
  CHECK(flagged.flags[1].reason == "multiple_answers");
}

TEST_CASE("report: mismatched ids") {
  std::vector<Example> examples = {sg("a", 1, "left"), sg("b", 1, "left")};
  std::vector<PipelineTrace> traces = {trace_for(examples[0], {"left"})};
  CHECK_THROWS_WITH(build_report(traces, examples), "no trace for example 'b'");
  traces.push_back(trace_for(sg("c", 1, "left"), {"left"}));
  CHECK_THROWS_WITH(build_report(traces, examples), "trace for unknown example 'c'");
  traces = {trace_for(examples[0], {"left"}), trace_for(examples[0], {"left"})};
  CHECK_THROWS_WITH(build_report(traces, examples), "two traces for example 'a'");
}

TEST_CASE("report files") {
  std::vector<Example> examples = {sq("q1", QType::FR, {"left", "near_to"}), sq("q2", QType::YN, {"no"})};
  std::vector<PipelineTrace> traces = {trace_for(examples[0], {"left"}), trace_for(examples[1], {"yes"})};
  auto r = build_report(traces, examples, "gpt-4o-mini");
  CHECK(accuracy_csv(r) ==
        "model,strategy,dataset,cell,n,correct,accuracy\n"
        "gpt-4o-mini,asp,sparqa,FR,1,1,1.0000\n"
        "gpt-4o-mini,asp,sparqa,YN,1,0,0.0000\n"
        "gpt-4o-mini,asp,sparqa,Overall,2,1,0.5000\n");
  CHECK(scores_csv(r) ==
        "example_id,cell,match,score,predicted,gold\n"
        "q1,FR,partial,1,left,left|near_to\n"
        "q2,YN,miss,0,yes,no\n");
  TempDir dir;
  write_report(dir.path / "out", r, &traces);
  for (const char* f : {"accuracy.csv", "executability.csv", "errors.csv", "scores.csv", "flags.ndjson",
                        "feedback.dat", "traces.ndjson"}) {
    CHECK(std::filesystem::exists(dir.path / "out" / f));
  }
  auto back = read_traces(dir.path / "out" / "traces.ndjson");
  REQUIRE(back.size() == 2);
  CHECK(back[1].answers == std::vector<std::string>{"yes"});
  CHECK(read(dir.path / "out" / "errors.csv").find("example,none,2\n") != std::string::npos);
}
