#include "spasp/eval/report.hpp"

#include "spasp/spatial/synonyms.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

namespace spasp::eval {

using pipeline::ErrorClass;
using pipeline::PipelineTrace;

namespace {

constexpr std::array<ErrorClass, 7> kClasses = {
    ErrorClass::parse,   ErrorClass::ground,  ErrorClass::unstratifiable, ErrorClass::unsat,
    ErrorClass::no_result, ErrorClass::gateway, ErrorClass::none,
};

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

LabelSet to_set(const std::vector<std::string>& labels) { return LabelSet(labels.begin(), labels.end()); }

int cell_order(const Example& ex) {
  if (ex.dataset == spatial::Dataset::stepgame) return ex.hop.value_or(0);
  return ex.qtype ? static_cast<int>(*ex.qtype) : 99;
}

// Answers the loop would have returned had it stopped after `round`.
std::vector<std::string> answers_at(const PipelineTrace& t, int round) {
  for (const auto& it : t.iterations) {
    if (it.iteration > round) break;
    if (it.error == ErrorClass::none) return it.answers;
  }
  return {std::string(spatial::kUnknownPrefix)};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

std::string_view to_string(MatchKind kind) {
  constexpr std::string_view names[] = {"exact", "partial", "miss"};
  return names[static_cast<std::size_t>(kind)];
}

bool is_multi_answer(const Example& ex) {
  return ex.dataset == spatial::Dataset::sparqa && (ex.qtype == QType::FR || ex.qtype == QType::CO) &&
         ex.gold.size() > 1;
}

MatchResult score(const LabelSet& predicted, const LabelSet& gold, bool multi_answer) {
  if (predicted.empty()) return {};
  if (std::any_of(predicted.begin(), predicted.end(), [](const std::string& l) { return spatial::is_unknown(l); })) {
    return {};
  }
  if (predicted == gold) return {MatchKind::exact, 1};
  if (multi_answer && std::includes(gold.begin(), gold.end(), predicted.begin(), predicted.end())) {
    return {MatchKind::partial, 1};
  }
  return {};
}

MatchResult score(const std::vector<std::string>& predicted, const Example& example) {
  return score(to_set(predicted), example.gold, is_multi_answer(example));
}

std::string cell_of(const Example& ex) {
  if (ex.dataset == spatial::Dataset::stepgame) return ex.hop ? "k=" + std::to_string(*ex.hop) : "k=?";
  return ex.qtype ? std::string(to_string(*ex.qtype)) : "?";
}

EvalReport build_report(const std::vector<PipelineTrace>& traces, const std::vector<Example>& examples,
                        const std::string& model_id) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (!index.emplace(examples[i].id, i).second) {
      throw std::invalid_argument("duplicate example id '" + examples[i].id + "'");
    }
  }
  std::vector<const PipelineTrace*> by_example(examples.size(), nullptr);
  for (const auto& t : traces) {
    auto it = index.find(t.example_id);
    if (it == index.end()) throw std::invalid_argument("trace for unknown example '" + t.example_id + "'");
    if (by_example[it->second]) throw std::invalid_argument("two traces for example '" + t.example_id + "'");
    by_example[it->second] = &t;
  }
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (!by_example[i]) throw std::invalid_argument("no trace for example '" + examples[i].id + "'");
  }

  EvalReport r;
  r.model_id = model_id;
  if (!traces.empty()) {
    r.strategy = traces.front().strategy;
    r.dataset = traces.front().dataset;
  } else if (!examples.empty()) {
    r.dataset = examples.front().dataset;
  }

  std::map<int, CellStats> cells;
  int rounds = 0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const Example& ex = examples[i];
    const PipelineTrace& t = *by_example[i];
    MatchResult m = score(t.answers, ex);
    auto& cell = cells[cell_order(ex)];
    cell.cell = cell_of(ex);
    ++cell.n;
    cell.correct += static_cast<std::size_t>(m.score);
    r.scored.push_back({ex.id, cell.cell, m, t.answers, ex.gold});

    ++r.final_errors[t.final_error];
    for (const auto& it : t.iterations) {
      if (it.error != ErrorClass::none) ++r.iteration_errors[it.error];
      rounds = std::max(rounds, it.iteration + 1);
    }
    if (t.strategy == pipeline::Strategy::asp && t.executable) {
      if (!is_multi_answer(ex) && t.answers.size() > 1) {
        r.flags.push_back({ex.id, "multiple_answers", t.answers, ex.gold});
      } else if (m.score == 0) {
        r.flags.push_back({ex.id, "answer_differs", t.answers, ex.gold});
      }
    }
  }
  for (auto& [key, cell] : cells) {
    cell.accuracy = cell.n ? static_cast<double>(cell.correct) / static_cast<double>(cell.n) : 0.0;
    r.n += cell.n;
    r.correct += cell.correct;
    r.cells.push_back(cell);
  }
  r.overall = r.n ? static_cast<double>(r.correct) / static_cast<double>(r.n) : 0.0;

  for (int round = 0; round < rounds; ++round) {
    RoundStats s;
    s.round = round;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < examples.size(); ++i) {
      const PipelineTrace& t = *by_example[i];
      if (t.strategy != pipeline::Strategy::asp) continue;
      ++s.total;
      auto answers = answers_at(t, round);
      if (!spatial::is_unknown(answers.front())) ++s.executable;
      correct += static_cast<std::size_t>(score(answers, examples[i]).score);
    }
    if (s.total) {
      s.rate = static_cast<double>(s.executable) / static_cast<double>(s.total);
      s.accuracy = static_cast<double>(correct) / static_cast<double>(s.total);
    }
    r.executability.push_back(s);
  }
  return r;
}

std::string accuracy_csv(const EvalReport& r) {
  std::string out = "model,strategy,dataset,cell,n,correct,accuracy\n";
  std::string prefix = csv_field(r.model_id) + "," + std::string(pipeline::to_string(r.strategy)) + "," +
                       std::string(spatial::to_string(r.dataset)) + ",";
  for (const auto& c : r.cells) {
    out += prefix + c.cell + "," + std::to_string(c.n) + "," + std::to_string(c.correct) + "," + fixed(c.accuracy) +
           "\n";
  }
  out += prefix + "Overall," + std::to_string(r.n) + "," + std::to_string(r.correct) + "," + fixed(r.overall) + "\n";
  return out;
}

std::string executability_csv(const EvalReport& r) {
  std::string out = "round,executable,total,rate,accuracy\n";
  for (const auto& s : r.executability) {
    out += std::to_string(s.round) + "," + std::to_string(s.executable) + "," + std::to_string(s.total) + "," +
           fixed(s.rate) + "," + fixed(s.accuracy) + "\n";
  }
  return out;
}

std::string errors_csv(const EvalReport& r) {
  std::string out = "scope,error_class,count\n";
  for (ErrorClass c : kClasses) {
    if (c == ErrorClass::none) continue;
    auto it = r.iteration_errors.find(c);
    out += "iteration," + std::string(pipeline::to_string(c)) + "," +
           std::to_string(it == r.iteration_errors.end() ? 0 : it->second) + "\n";
  }
  for (ErrorClass c : kClasses) {
    auto it = r.final_errors.find(c);
    out += "example," + std::string(pipeline::to_string(c)) + "," +
           std::to_string(it == r.final_errors.end() ? 0 : it->second) + "\n";
  }
  return out;
}

std::string scores_csv(const EvalReport& r) {
  std::string out = "example_id,cell,match,score,predicted,gold\n";
  for (const auto& s : r.scored) {
    out += csv_field(s.example_id) + "," + s.cell + "," + std::string(to_string(s.match.kind)) + "," +
           std::to_string(s.match.score) + "," + csv_field(join(s.predicted, '|')) + "," +
           csv_field(join(std::vector<std::string>(s.gold.begin(), s.gold.end()), '|')) + "\n";
  }
  return out;
}

std::string flags_ndjson(const EvalReport& r) {
  std::string out;
  for (const auto& f : r.flags) {
    nlohmann::ordered_json j;
    j["example_id"] = f.example_id;
    j["reason"] = f.reason;
    j["answers"] = f.answers;
    j["gold"] = f.gold;
    out += j.dump() + "\n";
  }
  return out;
}

std::string feedback_dat(const EvalReport& r) {
  std::string out = "# round executability accuracy\n";
  for (const auto& s : r.executability) {
    out += std::to_string(s.round) + " " + fixed(s.rate) + " " + fixed(s.accuracy) + "\n";
  }
  return out;
}

std::string traces_ndjson(const std::vector<PipelineTrace>& traces) {
  std::string out;
  for (const auto& t : traces) out += pipeline::trace_to_json(t) + "\n";
  return out;
}

void write_report(const std::filesystem::path& dir, const EvalReport& report,
                  const std::vector<PipelineTrace>* traces) {
  std::filesystem::create_directories(dir);
  write_file(dir / "accuracy.csv", accuracy_csv(report));
  write_file(dir / "executability.csv", executability_csv(report));
  write_file(dir / "errors.csv", errors_csv(report));
  write_file(dir / "scores.csv", scores_csv(report));
  write_file(dir / "flags.ndjson", flags_ndjson(report));
  write_file(dir / "feedback.dat", feedback_dat(report));
  if (traces) write_file(dir / "traces.ndjson", traces_ndjson(*traces));
}

std::vector<PipelineTrace> read_traces(const std::filesystem::path& ndjson) {
  std::ifstream in(ndjson, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + ndjson.string());
  std::vector<PipelineTrace> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(pipeline::trace_from_json(line));
    } catch (const std::exception& err) {
      throw std::invalid_argument(ndjson.filename().string() + " line " + std::to_string(line_no) + ": " +
                                  err.what());
    }
  }
  return out;
}

}  // namespace spasp::eval
