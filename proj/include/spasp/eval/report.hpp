#pragma once

#include "spasp/eval/example.hpp"
#include "spasp/pipeline/pipeline.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace spasp::eval {

enum class MatchKind : std::uint8_t { exact, partial, miss };

std::string_view to_string(MatchKind kind);

struct MatchResult {
  MatchKind kind = MatchKind::miss;
  int score = 0;
};

/// FR and CO questions with more than one gold label take the partial rule
/// (nonempty predicted subset of gold); everything else needs equal sets.
bool is_multi_answer(const Example& example);

/// Labels must already be canonical; any unknown label is a miss.
MatchResult score(const LabelSet& predicted, const LabelSet& gold, bool multi_answer);
MatchResult score(const std::vector<std::string>& predicted, const Example& example);

/// "k=3" for StepGame, the question type for SparQA.
std::string cell_of(const Example& example);

struct CellStats {
  std::string cell;
  std::size_t n = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
};

struct RoundStats {
  int round = 0;
  std::size_t executable = 0;
  std::size_t total = 0;
  double rate = 0.0;
  /// Accuracy if the loop had stopped after this round.
  double accuracy = 0.0;
};

struct LabelFlag {
  std::string example_id;
  std::string reason;  // "multiple_answers" or "answer_differs"
  std::vector<std::string> answers;
  LabelSet gold;
};

struct ScoredExample {
  std::string example_id;
  std::string cell;
  MatchResult match;
  std::vector<std::string> predicted;
  LabelSet gold;
};

struct EvalReport {
  std::string model_id;
  pipeline::Strategy strategy = pipeline::Strategy::asp;
  spatial::Dataset dataset = spatial::Dataset::stepgame;
  std::vector<CellStats> cells;
  std::size_t n = 0;
  std::size_t correct = 0;
  double overall = 0.0;
  /// Empty unless some trace has iterations.
  std::vector<RoundStats> executability;
  /// Classes of the iterations that did not execute.
  std::map<pipeline::ErrorClass, std::size_t> iteration_errors;
  /// Final class per example.
  std::map<pipeline::ErrorClass, std::size_t> final_errors;
  std::vector<LabelFlag> flags;
  std::vector<ScoredExample> scored;
};

/// Joins traces to examples by id; throws std::invalid_argument on a
/// missing, duplicate or unknown id. Traces are assumed to share one
/// strategy and dataset.
EvalReport build_report(const std::vector<pipeline::PipelineTrace>& traces, const std::vector<Example>& examples,
                        const std::string& model_id = {});

/// accuracy.csv, executability.csv, errors.csv, scores.csv, flags.ndjson,
/// feedback.dat and, when given, traces.ndjson.
void write_report(const std::filesystem::path& dir, const EvalReport& report,
                  const std::vector<pipeline::PipelineTrace>* traces = nullptr);

std::string accuracy_csv(const EvalReport& report);
std::string executability_csv(const EvalReport& report);
std::string errors_csv(const EvalReport& report);
std::string scores_csv(const EvalReport& report);
std::string flags_ndjson(const EvalReport& report);
/// Whitespace-separated columns for plotting: round, executability, accuracy.
std::string feedback_dat(const EvalReport& report);
std::string traces_ndjson(const std::vector<pipeline::PipelineTrace>& traces);

std::vector<pipeline::PipelineTrace> read_traces(const std::filesystem::path& ndjson);

}  // namespace spasp::eval
