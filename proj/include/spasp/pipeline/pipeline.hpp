#pragma once

#include "spasp/asp/solver.hpp"
#include "spasp/eval/example.hpp"
#include "spasp/llm/gateway.hpp"
#include "spasp/spatial/synonyms.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spasp::pipeline {

enum class ErrorClass : std::uint8_t { parse, ground, unstratifiable, unsat, no_result, gateway, none };

std::string_view to_string(ErrorClass c);
std::optional<ErrorClass> parse_error_class(std::string_view text);

/// Total: parse_error -> parse; unsafe_variable and ground_error -> ground;
/// unstratifiable; unsatisfiable -> unsat; model without answers -> no_result;
/// otherwise none.
ErrorClass classify_outcome(const asp::SolverOutcome& outcome, const asp::AnswerSet& answers);

enum class Strategy : std::uint8_t { direct, facts_rules, asp };

std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view text);

struct PipelineConfig {
  int max_iterations = 3;
  /// Unset: hop + 1 for StepGame examples with a hop, 100 otherwise.
  std::optional<std::int64_t> domain_bound;
  std::size_t instantiation_ceiling = 1'000'000;
  std::string model_id = "gpt-4o-mini";
  double temperature = 0.0;
  int max_tokens = 1024;
  /// Replacements for the built-in knowledge programs and dictionaries.
  std::optional<std::string> stepgame_knowledge;
  std::optional<std::string> sparqa_knowledge;
  const spatial::SynonymDictionary* stepgame_synonyms = nullptr;
  const spatial::SynonymDictionary* sparqa_synonyms = nullptr;
};

struct IterationRecord {
  int iteration = 0;
  std::string response;  // raw model output
  std::string program;   // after sanitization; knowledge not included
  asp::OutcomeKind outcome = asp::OutcomeKind::model;
  std::string message;
  ErrorClass error = ErrorClass::none;
  std::vector<std::string> answers;
};

/// One gateway exchange of the direct and Facts+Rules strategies.
struct StageRecord {
  std::string name;
  std::string fingerprint;
  std::string response;
};

struct PipelineTrace {
  std::string example_id;
  Strategy strategy = Strategy::asp;
  spatial::Dataset dataset = spatial::Dataset::stepgame;
  std::vector<IterationRecord> iterations;
  std::vector<StageRecord> stages;
  /// Canonical labels; unmapped tokens carry spatial::kUnknownPrefix.
  std::vector<std::string> answers;
  /// ASP only: some iteration produced a model with answers.
  bool executable = false;
  ErrorClass final_error = ErrorClass::none;
  std::string gateway_error;
  /// Facts+Rules: stage-1 output did not parse as facts.
  bool malformed_intermediate = false;
  int gateway_calls = 0;
  /// Sum of backend-reported latencies (replay: the recorded ones).
  double latency_ms = 0.0;
};

/// Strip Markdown fences, prose lines before and between statements, and
/// prose after the last one. Unterminated statements are kept so the parser
/// can report them.
std::string sanitize_program(std::string_view response);

/// Answer labels from free-form model text: the part after "answer" if any,
/// split on commas, mapped through the dictionary; falls back to scanning for
/// known phrases. CO answers become choice indices.
std::vector<std::string> extract_labels(std::string_view response, const eval::Example& example,
                                        const spatial::SynonymDictionary& dictionary);

/// Labels for the answer atoms of a model (answer/1 for StepGame, query/N
/// for SparQA, presence of query for YN).
asp::AnswerSet answer_tuples(const asp::StableModel& model, const eval::Example& example);
std::vector<std::string> map_answers(const asp::AnswerSet& tuples, const eval::Example& example,
                                     const spatial::SynonymDictionary& dictionary);

PipelineTrace run_direct(const eval::Example& example, llm::Gateway& gateway, const PipelineConfig& config);
PipelineTrace run_facts_rules(const eval::Example& example, llm::Gateway& gateway,
                              const PipelineConfig& config);
PipelineTrace run_asp_pipeline(const eval::Example& example, llm::Gateway& gateway,
                               const PipelineConfig& config);
PipelineTrace run_example(Strategy strategy, const eval::Example& example, llm::Gateway& gateway,
                          const PipelineConfig& config);

/// One refine call; returns the sanitized revised program. Throws on
/// gateway failure.
std::string refine_program(std::string_view program, ErrorClass error, std::string_view message,
                           const eval::Example& example, llm::Gateway& gateway, const PipelineConfig& config,
                           llm::Completion* raw = nullptr);

/// Results are in example order whatever the completion order.
std::vector<PipelineTrace> run_batch(std::span<const eval::Example> examples, Strategy strategy,
                                     llm::Gateway& gateway, const PipelineConfig& config, int jobs = 0);
std::vector<PipelineTrace> run_batch_serial(std::span<const eval::Example> examples, Strategy strategy,
                                            llm::Gateway& gateway, const PipelineConfig& config);

/// One-line JSON; key order and number formatting are fixed.
std::string trace_to_json(const PipelineTrace& trace);
PipelineTrace trace_from_json(std::string_view line);

}  // namespace spasp::pipeline
