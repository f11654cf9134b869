#pragma once

#include "spasp/asp/program.hpp"

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace spasp::asp {

/// A ground term. Total order: integers < symbols < strings.
struct Value {
  enum class Type : std::uint8_t { integer, symbol, string };

  Type type = Type::symbol;
  std::int64_t number = 0;
  std::string text;

  static Value integer(std::int64_t v) { return {Type::integer, v, {}}; }
  static Value symbol(std::string s) { return {Type::symbol, 0, std::move(s)}; }
  static Value string(std::string s) { return {Type::string, 0, std::move(s)}; }

  bool operator==(const Value&) const = default;
  std::strong_ordering operator<=>(const Value& other) const;
};

std::string to_string(const Value& value);

struct GroundAtom {
  std::string predicate;
  std::vector<Value> args;

  Signature signature() const { return {predicate, args.size()}; }

  bool operator==(const GroundAtom&) const = default;
  std::strong_ordering operator<=>(const GroundAtom& other) const;
};

std::string to_string(const GroundAtom& atom);

struct StableModel {
  std::vector<GroundAtom> atoms;  // sorted, unique

  bool contains(const GroundAtom& atom) const;
};

/// Ground argument tuples of one predicate, lexicographically sorted.
using AnswerSet = std::vector<std::vector<Value>>;

// Error payloads. message() renders `CLASS: detail @ line:col`; the pipeline
// quotes these verbatim in repair prompts, so they must stay stable.

struct ParseError {
  std::string detail;
  SourceSpan at;
  std::string message() const;
};

struct UnsafeVariable {
  std::string variable;
  std::string rule_text;
  SourceSpan at;
  std::string message() const;
};

struct GroundError {
  std::string detail;
  SourceSpan at;
  std::string message() const;
};

struct Unstratifiable {
  std::string cycle;
  SourceSpan at;
  std::string message() const;
};

struct Unsatisfiable {
  std::string constraint;
  SourceSpan at;
  std::string message() const;
};

enum class OutcomeKind : std::uint8_t {
  model,
  unsatisfiable,
  parse_error,
  unsafe_variable,
  ground_error,
  unstratifiable,
};

std::string_view to_string(OutcomeKind kind);

struct SolverOutcome {
  std::variant<StableModel, Unsatisfiable, ParseError, UnsafeVariable, GroundError, Unstratifiable>
      value;

  OutcomeKind kind() const { return static_cast<OutcomeKind>(value.index()); }
  bool has_model() const { return kind() == OutcomeKind::model; }
  const StableModel& model() const { return std::get<StableModel>(value); }

  /// Model summary ("model: N atoms") or the error message.
  std::string message() const;
};

}  // namespace spasp::asp
