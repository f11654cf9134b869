#pragma once

// AST for the stratified ASP fragment: facts, normal rules, integrity
// constraints, negation as failure, comparisons, integer +/- arithmetic and
// body-level conditional literals.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace spasp::asp {

/// 1-based line/column of the first byte plus the byte range in the source.
struct SourceSpan {
  std::size_t line = 0;
  std::size_t column = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct Term {
  enum class Kind : std::uint8_t { symbol, string, integer, variable, anonymous, binary };

  Kind kind = Kind::symbol;
  std::string name;  // symbol text, string contents or variable name
  std::int64_t number = 0;
  char op = 0;  // '+' or '-' when kind == binary
  std::vector<Term> operands;

  static Term symbol(std::string text);
  static Term string(std::string text);
  static Term integer(std::int64_t value);
  static Term variable(std::string name);
  static Term anonymous();
  static Term binary(char op, Term lhs, Term rhs);

  bool is_ground() const;

  bool operator==(const Term&) const = default;
};

struct Signature {
  std::string name;
  std::size_t arity = 0;

  auto operator<=>(const Signature&) const = default;
};

std::string to_string(const Signature& sig);

struct Atom {
  std::string predicate;
  std::vector<Term> args;
  SourceSpan span;

  Signature signature() const { return {predicate, args.size()}; }

  bool operator==(const Atom& other) const {
    return predicate == other.predicate && args == other.args;
  }
};

enum class Polarity : std::uint8_t { positive, negative };

struct AtomLiteral {
  Polarity polarity = Polarity::positive;
  Atom atom;

  bool operator==(const AtomLiteral&) const = default;
};

enum class CompareOp : std::uint8_t { eq, ne, lt, le, gt, ge };

std::string_view to_string(CompareOp op);

struct Comparison {
  Term lhs;
  CompareOp op = CompareOp::eq;
  Term rhs;
  SourceSpan span;

  bool operator==(const Comparison& other) const {
    return lhs == other.lhs && op == other.op && rhs == other.rhs;
  }
};

using Literal = std::variant<AtomLiteral, Comparison>;

/// `head : c1, ..., cn` in a rule body. Holds iff head holds for every
/// instantiation of its local variables that satisfies the conditions.
struct Conditional {
  Literal head;
  std::vector<Literal> conditions;

  bool operator==(const Conditional&) const = default;
};

using BodyElement = std::variant<AtomLiteral, Comparison, Conditional>;

struct Rule {
  std::optional<Atom> head;  // absent for integrity constraints
  std::vector<BodyElement> body;
  SourceSpan span;

  bool is_fact() const { return head && body.empty(); }
  bool is_constraint() const { return !head; }

  bool operator==(const Rule& other) const {
    return head == other.head && body == other.body;
  }
};

/// `#show p/n.` or `#show.`; kept so LLM output using it still parses.
struct ShowDirective {
  std::optional<Signature> signature;
  SourceSpan span;

  bool operator==(const ShowDirective& other) const { return signature == other.signature; }
};

struct Program {
  std::vector<Rule> rules;
  std::vector<ShowDirective> shows;

  bool operator==(const Program&) const = default;
};

/// Variables of a term in order of first occurrence; anonymous ones excluded.
void collect_variables(const Term& term, std::vector<std::string>& out);
void collect_variables(const Atom& atom, std::vector<std::string>& out);

}  // namespace spasp::asp
