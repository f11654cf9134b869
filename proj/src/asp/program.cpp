#include "spasp/asp/outcome.hpp"
#include "spasp/asp/program.hpp"

#include <algorithm>

namespace spasp::asp {

Term Term::symbol(std::string text) {
  Term t;
  t.kind = Kind::symbol;
  t.name = std::move(text);
  return t;
}

Term Term::string(std::string text) {
  Term t;
  t.kind = Kind::string;
  t.name = std::move(text);
  return t;
}

Term Term::integer(std::int64_t value) {
  Term t;
  t.kind = Kind::integer;
  t.number = value;
  return t;
}

Term Term::variable(std::string name) {
  Term t;
  t.kind = Kind::variable;
  t.name = std::move(name);
  return t;
}

Term Term::anonymous() {
  Term t;
  t.kind = Kind::anonymous;
  return t;
}

Term Term::binary(char op, Term lhs, Term rhs) {
  Term t;
  t.kind = Kind::binary;
  t.op = op;
  t.operands.push_back(std::move(lhs));
  t.operands.push_back(std::move(rhs));
  return t;
}

bool Term::is_ground() const {
  switch (kind) {
    case Kind::variable:
    case Kind::anonymous:
      return false;
    case Kind::binary:
      return operands[0].is_ground() && operands[1].is_ground();
    default:
      return true;
  }
}

std::string to_string(const Signature& sig) {
  return sig.name + "/" + std::to_string(sig.arity);
}

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::eq: return "=";
    case CompareOp::ne: return "!=";
    case CompareOp::lt: return "<";
    case CompareOp::le: return "<=";
    case CompareOp::gt: return ">";
    case CompareOp::ge: return ">=";
  }
  return "?";
}

void collect_variables(const Term& term, std::vector<std::string>& out) {
  if (term.kind == Term::Kind::variable) {
    if (std::find(out.begin(), out.end(), term.name) == out.end()) out.push_back(term.name);
  } else if (term.kind == Term::Kind::binary) {
    collect_variables(term.operands[0], out);
    collect_variables(term.operands[1], out);
  }
}

void collect_variables(const Atom& atom, std::vector<std::string>& out) {
  for (const auto& arg : atom.args) collect_variables(arg, out);
}

// ---------------------------------------------------------------------------
// Ground values

std::strong_ordering Value::operator<=>(const Value& other) const {
  if (type != other.type) return type <=> other.type;
  if (type == Type::integer) return number <=> other.number;
  return text.compare(other.text) <=> 0;
}

std::string to_string(const Value& value) {
  switch (value.type) {
    case Value::Type::integer:
      return std::to_string(value.number);
    case Value::Type::symbol:
      return value.text;
    case Value::Type::string: {
      std::string out = "\"";
      for (char c : value.text) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
          out += "\\n";
          continue;
        }
        out += c;
      }
      return out + "\"";
    }
  }
  return {};
}

std::strong_ordering GroundAtom::operator<=>(const GroundAtom& other) const {
  if (auto c = predicate.compare(other.predicate) <=> 0; c != 0) return c;
  if (auto c = args.size() <=> other.args.size(); c != 0) return c;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (auto c = args[i] <=> other.args[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

std::string to_string(const GroundAtom& atom) {
  std::string out = atom.predicate;
  if (atom.args.empty()) return out;
  out += '(';
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    if (i) out += ',';
    out += to_string(atom.args[i]);
  }
  return out + ')';
}

bool StableModel::contains(const GroundAtom& atom) const {
  return std::binary_search(atoms.begin(), atoms.end(), atom);
}

// ---------------------------------------------------------------------------
// Outcome messages

namespace {

std::string location_suffix(const SourceSpan& span) {
  return " @ " + std::to_string(span.line) + ":" + std::to_string(span.column);
}

}  // namespace

std::string ParseError::message() const { return "PARSE: " + detail + location_suffix(at); }

std::string UnsafeVariable::message() const {
  return "UNSAFE: unsafe variable '" + variable + "' in rule '" + rule_text + "'" + location_suffix(at);
}

std::string GroundError::message() const { return "GROUND: " + detail + location_suffix(at); }

std::string Unstratifiable::message() const {
  return "UNSTRATIFIABLE: cycle through negation " + cycle + location_suffix(at);
}

std::string Unsatisfiable::message() const {
  return "UNSAT: integrity constraint violated '" + constraint + "'" + location_suffix(at);
}

std::string_view to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::model: return "model";
    case OutcomeKind::unsatisfiable: return "unsatisfiable";
    case OutcomeKind::parse_error: return "parse_error";
    case OutcomeKind::unsafe_variable: return "unsafe_variable";
    case OutcomeKind::ground_error: return "ground_error";
    case OutcomeKind::unstratifiable: return "unstratifiable";
  }
  return "?";
}

std::string SolverOutcome::message() const {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, StableModel>) {
          return "MODEL: " + std::to_string(v.atoms.size()) + " atoms";
        } else {
          return v.message();
        }
      },
      value);
}

}  // namespace spasp::asp
