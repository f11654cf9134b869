#pragma once

#include "spasp/asp/outcome.hpp"
#include "spasp/asp/program.hpp"

#include <string>
#include <string_view>
#include <variant>

namespace spasp::asp {

using ParseResult = std::variant<Program, ParseError>;

/// Parses the Clingo-compatible text subset. Comments (`%` line and `%* *%`
/// block) are skipped. A predicate must keep one arity throughout the program.
ParseResult parse_program(std::string_view text);

std::string print_term(const Term& term);
std::string print_atom(const Atom& atom);
std::string print_literal(const Literal& literal);
std::string print_rule(const Rule& rule);

/// One statement per line; parse_program(print_program(p)) == p.
std::string print_program(const Program& program);

}  // namespace spasp::asp
