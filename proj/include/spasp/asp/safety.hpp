#pragma once

#include "spasp/asp/outcome.hpp"
#include "spasp/asp/program.hpp"

#include <optional>

namespace spasp::asp {

/// A variable is bound when it is a plain argument of a positive,
/// non-conditional body atom, or is assigned by `V = expr` with expr bound.
/// Head, negated, comparison and conditional-head variables must be bound
/// (conditionals may also bind through their own condition atoms).
/// Anonymous variables are fine in positive atoms and under `not`.
///
/// Returns the first violation in statement order, or nullopt.
std::optional<UnsafeVariable> check_safety(const Program& program);

}  // namespace spasp::asp
