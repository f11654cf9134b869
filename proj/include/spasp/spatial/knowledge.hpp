#pragma once

#include "spasp/asp/program.hpp"
#include "spasp/spatial/relation.hpp"

#include <string_view>

namespace spasp::spatial {

/// Built-in rule library text (assets/knowledge/<dataset>.lp).
std::string_view knowledge_text(Dataset dataset);

/// Parsed forms of the built-in libraries.
const asp::Program& stepgame_knowledge();
const asp::Program& sparqa_knowledge();

/// Predicate whose atoms carry the answer: answer/1 for StepGame (derived by
/// the library), query/N for SparQA (written by the model).
std::string_view answer_predicate(Dataset dataset);

}  // namespace spasp::spatial
