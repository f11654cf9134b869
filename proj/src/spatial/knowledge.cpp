#include "spasp/spatial/knowledge.hpp"

#include "spasp/asp/parser.hpp"
#include "spasp/assets.hpp"

#include <stdexcept>

namespace spasp::spatial {

namespace {

asp::Program parse_builtin(Dataset dataset) {
  auto parsed = asp::parse_program(knowledge_text(dataset));
  if (auto* err = std::get_if<asp::ParseError>(&parsed)) {
    throw std::logic_error("built-in " + std::string(to_string(dataset)) +
                           " knowledge: " + err->message());
  }
  return std::get<asp::Program>(std::move(parsed));
}

}  // namespace

std::string_view knowledge_text(Dataset dataset) {
  return asset(dataset == Dataset::stepgame ? "knowledge/stepgame.lp" : "knowledge/sparqa.lp");
}

const asp::Program& stepgame_knowledge() {
  static const asp::Program program = parse_builtin(Dataset::stepgame);
  return program;
}

const asp::Program& sparqa_knowledge() {
  static const asp::Program program = parse_builtin(Dataset::sparqa);
  return program;
}

std::string_view answer_predicate(Dataset dataset) {
  return dataset == Dataset::stepgame ? "answer" : "query";
}

}  // namespace spasp::spatial
