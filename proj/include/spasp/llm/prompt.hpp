#pragma once

#include "spasp/spatial/relation.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace spasp::llm {

enum class TemplateId : std::uint8_t {
  direct,
  facts_gen_stepgame,
  facts_gen_sparqa,
  refine_with_error,
  facts_rules_extract,
  facts_rules_reason,
};

inline constexpr std::array<TemplateId, 6> kTemplateIds = {
    TemplateId::direct,           TemplateId::facts_gen_stepgame,  TemplateId::facts_gen_sparqa,
    TemplateId::refine_with_error, TemplateId::facts_rules_extract, TemplateId::facts_rules_reason,
};

std::string_view to_string(TemplateId id);
std::optional<TemplateId> parse_template_id(std::string_view text);

struct PromptRequest {
  TemplateId template_id = TemplateId::direct;
  std::map<std::string, std::string> variables;
  std::string model_id;
  double temperature = 0.0;
  int max_tokens = 1024;
};

class MissingVariable : public std::runtime_error {
 public:
  MissingVariable(TemplateId id, std::string name);
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// Prompt templates with {{name}} placeholders plus the few-shot and rule
/// text blocks the pipeline binds into them.
class PromptLibrary {
 public:
  /// Everything under assets/.
  static const PromptLibrary& builtin();
  /// Built-in library with <id>.txt files from `dir` taking precedence.
  static PromptLibrary with_overrides(const std::filesystem::path& dir);

  std::string_view source(TemplateId id) const;
  /// Substitutes every placeholder; throws MissingVariable for the first
  /// unbound one. Extra variables are ignored.
  std::string render(const PromptRequest& request) const;

  /// Few-shot block for a dataset and (SparQA) question type, e.g. "FR".
  std::string_view fewshot(spatial::Dataset dataset, std::string_view qtype = {}) const;
  /// Natural-language statement of the knowledge rules (Facts+Rules).
  std::string_view rules(spatial::Dataset dataset) const;
  /// Predicate vocabulary description for fact extraction.
  std::string_view predicates(spatial::Dataset dataset) const;

 private:
  std::map<TemplateId, std::string> templates_;
};

/// Placeholder names in order of first appearance.
std::vector<std::string> placeholders(std::string_view text);

std::string render_prompt(const PromptRequest& request);

}  // namespace spasp::llm
