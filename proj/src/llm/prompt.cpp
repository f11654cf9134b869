#include "spasp/llm/prompt.hpp"

#include "spasp/assets.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace spasp::llm {

namespace {

constexpr std::array<std::string_view, 6> kNames = {
    "direct",           "facts_gen_stepgame",  "facts_gen_sparqa",
    "refine_with_error", "facts_rules_extract", "facts_rules_reason",
};

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Calls on_text for literal runs and on_var for each {{name}}.
template <typename Text, typename Var>
void scan(std::string_view text, Text on_text, Var on_var) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t open = text.find("{{", pos);
    if (open == std::string_view::npos) break;
    std::size_t close = text.find("}}", open + 2);
    if (close == std::string_view::npos) break;
    std::string_view name = text.substr(open + 2, close - open - 2);
    bool valid = !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
    if (!valid) {
      on_text(text.substr(pos, open + 2 - pos));
      pos = open + 2;
      continue;
    }
    on_text(text.substr(pos, open - pos));
    on_var(std::string(name));
    pos = close + 2;
  }
  on_text(text.substr(pos));
}

}  // namespace

std::string_view to_string(TemplateId id) { return kNames[static_cast<std::size_t>(id)]; }

std::optional<TemplateId> parse_template_id(std::string_view text) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == text) return static_cast<TemplateId>(i);
  }
  return std::nullopt;
}

MissingVariable::MissingVariable(TemplateId id, std::string name)
    : std::runtime_error("template '" + std::string(to_string(id)) + "' has no binding for {{" + name + "}}"),
      name_(std::move(name)) {}

const PromptLibrary& PromptLibrary::builtin() {
  static const PromptLibrary library = [] {
    PromptLibrary lib;
    for (TemplateId id : kTemplateIds) {
      lib.templates_[id] = std::string(asset("templates/" + std::string(to_string(id)) + ".txt"));
    }
    return lib;
  }();
  return library;
}

PromptLibrary PromptLibrary::with_overrides(const std::filesystem::path& dir) {
  PromptLibrary lib = builtin();
  for (TemplateId id : kTemplateIds) {
    std::filesystem::path file = dir / (std::string(to_string(id)) + ".txt");
    std::ifstream in(file, std::ios::binary);
    if (!in) continue;
    std::ostringstream buf;
    buf << in.rdbuf();
    lib.templates_[id] = buf.str();
  }
  return lib;
}

std::string_view PromptLibrary::source(TemplateId id) const { return templates_.at(id); }

std::string PromptLibrary::render(const PromptRequest& request) const {
  std::string out;
  scan(
      source(request.template_id), [&](std::string_view t) { out += t; },
      [&](const std::string& name) {
        auto it = request.variables.find(name);
        if (it == request.variables.end()) throw MissingVariable(request.template_id, name);
        out += it->second;
      });
  return out;
}

std::string_view PromptLibrary::fewshot(spatial::Dataset dataset, std::string_view qtype) const {
  if (dataset == spatial::Dataset::stepgame) return asset("fewshot/stepgame.txt");
  std::string key = lowercase(qtype.empty() ? "fr" : qtype);
  return asset("fewshot/sparqa_" + key + ".txt");
}

std::string_view PromptLibrary::rules(spatial::Dataset dataset) const {
  return asset(dataset == spatial::Dataset::stepgame ? "rules/stepgame.txt" : "rules/sparqa.txt");
}

std::string_view PromptLibrary::predicates(spatial::Dataset dataset) const {
  return asset(dataset == spatial::Dataset::stepgame ? "rules/stepgame_predicates.txt"
                                                     : "rules/sparqa_predicates.txt");
}

std::vector<std::string> placeholders(std::string_view text) {
  std::vector<std::string> out;
  scan(
      text, [](std::string_view) {},
      [&](const std::string& name) {
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
      });
  return out;
}

std::string render_prompt(const PromptRequest& request) { return PromptLibrary::builtin().render(request); }

}  // namespace spasp::llm
