#include "spasp/pipeline/pipeline.hpp"

#include "spasp/asp/parser.hpp"
#include "spasp/spatial/knowledge.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace spasp::pipeline {

using nlohmann::ordered_json;
using spatial::Dataset;

namespace {

constexpr std::array<std::string_view, 7> kErrorNames = {
    "parse", "ground", "unstratifiable", "unsat", "no_result", "gateway", "none",
};
constexpr std::array<std::string_view, 3> kStrategyNames = {"direct", "facts_rules", "asp"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  while (true) {
    std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// A line that opens an ASP statement: a lowercase predicate followed by '(',
// '.', or ':-', a constraint, a directive or a comment.
bool starts_statement(std::string_view line) {
  std::string_view t = trim(line);
  if (t.empty()) return false;
  if (t.starts_with(":-") || t.front() == '%' || t.front() == '#') return true;
  if (!std::islower(static_cast<unsigned char>(t.front()))) return false;
  std::size_t i = 0;
  while (i < t.size() && is_ident_char(t[i])) ++i;
  while (i < t.size() && (t[i] == ' ' || t[i] == '\t')) ++i;
  if (i == t.size()) return false;
  return t[i] == '(' || t[i] == '.' || t.substr(i).starts_with(":-");
}

// Code part of a line with any % comment removed (quotes respected).
std::string_view code_part(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
    if (!quoted && line[i] == '%') return line.substr(0, i);
  }
  return line;
}

std::vector<std::string_view> fenced_lines(std::string_view text) {
  std::vector<std::string_view> out;
  bool inside = false;
  for (std::string_view line : split_lines(text)) {
    if (trim(line).starts_with("```")) {
      inside = !inside;
      continue;
    }
    if (inside) out.push_back(line);
  }
  return out;
}

const spatial::SynonymDictionary& dictionary_for(const eval::Example& ex, const PipelineConfig& config) {
  const spatial::SynonymDictionary* d =
      ex.dataset == Dataset::stepgame ? config.stepgame_synonyms : config.sparqa_synonyms;
  return d ? *d : spatial::SynonymDictionary::builtin(ex.dataset);
}

std::string_view knowledge_for(const eval::Example& ex, const PipelineConfig& config) {
  const auto& override_text = ex.dataset == Dataset::stepgame ? config.stepgame_knowledge : config.sparqa_knowledge;
  return override_text ? std::string_view(*override_text) : spatial::knowledge_text(ex.dataset);
}

std::int64_t domain_bound_for(const eval::Example& ex, const PipelineConfig& config) {
  if (config.domain_bound) return *config.domain_bound;
  if (ex.dataset == Dataset::stepgame && ex.hop) return *ex.hop + 1;
  return 100;
}

bool is_yn(const eval::Example& ex) { return ex.dataset == Dataset::sparqa && ex.qtype == eval::QType::YN; }
bool is_co(const eval::Example& ex) { return ex.dataset == Dataset::sparqa && ex.qtype == eval::QType::CO; }

std::string render_choices(const eval::Example& ex) {
  std::vector<std::string> items = ex.choices;
  if (items.empty() && ex.dataset == Dataset::stepgame) {
    for (auto r : spatial::kStepRelations) items.emplace_back(spatial::label(r));
  }
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += "; ";
    if (is_co(ex)) out += std::to_string(i) + ": ";
    out += items[i];
  }
  return out;
}

std::string qtype_text(const eval::Example& ex) {
  return ex.qtype ? std::string(eval::to_string(*ex.qtype)) : std::string("FR");
}

llm::PromptRequest make_request(llm::TemplateId id, const PipelineConfig& config) {
  llm::PromptRequest req;
  req.template_id = id;
  req.model_id = config.model_id;
  req.temperature = config.temperature;
  req.max_tokens = config.max_tokens;
  return req;
}

// Any failure to obtain a completion (including template errors) ends the
// example with the gateway class; the batch goes on.
bool call(llm::Gateway& gateway, const llm::PromptRequest& request, PipelineTrace& trace, llm::Completion& out) {
  ++trace.gateway_calls;
  try {
    out = gateway.complete(request);
  } catch (const std::exception& err) {
    trace.final_error = ErrorClass::gateway;
    trace.gateway_error = err.what();
    trace.answers = {std::string(spatial::kUnknownPrefix) + "gateway"};
    return false;
  }
  trace.latency_ms += out.latency_ms;
  return true;
}

PipelineTrace start_trace(const eval::Example& ex, Strategy strategy) {
  PipelineTrace t;
  t.example_id = ex.id;
  t.strategy = strategy;
  t.dataset = ex.dataset;
  return t;
}

std::string_view hint_for(ErrorClass error, const eval::Example& ex) {
  switch (error) {
    case ErrorClass::parse:
      return "Hint: check the syntax at the reported position. Every fact and rule ends with a period and "
             "arguments are separated by commas.";
    case ErrorClass::ground:
      return "Hint: every variable of a rule must also occur in a positive body atom, and arithmetic only "
             "works on integers.";
    case ErrorClass::unstratifiable:
      return "Hint: a predicate must not depend on itself through 'not'. Break the cycle shown above.";
    case ErrorClass::unsat:
      return "Hint: a constraint contradicts the facts. Correct the facts or drop the constraint.";
    case ErrorClass::no_result:
      return ex.dataset == Dataset::stepgame
                 ? "Hint: no answer was derived. query(X, Y) must name two agents linked by is facts, with "
                   "relations spelled as listed."
                 : "Hint: no query atom was derived. The query rules must use the same predicates and constants "
                   "as the facts.";
    case ErrorClass::gateway:
    case ErrorClass::none:
      break;
  }
  return {};
}

std::string value_text(const asp::Value& v) {
  return v.type == asp::Value::Type::integer ? std::to_string(v.number) : v.text;
}

// Longest dictionary phrases found as whole words in `text`, leftmost first.
std::vector<std::string> scan_phrases(const std::string& key, const std::map<std::string, std::string>& phrases) {
  std::vector<std::pair<std::size_t, std::string>> found;
  std::vector<bool> used(key.size(), false);
  std::vector<std::pair<std::string, std::string>> sorted(phrases.begin(), phrases.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
  for (const auto& [phrase, label] : sorted) {
    if (phrase.size() < 2) continue;
    std::size_t pos = 0;
    while ((pos = key.find(phrase, pos)) != std::string::npos) {
      std::size_t end = pos + phrase.size();
      bool bounded = (pos == 0 || key[pos - 1] == ' ') && (end == key.size() || key[end] == ' ');
      bool free = std::none_of(used.begin() + static_cast<std::ptrdiff_t>(pos),
                               used.begin() + static_cast<std::ptrdiff_t>(end), [](bool b) { return b; });
      if (bounded && free) {
        std::fill(used.begin() + static_cast<std::ptrdiff_t>(pos), used.begin() + static_cast<std::ptrdiff_t>(end),
                  true);
        found.emplace_back(pos, label);
      }
      pos = end;
    }
  }
  std::sort(found.begin(), found.end());
  std::vector<std::string> out;
  for (auto& [pos, label] : found) {
    if (std::find(out.begin(), out.end(), label) == out.end()) out.push_back(std::move(label));
  }
  return out;
}

bool admissible(const std::string& label, const eval::Example& ex) {
  if (ex.dataset == Dataset::stepgame) return spatial::parse_step_relation(label).has_value();
  switch (ex.qtype.value_or(eval::QType::FR)) {
    case eval::QType::FR:
      return spatial::parse_sparqa_relation(label).has_value();
    case eval::QType::YN:
      return label == "yes" || label == "no" || label == "dk";
    case eval::QType::FB:
      return !spatial::parse_sparqa_relation(label) && label != "yes" && label != "no";
    case eval::QType::CO:
      return true;
  }
  return false;
}

std::optional<std::string> match_choice(std::string_view token, const eval::Example& ex) {
  std::string key = spatial::normalization_key(token);
  if (key.empty()) return std::nullopt;
  if (std::all_of(key.begin(), key.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    return key;
  }
  std::optional<std::size_t> best;
  std::size_t best_len = 0;
  for (std::size_t i = 0; i < ex.choices.size(); ++i) {
    std::string ck = spatial::normalization_key(ex.choices[i]);
    if (ck == key) return std::to_string(i);
    if (!ck.empty() && key.find(ck) != std::string::npos && ck.size() > best_len) {
      best = i;
      best_len = ck.size();
    }
  }
  if (best) return std::to_string(*best);
  return std::nullopt;
}

}  // namespace

std::string_view to_string(ErrorClass c) { return kErrorNames[static_cast<std::size_t>(c)]; }

std::optional<ErrorClass> parse_error_class(std::string_view text) {
  for (std::size_t i = 0; i < kErrorNames.size(); ++i) {
    if (kErrorNames[i] == text) return static_cast<ErrorClass>(i);
  }
  return std::nullopt;
}

std::string_view to_string(Strategy s) { return kStrategyNames[static_cast<std::size_t>(s)]; }

std::optional<Strategy> parse_strategy(std::string_view text) {
  if (text == "facts+rules" || text == "facts-rules") return Strategy::facts_rules;
  for (std::size_t i = 0; i < kStrategyNames.size(); ++i) {
    if (kStrategyNames[i] == text) return static_cast<Strategy>(i);
  }
  return std::nullopt;
}

ErrorClass classify_outcome(const asp::SolverOutcome& outcome, const asp::AnswerSet& answers) {
  switch (outcome.kind()) {
    case asp::OutcomeKind::parse_error:
      return ErrorClass::parse;
    case asp::OutcomeKind::unsafe_variable:
    case asp::OutcomeKind::ground_error:
      return ErrorClass::ground;
    case asp::OutcomeKind::unstratifiable:
      return ErrorClass::unstratifiable;
    case asp::OutcomeKind::unsatisfiable:
      return ErrorClass::unsat;
    case asp::OutcomeKind::model:
      return answers.empty() ? ErrorClass::no_result : ErrorClass::none;
  }
  return ErrorClass::none;
}

std::string sanitize_program(std::string_view response) {
  std::vector<std::string_view> lines =
      response.find("```") != std::string_view::npos ? fenced_lines(response) : split_lines(response);
  std::string out;
  bool open = false;
  for (std::string_view line : lines) {
    if (!open && !starts_statement(line)) continue;
    out.append(line);
    out.push_back('\n');
    std::string_view code = trim(code_part(line));
    if (!code.empty()) open = code.back() != '.';
  }
  return out;
}

std::vector<std::string> extract_labels(std::string_view response, const eval::Example& example,
                                        const spatial::SynonymDictionary& dictionary) {
  std::string text(trim(response));
  std::string low = lower(text);
  if (std::size_t pos = low.rfind("answer"); pos != std::string::npos) {
    std::string_view rest = std::string_view(text).substr(pos + 6);
    rest = trim(rest);
    if (lower(rest.substr(0, 3)) == "is ") rest = trim(rest.substr(3));
    while (!rest.empty() && (rest.front() == ':' || rest.front() == '-' || rest.front() == '*')) {
      rest = trim(rest.substr(1));
    }
    if (!rest.empty()) text = std::string(rest);
  }
  // The first non-empty line carries the answer.
  for (std::string_view line : split_lines(text)) {
    if (!trim(line).empty()) {
      text = std::string(trim(line));
      break;
    }
  }

  std::vector<std::string> tokens;
  {
    std::string buf;
    std::string low_text = lower(text);
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] == ',' || text[i] == ';') {
        tokens.push_back(buf);
        buf.clear();
      } else if (low_text.compare(i, 5, " and ") == 0) {
        tokens.push_back(buf);
        buf.clear();
        i += 4;
      } else {
        buf.push_back(text[i]);
      }
    }
    tokens.push_back(buf);
  }

  std::vector<std::string> labels;
  bool all_known = true;
  for (const std::string& tok : tokens) {
    if (trim(tok).empty()) continue;
    std::string label;
    if (is_co(example)) {
      auto idx = match_choice(tok, example);
      label = idx ? *idx : std::string(spatial::kUnknownPrefix) + spatial::normalization_key(tok);
    } else {
      label = spatial::normalize_answer(tok, example.dataset, &dictionary);
    }
    if (spatial::is_unknown(label)) all_known = false;
    if (std::find(labels.begin(), labels.end(), label) == labels.end()) labels.push_back(std::move(label));
  }
  if (all_known && !labels.empty()) return labels;

  std::map<std::string, std::string> phrases;
  if (is_co(example)) {
    for (std::size_t i = 0; i < example.choices.size(); ++i) {
      phrases.emplace(spatial::normalization_key(example.choices[i]), std::to_string(i));
    }
  } else {
    for (const auto& [key, label] : dictionary.entries()) {
      if (admissible(label, example)) phrases.emplace(key, label);
    }
  }
  std::string spaced = text;
  for (char& ch : spaced) {
    if (ch == ',' || ch == ';' || ch == '.' || ch == '!' || ch == '?' || ch == '(' || ch == ')') ch = ' ';
  }
  std::vector<std::string> scanned = scan_phrases(spatial::normalization_key(spaced), phrases);
  if (!scanned.empty()) return scanned;
  if (labels.empty()) labels.push_back(std::string(spatial::kUnknownPrefix));
  return labels;
}

asp::AnswerSet answer_tuples(const asp::StableModel& model, const eval::Example& example) {
  asp::AnswerSet tuples = asp::extract_answers(model, spatial::answer_predicate(example.dataset));
  if (is_yn(example)) {
    return {{asp::Value::symbol(tuples.empty() ? "no" : "yes")}};
  }
  return tuples;
}

std::vector<std::string> map_answers(const asp::AnswerSet& tuples, const eval::Example& example,
                                     const spatial::SynonymDictionary& dictionary) {
  std::vector<std::string> out;
  for (const auto& tuple : tuples) {
    std::string text;
    for (std::size_t i = 0; i < tuple.size(); ++i) {
      if (i) text += ",";
      text += value_text(tuple[i]);
    }
    std::string label;
    if (example.dataset == Dataset::stepgame) {
      auto rel = spatial::parse_step_relation(text);
      label = rel ? std::string(spatial::label(*rel)) : spatial::normalize_answer(text, example.dataset, &dictionary);
    } else if (is_co(example)) {
      auto idx = match_choice(text, example);
      label = idx ? *idx : std::string(spatial::kUnknownPrefix) + text;
    } else {
      label = spatial::normalize_answer(text, example.dataset, &dictionary);
    }
    if (std::find(out.begin(), out.end(), label) == out.end()) out.push_back(std::move(label));
  }
  return out;
}

PipelineTrace run_direct(const eval::Example& example, llm::Gateway& gateway, const PipelineConfig& config) {
  PipelineTrace trace = start_trace(example, Strategy::direct);
  auto req = make_request(llm::TemplateId::direct, config);
  req.variables = {{"context", example.context}, {"question", example.question}, {"choices", render_choices(example)}};
  llm::Completion c;
  if (!call(gateway, req, trace, c)) return trace;
  trace.stages.push_back({"direct", c.fingerprint, c.text});
  trace.answers = extract_labels(c.text, example, dictionary_for(example, config));
  return trace;
}

PipelineTrace run_facts_rules(const eval::Example& example, llm::Gateway& gateway, const PipelineConfig& config) {
  PipelineTrace trace = start_trace(example, Strategy::facts_rules);
  const auto& library = gateway.library();

  auto extract = make_request(llm::TemplateId::facts_rules_extract, config);
  extract.variables = {{"predicates", std::string(library.predicates(example.dataset))},
                       {"context", example.context},
                       {"question", example.question}};
  llm::Completion facts;
  if (!call(gateway, extract, trace, facts)) return trace;
  trace.stages.push_back({"extract", facts.fingerprint, facts.text});
  std::string cleaned = sanitize_program(facts.text);
  auto parsed = asp::parse_program(cleaned);
  trace.malformed_intermediate =
      std::holds_alternative<asp::ParseError>(parsed) || std::get<asp::Program>(parsed).rules.empty();

  // Passed on verbatim, malformed or not.
  auto reason = make_request(llm::TemplateId::facts_rules_reason, config);
  reason.variables = {{"facts", facts.text},
                      {"rules", std::string(library.rules(example.dataset))},
                      {"question", example.question},
                      {"choices", render_choices(example)}};
  llm::Completion answer;
  if (!call(gateway, reason, trace, answer)) return trace;
  trace.stages.push_back({"reason", answer.fingerprint, answer.text});
  trace.answers = extract_labels(answer.text, example, dictionary_for(example, config));
  return trace;
}

std::string refine_program(std::string_view program, ErrorClass error, std::string_view message,
                           const eval::Example& example, llm::Gateway& gateway, const PipelineConfig& config,
                           llm::Completion* raw) {
  auto req = make_request(llm::TemplateId::refine_with_error, config);
  req.variables = {{"program", std::string(program)},
                   {"error", std::string(message)},
                   {"hint", std::string(hint_for(error, example))},
                   {"context", example.context},
                   {"question", example.question}};
  llm::Completion c = gateway.complete(req);
  std::string revised = sanitize_program(c.text);
  if (raw) *raw = std::move(c);
  return revised;
}

PipelineTrace run_asp_pipeline(const eval::Example& example, llm::Gateway& gateway, const PipelineConfig& config) {
  PipelineTrace trace = start_trace(example, Strategy::asp);
  const auto& library = gateway.library();
  const auto& dictionary = dictionary_for(example, config);
  const std::string_view knowledge = knowledge_for(example, config);
  asp::GroundOptions options;
  options.domain_bound = domain_bound_for(example, config);
  options.instantiation_ceiling = config.instantiation_ceiling;

  llm::PromptRequest gen;
  if (example.dataset == Dataset::stepgame) {
    gen = make_request(llm::TemplateId::facts_gen_stepgame, config);
    gen.variables = {{"examples", std::string(library.fewshot(example.dataset))},
                     {"context", example.context},
                     {"question", example.question}};
  } else {
    gen = make_request(llm::TemplateId::facts_gen_sparqa, config);
    gen.variables = {{"examples", std::string(library.fewshot(example.dataset, qtype_text(example)))},
                     {"qtype", qtype_text(example)},
                     {"context", example.context},
                     {"question", example.question},
                     {"choices", render_choices(example)}};
  }
  llm::Completion c;
  if (!call(gateway, gen, trace, c)) return trace;

  const int max_iterations = std::max(1, config.max_iterations);
  for (int it = 0; it < max_iterations; ++it) {
    IterationRecord rec;
    rec.iteration = it;
    if (it > 0) {
      const IterationRecord& prev = trace.iterations.back();
      ++trace.gateway_calls;
      try {
        refine_program(prev.program, prev.error, prev.message, example, gateway, config, &c);
      } catch (const std::exception& err) {
        trace.final_error = ErrorClass::gateway;
        trace.gateway_error = err.what();
        trace.answers = {std::string(spatial::kUnknownPrefix) + "gateway"};
        return trace;
      }
      trace.latency_ms += c.latency_ms;
    }
    rec.response = c.text;
    rec.program = sanitize_program(c.text);

    std::string full = rec.program;
    full += '\n';
    full.append(knowledge);
    asp::SolverOutcome outcome = asp::evaluate(full, options);
    asp::AnswerSet tuples;
    if (outcome.has_model()) tuples = answer_tuples(outcome.model(), example);
    rec.outcome = outcome.kind();
    rec.error = classify_outcome(outcome, tuples);
    rec.message = rec.error == ErrorClass::no_result
                      ? "NO_RESULT: the model has no " + std::string(spatial::answer_predicate(example.dataset)) +
                            " atom"
                      : outcome.message();
    rec.answers = map_answers(tuples, example, dictionary);
    trace.iterations.push_back(rec);
    if (rec.error == ErrorClass::none) {
      trace.executable = true;
      trace.final_error = ErrorClass::none;
      trace.answers = rec.answers;
      return trace;
    }
  }
  trace.final_error = trace.iterations.back().error;
  trace.answers = {std::string(spatial::kUnknownPrefix) + std::string(to_string(trace.final_error))};
  return trace;
}

PipelineTrace run_example(Strategy strategy, const eval::Example& example, llm::Gateway& gateway,
                          const PipelineConfig& config) {
  switch (strategy) {
    case Strategy::direct:
      return run_direct(example, gateway, config);
    case Strategy::facts_rules:
      return run_facts_rules(example, gateway, config);
    case Strategy::asp:
      return run_asp_pipeline(example, gateway, config);
  }
  return start_trace(example, strategy);
}

std::vector<PipelineTrace> run_batch_serial(std::span<const eval::Example> examples, Strategy strategy,
                                            llm::Gateway& gateway, const PipelineConfig& config) {
  std::vector<PipelineTrace> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) out.push_back(run_example(strategy, ex, gateway, config));
  return out;
}

std::vector<PipelineTrace> run_batch(std::span<const eval::Example> examples, Strategy strategy,
                                     llm::Gateway& gateway, const PipelineConfig& config, int jobs) {
  std::vector<PipelineTrace> out(examples.size());
  const auto n = static_cast<std::ptrdiff_t>(examples.size());
#ifdef _OPENMP
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = run_example(strategy, examples[k], gateway, config);
  }
  (void)jobs;
  return out;
}

std::string trace_to_json(const PipelineTrace& t) {
  ordered_json j;
  j["example_id"] = t.example_id;
  j["strategy"] = to_string(t.strategy);
  j["dataset"] = spatial::to_string(t.dataset);
  j["answers"] = t.answers;
  j["executable"] = t.executable;
  j["error_class"] = to_string(t.final_error);
  j["gateway_calls"] = t.gateway_calls;
  j["latency_ms"] = t.latency_ms;
  j["malformed_intermediate"] = t.malformed_intermediate;
  j["gateway_error"] = t.gateway_error;
  ordered_json stages = ordered_json::array();
  for (const auto& s : t.stages) {
    ordered_json sj;
    sj["name"] = s.name;
    sj["fingerprint"] = s.fingerprint;
    sj["response"] = s.response;
    stages.push_back(std::move(sj));
  }
  j["stages"] = std::move(stages);
  ordered_json iterations = ordered_json::array();
  for (const auto& r : t.iterations) {
    ordered_json rj;
    rj["iteration"] = r.iteration;
    rj["outcome"] = asp::to_string(r.outcome);
    rj["error_class"] = to_string(r.error);
    rj["message"] = r.message;
    rj["answers"] = r.answers;
    rj["program"] = r.program;
    rj["response"] = r.response;
    iterations.push_back(std::move(rj));
  }
  j["iterations"] = std::move(iterations);
  return j.dump();
}

PipelineTrace trace_from_json(std::string_view line) {
  auto j = nlohmann::json::parse(line);
  PipelineTrace t;
  t.example_id = j.at("example_id").get<std::string>();
  auto strategy = parse_strategy(j.at("strategy").get<std::string>());
  auto dataset = spatial::parse_dataset(j.at("dataset").get<std::string>());
  auto error = parse_error_class(j.at("error_class").get<std::string>());
  if (!strategy || !dataset || !error) throw std::invalid_argument("trace: unknown strategy, dataset or error class");
  t.strategy = *strategy;
  t.dataset = *dataset;
  t.final_error = *error;
  t.answers = j.at("answers").get<std::vector<std::string>>();
  t.executable = j.at("executable").get<bool>();
  t.gateway_calls = j.at("gateway_calls").get<int>();
  t.latency_ms = j.at("latency_ms").get<double>();
  t.malformed_intermediate = j.value("malformed_intermediate", false);
  t.gateway_error = j.value("gateway_error", std::string());
  for (const auto& sj : j.value("stages", nlohmann::json::array())) {
    t.stages.push_back({sj.at("name").get<std::string>(), sj.at("fingerprint").get<std::string>(),
                        sj.at("response").get<std::string>()});
  }
  static const std::map<std::string, asp::OutcomeKind> kinds = {
      {"model", asp::OutcomeKind::model},
      {"unsatisfiable", asp::OutcomeKind::unsatisfiable},
      {"parse_error", asp::OutcomeKind::parse_error},
      {"unsafe_variable", asp::OutcomeKind::unsafe_variable},
      {"ground_error", asp::OutcomeKind::ground_error},
      {"unstratifiable", asp::OutcomeKind::unstratifiable},
  };
  for (const auto& rj : j.value("iterations", nlohmann::json::array())) {
    IterationRecord r;
    r.iteration = rj.at("iteration").get<int>();
    auto kind = kinds.find(rj.at("outcome").get<std::string>());
    auto cls = parse_error_class(rj.at("error_class").get<std::string>());
    if (kind == kinds.end() || !cls) throw std::invalid_argument("trace: bad iteration record");
    r.outcome = kind->second;
    r.error = *cls;
    r.message = rj.at("message").get<std::string>();
    r.answers = rj.at("answers").get<std::vector<std::string>>();
    r.program = rj.at("program").get<std::string>();
    r.response = rj.at("response").get<std::string>();
    t.iterations.push_back(std::move(r));
  }
  return t;
}

}  // namespace spasp::pipeline
