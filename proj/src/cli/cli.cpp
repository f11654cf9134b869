#include "spasp/cli/cli.hpp"

#include "spasp/asp/parser.hpp"
#include "spasp/asp/safety.hpp"
#include "spasp/asp/solver.hpp"
#include "spasp/eval/dataset.hpp"
#include "spasp/eval/report.hpp"
#include "spasp/pipeline/pipeline.hpp"
#include "spasp/spatial/stepgame_synth.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace spasp::cli {

namespace {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string env(const char* name, std::string fallback = {}) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

struct ProgramOptions {
  std::string file;
  std::int64_t bound = 100;
  std::size_t ceiling = 1'000'000;

  asp::GroundOptions ground() const { return {bound, ceiling}; }
};

void add_program_options(CLI::App* cmd, ProgramOptions& o) {
  cmd->add_option("file", o.file, "ASP program ('-' reads stdin)")->required();
  cmd->add_option("--bound", o.bound, "Derived integers must lie in [-bound, bound]")->capture_default_str();
  cmd->add_option("--ceiling", o.ceiling, "Grounding instantiation ceiling")->capture_default_str();
}

struct BackendOptions {
  std::string backend;
  std::string transcript;
  std::string mock_rules;
  std::string mock_response;
  std::string base_url;
  int max_retries = 3;
  int timeout_s = 120;
  std::string model = "gpt-4o-mini";
  double temperature = 0.0;
  int max_tokens = 1024;
};

void add_backend_options(CLI::App* cmd, BackendOptions& o, const std::string& default_backend) {
  o.backend = default_backend;
  cmd->add_option("--backend", o.backend, "live, replay or mock")
      ->check(CLI::IsMember({"live", "replay", "mock"}))
      ->capture_default_str();
  cmd->add_option("--transcript", o.transcript, "Transcript to replay (NDJSON)");
  cmd->add_option("--mock-rules", o.mock_rules, "Mock rules file (NDJSON of match/index + response)");
  cmd->add_option("--mock-response", o.mock_response, "Fixed mock response for every call");
  cmd->add_option("--base-url", o.base_url, "Live endpoint; defaults to $LLM_BASE_URL");
  cmd->add_option("--max-retries", o.max_retries, "Live retries on 429/5xx/connection errors")->capture_default_str();
  cmd->add_option("--timeout", o.timeout_s, "Live request timeout in seconds")->capture_default_str();
  cmd->add_option("--model", o.model, "Model id")->capture_default_str();
  cmd->add_option("--temperature", o.temperature)->capture_default_str();
  cmd->add_option("--max-tokens", o.max_tokens)->capture_default_str();
}

std::shared_ptr<llm::Backend> make_backend(const BackendOptions& o) {
  if (o.backend == "live") {
    llm::LiveConfig c;
    c.base_url = o.base_url.empty() ? env("LLM_BASE_URL", "https://api.openai.com/v1") : o.base_url;
    c.api_key = env("LLM_API_KEY");
    if (c.api_key.empty()) throw ConfigError("live backend needs the LLM_API_KEY environment variable");
    c.max_retries = o.max_retries;
    c.timeout = std::chrono::seconds(o.timeout_s);
    return std::make_shared<llm::LiveBackend>(std::move(c));
  }
  if (o.backend == "replay") {
    if (o.transcript.empty()) throw ConfigError("replay backend needs --transcript");
    return std::make_shared<llm::ReplayBackend>(llm::Transcript::load(o.transcript));
  }
  if (!o.mock_rules.empty()) return llm::MockBackend::from_rules(read_file(o.mock_rules));
  if (!o.mock_response.empty()) {
    return std::make_shared<llm::MockBackend>(
        [text = o.mock_response](const llm::MockCall&) -> std::optional<std::string> { return text; });
  }
  throw ConfigError("mock backend needs --mock-rules or --mock-response");
}

void print_failure(const asp::SolverOutcome& outcome, std::ostream& out) {
  out << pipeline::to_string(pipeline::classify_outcome(outcome, {})) << '\n' << outcome.message() << '\n';
}

bool shown(const asp::Program& program, const asp::GroundAtom& atom) {
  bool any = false;
  for (const auto& s : program.shows) {
    if (!s.signature) continue;
    any = true;
    if (*s.signature == atom.signature()) return true;
  }
  return !any;
}

int cmd_solve(const ProgramOptions& o, std::ostream& out) {
  std::string text = read_file(o.file);
  asp::SolverOutcome outcome = asp::evaluate(text, o.ground());
  if (!outcome.has_model()) {
    print_failure(outcome, out);
    return kExitFailed;
  }
  auto parsed = asp::parse_program(text);
  const asp::Program& program = std::get<asp::Program>(parsed);
  for (const auto& atom : outcome.model().atoms) {
    if (shown(program, atom)) out << asp::to_string(atom) << '\n';
  }
  return kExitOk;
}

int cmd_ground(const ProgramOptions& o, std::ostream& out) {
  std::string text = read_file(o.file);
  auto parsed = asp::parse_program(text);
  if (auto* e = std::get_if<asp::ParseError>(&parsed)) {
    print_failure({*e}, out);
    return kExitFailed;
  }
  const asp::Program& program = std::get<asp::Program>(parsed);
  if (auto unsafe = asp::check_safety(program)) {
    print_failure({*unsafe}, out);
    return kExitFailed;
  }
  auto grounded = asp::ground(program, o.ground());
  if (auto* e = std::get_if<asp::GroundError>(&grounded)) {
    print_failure({*e}, out);
    return kExitFailed;
  }
  out << asp::print_ground_program(std::get<asp::GroundProgram>(grounded));
  return kExitOk;
}

int cmd_check(const ProgramOptions& o, std::ostream& out) {
  asp::SolverOutcome outcome = asp::evaluate(read_file(o.file), o.ground());
  if (!outcome.has_model()) {
    print_failure(outcome, out);
    return kExitFailed;
  }
  out << "ok\n" << outcome.message() << '\n';
  return kExitOk;
}

struct PipelineOptions {
  std::string dataset;
  std::string data;
  int synthetic = 0;
  std::vector<int> hops;
  std::size_t per_hop = 300;
  std::size_t per_type = 55;
  std::size_t limit = 0;
  std::uint64_t seed = eval::kDefaultSeed;
  std::string strategy = "asp";
  int max_iterations = 3;
  std::int64_t bound = 0;
  std::string out = "out";
  std::string record;
  std::string knowledge;
  std::string synonyms;
  std::string templates;
  BackendOptions backend;
};

std::vector<eval::Example> load_examples(const PipelineOptions& o, spatial::Dataset dataset) {
  std::set<int> hops(o.hops.begin(), o.hops.end());
  if (hops.empty()) {
    for (int k = 1; k <= 10; ++k) hops.insert(k);
  }
  std::vector<eval::Example> examples;
  if (o.synthetic > 0) {
    if (dataset != spatial::Dataset::stepgame) throw ConfigError("--synthetic only generates StepGame stories");
    examples = eval::examples_from_synth(
        spatial::synth_stepgame(*hops.begin(), *hops.rbegin(), o.synthetic, o.seed));
    std::erase_if(examples, [&](const eval::Example& e) { return !hops.count(*e.hop); });
  } else if (o.data.empty()) {
    throw ConfigError("pipeline needs --data or --synthetic");
  } else if (dataset == spatial::Dataset::stepgame) {
    examples = eval::load_stepgame(o.data, hops, o.per_hop, o.seed);
  } else {
    examples = eval::load_sparqa(o.data, o.per_type, o.seed);
  }
  if (o.limit > 0 && examples.size() > o.limit) examples.resize(o.limit);
  return examples;
}

int cmd_pipeline(const PipelineOptions& o, int jobs, std::ostream& out) {
  auto dataset = spatial::parse_dataset(o.dataset);
  if (!dataset) throw ConfigError("unknown dataset '" + o.dataset + "' (stepgame or sparqa)");
  auto strategy = pipeline::parse_strategy(o.strategy);
  if (!strategy) throw ConfigError("unknown strategy '" + o.strategy + "'");

  std::vector<eval::Example> examples = load_examples(o, *dataset);

  pipeline::PipelineConfig config;
  config.max_iterations = o.max_iterations;
  if (o.bound > 0) config.domain_bound = o.bound;
  config.model_id = o.backend.model;
  config.temperature = o.backend.temperature;
  config.max_tokens = o.backend.max_tokens;
  if (!o.knowledge.empty()) {
    (*dataset == spatial::Dataset::stepgame ? config.stepgame_knowledge : config.sparqa_knowledge) =
        read_file(o.knowledge);
  }
  std::optional<spatial::SynonymDictionary> synonyms;
  if (!o.synonyms.empty()) {
    synonyms = spatial::SynonymDictionary::parse_tsv(read_file(o.synonyms));
    (*dataset == spatial::Dataset::stepgame ? config.stepgame_synonyms : config.sparqa_synonyms) = &*synonyms;
  }
  std::optional<llm::PromptLibrary> library;
  if (!o.templates.empty()) library = llm::PromptLibrary::with_overrides(o.templates);
  std::shared_ptr<llm::TranscriptRecorder> recorder;
  if (!o.record.empty()) recorder = std::make_shared<llm::TranscriptRecorder>(o.record);

  llm::Gateway gateway(make_backend(o.backend), library ? &*library : nullptr, recorder);
  auto traces = pipeline::run_batch(examples, *strategy, gateway, config, jobs);
  auto report = eval::build_report(traces, examples, config.model_id);

  std::filesystem::create_directories(o.out);
  eval::write_examples(std::filesystem::path(o.out) / "examples.ndjson", examples);
  eval::write_report(o.out, report, &traces);
  out << eval::accuracy_csv(report);
  return kExitOk;
}

struct EvalOptions {
  std::string traces;
  std::string examples;
  std::string out;
  std::string model;
};

int cmd_eval(const EvalOptions& o, std::ostream& out) {
  std::filesystem::path traces_path(o.traces);
  std::filesystem::path dir = traces_path.parent_path();
  auto traces = eval::read_traces(traces_path);
  auto examples = eval::read_examples(o.examples.empty() ? dir / "examples.ndjson" : std::filesystem::path(o.examples));
  auto report = eval::build_report(traces, examples, o.model);
  eval::write_report(o.out.empty() ? dir : std::filesystem::path(o.out), report);
  out << eval::accuracy_csv(report);
  return kExitOk;
}

struct RecordOptions {
  std::vector<std::string> prompts;
  std::string transcript;
  BackendOptions backend;
};

int cmd_record(const RecordOptions& o, std::ostream& out) {
  auto recorder = std::make_shared<llm::TranscriptRecorder>(o.transcript, /*append=*/true);
  llm::Gateway gateway(make_backend(o.backend), nullptr, recorder);
  llm::CompletionParams params{o.backend.model, o.backend.temperature, o.backend.max_tokens};
  for (const auto& file : o.prompts) {
    auto c = gateway.complete_text(read_file(file), params);
    out << c.fingerprint << '\t' << c.text << '\n';
  }
  return kExitOk;
}

struct ReplayOptions {
  std::string transcript;
  std::string fingerprint;
  std::string prompt_file;
  std::string model = "gpt-4o-mini";
};

int cmd_replay(const ReplayOptions& o, std::ostream& out) {
  auto transcript = llm::Transcript::load(o.transcript);
  std::string fp = o.fingerprint;
  if (!o.prompt_file.empty()) fp = llm::fingerprint(o.model, read_file(o.prompt_file));
  if (fp.empty()) {
    for (const auto& e : transcript.entries()) {
      std::string first_line = e.prompt.substr(0, e.prompt.find('\n'));
      out << e.fingerprint << '\t' << e.model_id << '\t' << e.latency_ms << '\t' << first_line << '\n';
    }
    return kExitOk;
  }
  const auto* entry = transcript.find(fp);
  if (!entry) {
    out << "no entry for fingerprint " << fp << '\n';
    return kExitFailed;
  }
  out << entry->response << '\n';
  return kExitOk;
}

struct SynthOptions {
  int min_hop = 1;
  int max_hop = 10;
  int per_hop = 100;
  std::uint64_t seed = eval::kDefaultSeed;
  std::string out;
  bool facts = false;
};

int cmd_synth(const SynthOptions& o, std::ostream& out) {
  auto stories = spatial::synth_stepgame(o.min_hop, o.max_hop, o.per_hop, o.seed);
  std::ofstream file;
  if (!o.out.empty()) {
    file.open(o.out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + o.out);
  }
  std::ostream& sink = o.out.empty() ? out : file;
  if (o.facts) {
    for (const auto& s : stories) {
      sink << "% " << s.id << " answer " << spatial::label(s.answer) << '\n' << s.facts << '\n';
    }
  } else {
    for (const auto& ex : eval::examples_from_synth(stories)) sink << eval::example_to_json(ex) << '\n';
  }
  return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spatial question answering with LLM-generated ASP programs", "spasp"};
  app.set_config("--config", "", "TOML file with option values; command-line flags win");
  app.require_subcommand(1);
  int jobs = 0;
  app.add_option("--jobs,-j", jobs, "Worker threads for batch runs (0: OpenMP default)");

  ProgramOptions solve_o, ground_o, check_o;
  auto* solve = app.add_subcommand("solve", "Print the stable model, one atom per line");
  add_program_options(solve, solve_o);
  auto* ground = app.add_subcommand("ground", "Print the ground program");
  add_program_options(ground, ground_o);
  auto* check = app.add_subcommand("check", "Parse, check safety and stratification, solve");
  add_program_options(check, check_o);

  PipelineOptions pipe_o;
  auto* pipe = app.add_subcommand("pipeline", "Run a strategy over a dataset and write traces and reports");
  pipe->add_option("dataset", pipe_o.dataset, "stepgame or sparqa")->required();
  pipe->add_option("--data", pipe_o.data, "StepGame directory (qa<k>_test.json) or SparQA file");
  pipe->add_option("--synthetic", pipe_o.synthetic, "Generate N StepGame stories per hop instead of loading");
  pipe->add_option("--hops", pipe_o.hops, "StepGame hops, e.g. 1,2,3")->delimiter(',')->check(CLI::Range(1, 10));
  pipe->add_option("--per-hop", pipe_o.per_hop, "StepGame sample per hop (0: all)")->capture_default_str();
  pipe->add_option("--per-type", pipe_o.per_type, "SparQA sample per question type (0: all)")->capture_default_str();
  pipe->add_option("--limit", pipe_o.limit, "Keep only the first N examples");
  pipe->add_option("--seed", pipe_o.seed, "Sampling seed")->capture_default_str();
  pipe->add_option("--strategy", pipe_o.strategy, "direct, facts-rules or asp")
      ->check(CLI::IsMember({"direct", "facts-rules", "facts_rules", "facts+rules", "asp"}))
      ->capture_default_str();
  pipe->add_option("--max-iterations", pipe_o.max_iterations, "Solver feedback rounds")
      ->check(CLI::Range(1, 100))
      ->capture_default_str();
  pipe->add_option("--bound", pipe_o.bound, "Integer domain bound (default: hop + 1 for StepGame, else 100)");
  pipe->add_option("--out", pipe_o.out, "Output directory")->capture_default_str();
  pipe->add_option("--record", pipe_o.record, "Write every completion to this transcript");
  pipe->add_option("--knowledge", pipe_o.knowledge, "Replacement knowledge program");
  pipe->add_option("--synonyms", pipe_o.synonyms, "Replacement synonym dictionary (TSV)");
  pipe->add_option("--templates", pipe_o.templates, "Directory of <template>.txt overrides");
  add_backend_options(pipe, pipe_o.backend, "replay");

  EvalOptions eval_o;
  auto* evalc = app.add_subcommand("eval", "Rebuild reports from traces.ndjson");
  evalc->add_option("traces", eval_o.traces, "traces.ndjson")->required()->check(CLI::ExistingFile);
  evalc->add_option("--examples", eval_o.examples, "examples.ndjson (default: next to the traces)");
  evalc->add_option("--out", eval_o.out, "Report directory (default: next to the traces)");
  evalc->add_option("--model", eval_o.model, "Model id for the report rows");

  RecordOptions record_o;
  auto* record = app.add_subcommand("record", "Send prompt files to a backend and append to a transcript");
  record->add_option("output", record_o.transcript, "Transcript to append to")->required();
  record->add_option("prompts", record_o.prompts, "Prompt files ('-' reads stdin)")->required();
  add_backend_options(record, record_o.backend, "live");

  ReplayOptions replay_o;
  auto* replay = app.add_subcommand("replay", "List a transcript or print a recorded response");
  replay->add_option("transcript", replay_o.transcript)->required()->check(CLI::ExistingFile);
  replay->add_option("--fingerprint", replay_o.fingerprint, "Print the response for this fingerprint");
  replay->add_option("--prompt-file", replay_o.prompt_file, "Print the response recorded for this prompt");
  replay->add_option("--model", replay_o.model, "Model id used with --prompt-file")->capture_default_str();

  SynthOptions synth_o;
  auto* synth = app.add_subcommand("synth", "Generate StepGame-style stories with known answers");
  synth->add_option("--min-hop", synth_o.min_hop)->check(CLI::Range(1, 25))->capture_default_str();
  synth->add_option("--max-hop", synth_o.max_hop)->check(CLI::Range(1, 25))->capture_default_str();
  synth->add_option("--per-hop", synth_o.per_hop)->capture_default_str();
  synth->add_option("--seed", synth_o.seed)->capture_default_str();
  synth->add_option("--out", synth_o.out, "Output file (default: stdout)");
  synth->add_flag("--facts", synth_o.facts, "Emit the ASP facts instead of example records");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitError;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_o, out);
    if (ground->parsed()) return cmd_ground(ground_o, out);
    if (check->parsed()) return cmd_check(check_o, out);
    if (pipe->parsed()) return cmd_pipeline(pipe_o, jobs, out);
    if (evalc->parsed()) return cmd_eval(eval_o, out);
    if (record->parsed()) return cmd_record(record_o, out);
    if (replay->parsed()) return cmd_replay(replay_o, out);
    if (synth->parsed()) return cmd_synth(synth_o, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace spasp::cli
