#pragma once

#include "spasp/eval/example.hpp"
#include "spasp/spatial/stepgame_synth.hpp"

#include <cstdint>
#include <filesystem>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace spasp::eval {

inline constexpr std::uint64_t kDefaultSeed = 42;

/// Malformed dataset content; the message names the file and record.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `k` distinct indices from [0, n), ascending. Same seed, same sample.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, std::uint64_t seed);

/// `dir` holds the per-hop files qa<k>_test.json, each an object of records
/// {"story": [sentences] | text, "question", "label", "k_hop"?}. Records are
/// sampled per hop; per_hop 0 keeps all. Ids are "k<hop>-<record key>".
std::vector<Example> load_stepgame(const std::filesystem::path& dir, const std::set<int>& hops,
                                   std::size_t per_hop, std::uint64_t seed = kDefaultSeed);

/// SpartQA layout ({"data": [{"story", "questions": [{"q_id", "question",
/// "q_type", "candidate_answers", "answer"}]}]}) or a flat array of
/// {"id", "context", "question", "qtype", "choices", "answer"}. Stratified
/// per question type; per_type 0 keeps all.
std::vector<Example> load_sparqa(const std::filesystem::path& file, std::size_t per_type,
                                 std::uint64_t seed = kDefaultSeed);

/// Synthetic stories as StepGame examples (choices left empty).
std::vector<Example> examples_from_synth(const std::vector<spatial::SynthStory>& stories);

/// One JSON object per line, for the pipeline output directory.
std::string example_to_json(const Example& example);
Example example_from_json(std::string_view line);
std::vector<Example> read_examples(const std::filesystem::path& ndjson);
void write_examples(const std::filesystem::path& ndjson, const std::vector<Example>& examples);

}  // namespace spasp::eval
