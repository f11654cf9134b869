#include "spasp/eval/dataset.hpp"

#include "spasp/spatial/synonyms.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <random>

namespace spasp::eval {

using nlohmann::json;
using nlohmann::ordered_json;
using spatial::Dataset;

namespace {

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& err) {
    throw SchemaError(path.filename().string() + ": " + err.what());
  }
}

std::string joined_text(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (!value.is_array()) throw std::invalid_argument("expected a string or a list of strings");
  std::string out;
  for (const auto& part : value) {
    if (!out.empty()) out += ' ';
    out += part.get<std::string>();
  }
  return out;
}

// Numeric keys in numeric order, then the rest.
std::vector<std::string> ordered_keys(const json& object) {
  std::vector<std::string> keys;
  for (auto it = object.begin(); it != object.end(); ++it) keys.push_back(it.key());
  auto numeric = [](const std::string& k) {
    return !k.empty() && k.size() < 18 &&
           std::all_of(k.begin(), k.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  std::stable_sort(keys.begin(), keys.end(), [&](const std::string& a, const std::string& b) {
    bool na = numeric(a), nb = numeric(b);
    if (na != nb) return na;
    if (na) return std::stoll(a) < std::stoll(b);
    return a < b;
  });
  return keys;
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
  throw std::invalid_argument("answer is neither a string nor an integer");
}

std::string gold_label(const json& answer, QType qtype, const std::vector<std::string>& choices) {
  const auto& dict = spatial::SynonymDictionary::builtin(Dataset::sparqa);
  if (qtype == QType::CO) {
    if (answer.is_number_integer()) {
      auto i = answer.get<long long>();
      if (i < 0 || static_cast<std::size_t>(i) >= choices.size()) {
        throw std::invalid_argument("answer index " + std::to_string(i) + " out of range");
      }
      return std::to_string(i);
    }
    std::string key = spatial::normalization_key(scalar_text(answer));
    for (std::size_t i = 0; i < choices.size(); ++i) {
      if (spatial::normalization_key(choices[i]) == key) return std::to_string(i);
    }
    auto digit = [](char c) { return c >= '0' && c <= '9'; };
    if (choices.empty() && !key.empty() && std::all_of(key.begin(), key.end(), digit)) return key;
    throw std::invalid_argument("answer '" + scalar_text(answer) + "' is not among the candidates");
  }
  std::string text = scalar_text(answer);
  if (answer.is_number_integer() && qtype == QType::FR) {
    auto i = answer.get<long long>();
    if (i < 0 || static_cast<std::size_t>(i) >= choices.size()) {
      throw std::invalid_argument("answer index " + text + " out of range");
    }
    text = choices[static_cast<std::size_t>(i)];
  }
  std::string label = spatial::normalize_answer(text, Dataset::sparqa, &dict);
  if (!spatial::is_unknown(label)) return label;
  if (qtype == QType::FB) {
    std::string key = spatial::normalization_key(text);
    if (key.rfind("block ", 0) == 0) key.erase(0, 6);
    if (!key.empty()) return key;
  }
  throw std::invalid_argument("answer '" + text + "' is not a known label");
}

LabelSet gold_set(const json& answer, QType qtype, const std::vector<std::string>& choices) {
  LabelSet gold;
  if (answer.is_array()) {
    for (const auto& a : answer) gold.insert(gold_label(a, qtype, choices));
  } else {
    gold.insert(gold_label(answer, qtype, choices));
  }
  if (gold.empty()) throw std::invalid_argument("empty answer");
  return gold;
}

std::vector<std::string> string_list(const json& record, const char* field) {
  std::vector<std::string> out;
  if (!record.contains(field) || record[field].is_null()) return out;
  for (const auto& v : record.at(field)) out.push_back(scalar_text(v));
  return out;
}

QType qtype_of(const json& value) {
  auto q = parse_qtype(value.get<std::string>());
  if (!q) throw std::invalid_argument("unknown question type '" + value.get<std::string>() + "'");
  return *q;
}

}  // namespace

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  if (k >= n) return idx;
  // Partial Fisher-Yates on raw engine output so samples match across
  // standard libraries.
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<Example> load_stepgame(const std::filesystem::path& dir, const std::set<int>& hops, std::size_t per_hop,
                                   std::uint64_t seed) {
  const auto& dict = spatial::SynonymDictionary::builtin(Dataset::stepgame);
  std::vector<Example> out;
  for (int hop : hops) {
    const std::string name = "qa" + std::to_string(hop) + "_test.json";
    json doc = read_json(dir / name);
    if (!doc.is_object()) throw SchemaError(name + ": expected an object of records");
    std::vector<std::string> keys = ordered_keys(doc);
    for (std::size_t i : sample_indices(keys.size(), per_hop == 0 ? keys.size() : per_hop,
                                        seed + static_cast<std::uint64_t>(hop))) {
      const json& rec = doc[keys[i]];
      try {
        Example ex;
        ex.id = "k" + std::to_string(hop) + "-" + keys[i];
        ex.dataset = Dataset::stepgame;
        ex.context = joined_text(rec.at("story"));
        ex.question = rec.at("question").get<std::string>();
        ex.hop = hop;
        const std::string raw = rec.at("label").get<std::string>();
        std::string label = spatial::normalize_answer(raw, Dataset::stepgame, &dict);
        if (spatial::is_unknown(label)) {
          throw std::invalid_argument("label '" + raw + "' is not a relation");
        }
        ex.gold = {label};
        out.push_back(std::move(ex));
      } catch (const SchemaError&) {
        throw;
      } catch (const std::exception& err) {
        throw SchemaError(name + " record '" + keys[i] + "': " + err.what());
      }
    }
  }
  return out;
}

std::vector<Example> load_sparqa(const std::filesystem::path& file, std::size_t per_type, std::uint64_t seed) {
  json doc = read_json(file);
  const std::string name = file.filename().string();
  std::vector<Example> all;

  auto add = [&](const std::string& where, auto&& build) {
    try {
      all.push_back(build());
    } catch (const std::exception& err) {
      throw SchemaError(name + " record '" + where + "': " + err.what());
    }
  };

  if (doc.is_object() && doc.contains("data")) {
    const json& stories = doc["data"];
    for (std::size_t s = 0; s < stories.size(); ++s) {
      const json& story = stories[s];
      std::string story_id = story.contains("identifier") ? scalar_text(story["identifier"]) : std::to_string(s);
      const json& questions = story.at("questions");
      for (std::size_t q = 0; q < questions.size(); ++q) {
        const json& rec = questions[q];
        std::string qid = rec.contains("q_id") ? scalar_text(rec["q_id"]) : std::to_string(q);
        add(story_id + "/" + qid, [&] {
          Example ex;
          ex.id = story_id + "-" + qid;
          ex.dataset = Dataset::sparqa;
          ex.context = joined_text(story.at("story"));
          ex.question = rec.at("question").get<std::string>();
          ex.qtype = qtype_of(rec.at("q_type"));
          ex.choices = string_list(rec, "candidate_answers");
          ex.gold = gold_set(rec.at("answer"), *ex.qtype, ex.choices);
          return ex;
        });
      }
    }
  } else if (doc.is_array()) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const json& rec = doc[i];
      std::string id = rec.contains("id") ? scalar_text(rec["id"]) : std::to_string(i);
      add(id, [&] {
        Example ex;
        ex.id = id;
        ex.dataset = Dataset::sparqa;
        ex.context = joined_text(rec.at("context"));
        ex.question = rec.at("question").get<std::string>();
        ex.qtype = qtype_of(rec.at("qtype"));
        ex.choices = string_list(rec, "choices");
        ex.gold = gold_set(rec.at("answer"), *ex.qtype, ex.choices);
        return ex;
      });
    }
  } else {
    throw SchemaError(name + ": expected {\"data\": [...]} or an array of records");
  }

  std::vector<Example> out;
  constexpr std::array<QType, 4> order = {QType::FR, QType::FB, QType::YN, QType::CO};
  for (QType q : order) {
    std::vector<std::size_t> of_type;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (all[i].qtype == q) of_type.push_back(i);
    }
    for (std::size_t i : sample_indices(of_type.size(), per_type == 0 ? of_type.size() : per_type,
                                        seed + static_cast<std::uint64_t>(q))) {
      out.push_back(all[of_type[i]]);
    }
  }
  return out;
}

std::vector<Example> examples_from_synth(const std::vector<spatial::SynthStory>& stories) {
  std::vector<Example> out;
  out.reserve(stories.size());
  for (const auto& s : stories) {
    Example ex;
    ex.id = s.id;
    ex.dataset = Dataset::stepgame;
    for (const auto& sentence : s.sentences) {
      if (!ex.context.empty()) ex.context += ' ';
      ex.context += sentence;
    }
    ex.question = s.question;
    ex.gold = {std::string(spatial::label(s.answer))};
    ex.hop = s.hops;
    out.push_back(std::move(ex));
  }
  return out;
}

std::string example_to_json(const Example& ex) {
  ordered_json j;
  j["id"] = ex.id;
  j["dataset"] = spatial::to_string(ex.dataset);
  j["context"] = ex.context;
  j["question"] = ex.question;
  j["choices"] = ex.choices;
  j["gold"] = ex.gold;
  if (ex.hop) j["hop"] = *ex.hop;
  if (ex.qtype) j["qtype"] = to_string(*ex.qtype);
  return j.dump();
}

Example example_from_json(std::string_view line) {
  json j = json::parse(line);
  Example ex;
  ex.id = j.at("id").get<std::string>();
  auto ds = spatial::parse_dataset(j.at("dataset").get<std::string>());
  if (!ds) throw SchemaError("example '" + ex.id + "': unknown dataset");
  ex.dataset = *ds;
  ex.context = j.at("context").get<std::string>();
  ex.question = j.at("question").get<std::string>();
  ex.choices = j.value("choices", std::vector<std::string>{});
  for (const auto& g : j.at("gold")) ex.gold.insert(g.get<std::string>());
  if (j.contains("hop")) ex.hop = j["hop"].get<int>();
  if (j.contains("qtype")) ex.qtype = qtype_of(j["qtype"]);
  return ex;
}

std::vector<Example> read_examples(const std::filesystem::path& ndjson) {
  std::ifstream in(ndjson, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + ndjson.string());
  std::vector<Example> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(example_from_json(line));
    } catch (const std::exception& err) {
      throw SchemaError(ndjson.filename().string() + " line " + std::to_string(line_no) + ": " + err.what());
    }
  }
  return out;
}

void write_examples(const std::filesystem::path& ndjson, const std::vector<Example>& examples) {
  std::ofstream out(ndjson, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + ndjson.string());
  for (const auto& ex : examples) out << example_to_json(ex) << '\n';
}

}  // namespace spasp::eval
