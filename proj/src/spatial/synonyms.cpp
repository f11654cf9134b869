#include "spasp/spatial/synonyms.hpp"

#include "spasp/assets.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace spasp::spatial {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_trim_punct(char c) {
  return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?' || c == '"' ||
         c == '\'' || c == '`' || c == '(' || c == ')' || c == '[' || c == ']' || c == '*';
}

bool is_integer(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = s[0] == '-' ? 1 : 0;
  if (i == s.size()) return false;
  return std::all_of(s.begin() + static_cast<std::ptrdiff_t>(i), s.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; });
}

}  // namespace

std::string normalization_key(std::string_view token) {
  std::size_t b = 0;
  std::size_t e = token.size();
  while (b < e && (is_space(token[b]) || is_trim_punct(token[b]))) ++b;
  while (e > b && (is_space(token[e - 1]) || is_trim_punct(token[e - 1]))) --e;
  std::string out;
  bool pending_space = false;
  for (std::size_t i = b; i < e; ++i) {
    char c = token[i];
    if (is_space(c) || c == '-' || c == '_') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

SynonymDictionary SynonymDictionary::parse_tsv(std::string_view text) {
  SynonymDictionary dict;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (normalization_key(line).empty() || line.front() == '#') continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos || line.find('\t', tab + 1) != std::string_view::npos) {
      throw std::invalid_argument("synonyms line " + std::to_string(line_no) +
                                  ": expected 'token<TAB>canonical'");
    }
    std::string_view token = line.substr(0, tab);
    std::string_view canonical = line.substr(tab + 1);
    if (normalization_key(token).empty() || normalization_key(canonical).empty()) {
      throw std::invalid_argument("synonyms line " + std::to_string(line_no) + ": empty field");
    }
    dict.add(token, canonical);
  }
  return dict;
}

const SynonymDictionary& SynonymDictionary::builtin(Dataset dataset) {
  static const SynonymDictionary stepgame = parse_tsv(asset("synonyms/stepgame.tsv"));
  static const SynonymDictionary sparqa = parse_tsv(asset("synonyms/sparqa.tsv"));
  return dataset == Dataset::stepgame ? stepgame : sparqa;
}

void SynonymDictionary::add(std::string_view token, std::string_view canonical) {
  std::string label(canonical.substr(0, canonical.find_last_not_of(" \t") + 1));
  label.erase(0, label.find_first_not_of(" \t"));
  entries_[normalization_key(token)] = label;
  entries_[normalization_key(label)] = label;
}

std::optional<std::string> SynonymDictionary::lookup(std::string_view token) const {
  auto it = entries_.find(normalization_key(token));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string normalize_answer(std::string_view token, Dataset dataset,
                             const SynonymDictionary* dictionary) {
  const SynonymDictionary& dict = dictionary ? *dictionary : SynonymDictionary::builtin(dataset);
  if (auto hit = dict.lookup(token)) return *hit;
  std::string key = normalization_key(token);
  if (is_integer(key)) return key;
  return std::string(kUnknownPrefix) + key;
}

bool is_unknown(std::string_view label) { return label.substr(0, kUnknownPrefix.size()) == kUnknownPrefix; }

}  // namespace spasp::spatial
