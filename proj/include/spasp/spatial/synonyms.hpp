#pragma once

#include "spasp/spatial/relation.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace spasp::spatial {

/// Lowercase, trim, collapse whitespace, treat '-' and '_' as spaces and drop
/// surrounding quotes and trailing punctuation. "North-East." -> "north east".
std::string normalization_key(std::string_view token);

/// Surface token -> canonical label. Canonical labels always map to
/// themselves.
class SynonymDictionary {
 public:
  /// One "token<TAB>canonical" pair per line; '#' starts a comment line.
  /// Throws std::invalid_argument naming the line on malformed input.
  static SynonymDictionary parse_tsv(std::string_view text);
  /// The dictionary shipped in assets/synonyms/.
  static const SynonymDictionary& builtin(Dataset dataset);

  void add(std::string_view token, std::string_view canonical);
  std::optional<std::string> lookup(std::string_view token) const;

  /// Keyed by normalization_key.
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

inline constexpr std::string_view kUnknownPrefix = "unknown:";

/// Canonical label for `token`, or kUnknownPrefix + the cleaned token so an
/// unmapped answer is kept and scored as a miss. Integer tokens (choice
/// indices) pass through unchanged.
std::string normalize_answer(std::string_view token, Dataset dataset,
                             const SynonymDictionary* dictionary = nullptr);

bool is_unknown(std::string_view label);

}  // namespace spasp::spatial
