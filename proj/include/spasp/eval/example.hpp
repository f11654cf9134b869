#pragma once

#include "spasp/spatial/relation.hpp"

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace spasp::eval {

enum class QType : std::uint8_t { FR, FB, YN, CO };

inline std::string_view to_string(QType q) {
  constexpr std::string_view names[] = {"FR", "FB", "YN", "CO"};
  return names[static_cast<std::size_t>(q)];
}

inline std::optional<QType> parse_qtype(std::string_view text) {
  if (text == "FR") return QType::FR;
  if (text == "FB") return QType::FB;
  if (text == "YN") return QType::YN;
  if (text == "CO") return QType::CO;
  return std::nullopt;
}

using LabelSet = std::set<std::string>;

struct Example {
  std::string id;
  spatial::Dataset dataset = spatial::Dataset::stepgame;
  std::string context;
  std::string question;
  std::vector<std::string> choices;
  /// Canonical labels. CO gold holds 0-based choice indices.
  LabelSet gold;
  std::optional<int> hop;      // StepGame
  std::optional<QType> qtype;  // SparQA
};

}  // namespace spasp::eval
