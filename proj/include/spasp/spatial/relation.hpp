#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string_view>

namespace spasp::spatial {

enum class Dataset : std::uint8_t { stepgame, sparqa };

std::string_view to_string(Dataset dataset);
std::optional<Dataset> parse_dataset(std::string_view text);

enum class StepRelation : std::uint8_t {
  left,
  right,
  top,
  down,
  top_left,
  top_right,
  down_left,
  down_right,
  overlap,
};

inline constexpr std::array<StepRelation, 9> kStepRelations = {
    StepRelation::left,      StepRelation::right,    StepRelation::top,
    StepRelation::down,      StepRelation::top_left, StepRelation::top_right,
    StepRelation::down_left, StepRelation::down_right, StepRelation::overlap,
};

/// Grid displacement; x grows east, y grows north.
struct Offset {
  int dx = 0;
  int dy = 0;
  auto operator<=>(const Offset&) const = default;
};

Offset to_offset(StepRelation rel);
/// Relation for an arbitrary relative position; only the signs matter.
StepRelation from_offset(std::int64_t dx, std::int64_t dy);
StepRelation inverse(StepRelation rel);

/// Answer label ("top-left") and ASP constant ("top_left").
std::string_view label(StepRelation rel);
std::string_view asp_constant(StepRelation rel);
/// Accepts either spelling.
std::optional<StepRelation> parse_step_relation(std::string_view text);

enum class SparqaRelation : std::uint8_t {
  left,
  right,
  above,
  below,
  near_to,
  far_from,
  touching,
  dk,
};

inline constexpr std::array<SparqaRelation, 8> kSparqaRelations = {
    SparqaRelation::left,    SparqaRelation::right,    SparqaRelation::above,
    SparqaRelation::below,   SparqaRelation::near_to,  SparqaRelation::far_from,
    SparqaRelation::touching, SparqaRelation::dk,
};

/// SparQA labels double as ASP constants.
std::string_view label(SparqaRelation rel);
std::optional<SparqaRelation> parse_sparqa_relation(std::string_view text);

}  // namespace spasp::spatial
