#include "spasp/spatial/relation.hpp"

namespace spasp::spatial {

namespace {

struct StepInfo {
  StepRelation rel;
  Offset offset;
  std::string_view label;
  std::string_view constant;
};

constexpr std::array<StepInfo, 9> kStepTable = {{
    {StepRelation::left, {-1, 0}, "left", "left"},
    {StepRelation::right, {1, 0}, "right", "right"},
    {StepRelation::top, {0, 1}, "top", "top"},
    {StepRelation::down, {0, -1}, "down", "down"},
    {StepRelation::top_left, {-1, 1}, "top-left", "top_left"},
    {StepRelation::top_right, {1, 1}, "top-right", "top_right"},
    {StepRelation::down_left, {-1, -1}, "down-left", "down_left"},
    {StepRelation::down_right, {1, -1}, "down-right", "down_right"},
    {StepRelation::overlap, {0, 0}, "overlap", "overlap"},
}};

constexpr std::array<std::string_view, 8> kSparqaLabels = {
    "left", "right", "above", "below", "near_to", "far_from", "touching", "dk",
};

const StepInfo& info(StepRelation rel) { return kStepTable[static_cast<std::size_t>(rel)]; }

int sign(std::int64_t v) { return (v > 0) - (v < 0); }

}  // namespace

std::string_view to_string(Dataset dataset) {
  return dataset == Dataset::stepgame ? "stepgame" : "sparqa";
}

std::optional<Dataset> parse_dataset(std::string_view text) {
  if (text == "stepgame") return Dataset::stepgame;
  if (text == "sparqa" || text == "spartqa") return Dataset::sparqa;
  return std::nullopt;
}

Offset to_offset(StepRelation rel) { return info(rel).offset; }

StepRelation from_offset(std::int64_t dx, std::int64_t dy) {
  Offset want{sign(dx), sign(dy)};
  for (const auto& entry : kStepTable) {
    if (entry.offset == want) return entry.rel;
  }
  return StepRelation::overlap;  // unreachable: the table covers all sign pairs
}

StepRelation inverse(StepRelation rel) {
  Offset o = to_offset(rel);
  return from_offset(-o.dx, -o.dy);
}

std::string_view label(StepRelation rel) { return info(rel).label; }
std::string_view asp_constant(StepRelation rel) { return info(rel).constant; }

std::optional<StepRelation> parse_step_relation(std::string_view text) {
  for (const auto& entry : kStepTable) {
    if (text == entry.label || text == entry.constant) return entry.rel;
  }
  return std::nullopt;
}

std::string_view label(SparqaRelation rel) { return kSparqaLabels[static_cast<std::size_t>(rel)]; }

std::optional<SparqaRelation> parse_sparqa_relation(std::string_view text) {
  for (std::size_t i = 0; i < kSparqaLabels.size(); ++i) {
    if (text == kSparqaLabels[i]) return static_cast<SparqaRelation>(i);
  }
  return std::nullopt;
}

}  // namespace spasp::spatial
