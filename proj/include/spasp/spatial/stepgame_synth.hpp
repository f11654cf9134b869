#pragma once

#include "spasp/spatial/relation.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace spasp::spatial {

/// A k-hop StepGame-style story from a random walk on the grid. Links are
/// stated from a random end and shuffled, as in the real dataset.
struct SynthStory {
  std::string id;
  int hops = 0;
  std::vector<std::string> sentences;
  std::string question;
  /// Ground truth: position of the first queried agent relative to the second.
  StepRelation answer = StepRelation::overlap;
  /// is/3 and query/2 facts equivalent to the story.
  std::string facts;
};

SynthStory synth_stepgame_story(std::mt19937_64& rng, int hops, std::string id);

/// `per_hop` stories for each k in [min_hop, max_hop], ids "k<hop>-<n>".
std::vector<SynthStory> synth_stepgame(int min_hop, int max_hop, int per_hop, std::uint64_t seed);

}  // namespace spasp::spatial
