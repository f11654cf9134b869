#include "spasp/spatial/stepgame_synth.hpp"

#include <algorithm>
#include <stdexcept>

namespace spasp::spatial {

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

// Fisher-Yates on raw engine output; std::shuffle's draw pattern is
// implementation-defined, which would make the corpus platform-dependent.
template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[pick(rng, i)]);
}

std::string sentence(StepRelation rel, const std::string& x, const std::string& y) {
  switch (rel) {
    case StepRelation::left: return x + " is to the left of " + y + ".";
    case StepRelation::right: return x + " is to the right of " + y + ".";
    case StepRelation::top: return x + " is above " + y + ".";
    case StepRelation::down: return x + " is below " + y + ".";
    case StepRelation::top_left: return x + " is on the upper left of " + y + ".";
    case StepRelation::top_right: return x + " is at the upper right of " + y + ".";
    case StepRelation::down_left: return x + " is at the lower left of " + y + ".";
    case StepRelation::down_right: return x + " is to the lower right of " + y + ".";
    case StepRelation::overlap: return x + " and " + y + " are at the same position.";
  }
  return {};
}

std::string constant(const std::string& agent) {
  std::string out = agent;
  for (char& c : out) c = static_cast<char>(c - 'A' + 'a');
  return out;
}

}  // namespace

SynthStory synth_stepgame_story(std::mt19937_64& rng, int hops, std::string id) {
  if (hops < 1 || hops > 25) throw std::invalid_argument("hops must be in [1, 25]");
  std::vector<std::string> letters;
  for (char c = 'A'; c <= 'Z'; ++c) letters.emplace_back(1, c);
  shuffle(letters, rng);
  std::vector<std::string> agents(letters.begin(), letters.begin() + hops + 1);

  std::vector<Offset> pos(agents.size());
  struct Link {
    std::string text;
    std::string fact;
  };
  std::vector<Link> links;
  for (int i = 0; i < hops; ++i) {
    auto step = kStepRelations[pick(rng, kStepRelations.size())];
    Offset d = to_offset(step);
    pos[i + 1] = {pos[i].dx + d.dx, pos[i].dy + d.dy};
    // Agent i+1 is `step` of agent i; state it from either end.
    const std::string& a = agents[i + 1];
    const std::string& b = agents[i];
    if (pick(rng, 2) == 0) {
      links.push_back({sentence(step, a, b),
                       "is(" + constant(a) + "," + std::string(asp_constant(step)) + "," + constant(b) + ")."});
    } else {
      StepRelation back = inverse(step);
      links.push_back({sentence(back, b, a),
                       "is(" + constant(b) + "," + std::string(asp_constant(back)) + "," + constant(a) + ")."});
    }
  }
  shuffle(links, rng);

  // Query the two ends of the chain in random order.
  std::size_t first = 0;
  std::size_t second = agents.size() - 1;
  if (pick(rng, 2) == 1) std::swap(first, second);

  SynthStory story;
  story.id = std::move(id);
  story.hops = hops;
  for (auto& link : links) {
    story.sentences.push_back(link.text);
    story.facts += link.fact + "\n";
  }
  story.question = "What is the relation of the agent " + agents[first] + " to the agent " +
                   agents[second] + "?";
  story.answer = from_offset(pos[first].dx - pos[second].dx, pos[first].dy - pos[second].dy);
  story.facts += "query(" + constant(agents[first]) + "," + constant(agents[second]) + ").\n";
  return story;
}

std::vector<SynthStory> synth_stepgame(int min_hop, int max_hop, int per_hop, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<SynthStory> out;
  for (int k = min_hop; k <= max_hop; ++k) {
    for (int n = 0; n < per_hop; ++n) {
      out.push_back(synth_stepgame_story(rng, k, "k" + std::to_string(k) + "-" + std::to_string(n)));
    }
  }
  return out;
}

}  // namespace spasp::spatial
