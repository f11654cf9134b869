#include "spasp/asp/solver.hpp"

#include "spasp/asp/parser.hpp"
#include "spasp/asp/safety.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include <omp.h>

namespace spasp::asp {
namespace {

struct Edge {
  std::size_t to = 0;
  bool negative = false;
  std::size_t rule = 0;
};

/// Predicate-level dependency graph: an edge head -> body predicate.
struct DependencyGraph {
  std::vector<Signature> nodes;
  std::map<Signature, std::size_t> index;
  std::vector<std::vector<Edge>> edges;

  std::size_t node(const Signature& sig) {
    auto [it, inserted] = index.emplace(sig, nodes.size());
    if (inserted) {
      nodes.push_back(sig);
      edges.emplace_back();
    }
    return it->second;
  }

  void add(std::size_t from, const Signature& to, bool negative, std::size_t rule) {
    std::size_t t = node(to);
    edges[from].push_back({t, negative, rule});
  }
};

DependencyGraph build_graph(const GroundProgram& ground) {
  DependencyGraph g;
  const Program& program = ground.source;
  // Nodes first so every predicate, including body-only ones, gets a stratum.
  for (std::size_t i = 0; i < program.rules.size(); ++i) {
    if (program.rules[i].head) g.node(program.rules[i].head->signature());
  }
  for (std::size_t id = 0; id < ground.atoms.size(); ++id) {
    g.node(ground.atoms[static_cast<AtomId>(id)].signature());
  }
  for (std::size_t i = 0; i < program.rules.size(); ++i) {
    const Rule& rule = program.rules[i];
    if (!rule.head) continue;
    std::size_t from = g.node(rule.head->signature());
    auto literal = [&](const Literal& lit, bool force_negative) {
      if (auto* a = std::get_if<AtomLiteral>(&lit)) {
        g.add(from, a->atom.signature(), force_negative || a->polarity == Polarity::negative, i);
      }
    };
    for (const auto& element : rule.body) {
      if (auto* a = std::get_if<AtomLiteral>(&element)) {
        literal(*a, false);
      } else if (auto* c = std::get_if<Conditional>(&element)) {
        literal(c->head, true);
        for (const auto& cond : c->conditions) literal(cond, true);
      }
    }
  }
  return g;
}

/// Tarjan's algorithm; components come out dependencies-first.
class SccFinder {
 public:
  explicit SccFinder(const DependencyGraph& g)
      : g_(g), index_(g.nodes.size(), kUnvisited), low_(g.nodes.size(), 0),
        on_stack_(g.nodes.size(), false), component_(g.nodes.size(), 0) {}

  std::vector<std::vector<std::size_t>> run() {
    for (std::size_t v = 0; v < g_.nodes.size(); ++v) {
      if (index_[v] == kUnvisited) visit(v);
    }
    return components_;
  }

  const std::vector<std::size_t>& component_of() const { return component_; }

 private:
  static constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);

  // Iterative to avoid deep recursion on long predicate chains.
  void visit(std::size_t root) {
    struct Frame {
      std::size_t v;
      std::size_t edge;
    };
    std::vector<Frame> frames{{root, 0}};
    index_[root] = low_[root] = counter_++;
    stack_.push_back(root);
    on_stack_[root] = true;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.edge < g_.edges[f.v].size()) {
        std::size_t w = g_.edges[f.v][f.edge++].to;
        if (index_[w] == kUnvisited) {
          index_[w] = low_[w] = counter_++;
          stack_.push_back(w);
          on_stack_[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack_[w]) {
          low_[f.v] = std::min(low_[f.v], index_[w]);
        }
        continue;
      }
      std::size_t v = f.v;
      frames.pop_back();
      if (!frames.empty()) low_[frames.back().v] = std::min(low_[frames.back().v], low_[v]);
      if (low_[v] == index_[v]) {
        std::vector<std::size_t> comp;
        std::size_t w = 0;
        do {
          w = stack_.back();
          stack_.pop_back();
          on_stack_[w] = false;
          component_[w] = components_.size();
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        components_.push_back(std::move(comp));
      }
    }
  }

  const DependencyGraph& g_;
  std::vector<std::size_t> index_, low_;
  std::vector<bool> on_stack_;
  std::vector<std::size_t> component_;
  std::vector<std::size_t> stack_;
  std::vector<std::vector<std::size_t>> components_;
  std::size_t counter_ = 0;
};

/// Path from `from` back to `to` inside one component, as edge labels.
std::optional<Unstratifiable> find_negative_cycle(const DependencyGraph& g,
                                                  const std::vector<std::size_t>& component,
                                                  const Program& program) {
  for (std::size_t rule = 0; rule < program.rules.size(); ++rule) {
    for (std::size_t u = 0; u < g.nodes.size(); ++u) {
      for (const Edge& e : g.edges[u]) {
        if (e.rule != rule || !e.negative || component[u] != component[e.to]) continue;
        // BFS e.to -> u within the component.
        std::vector<std::optional<std::pair<std::size_t, bool>>> parent(g.nodes.size());
        std::vector<bool> seen(g.nodes.size(), false);
        std::deque<std::size_t> queue{e.to};
        seen[e.to] = true;
        while (!queue.empty() && !seen[u]) {
          std::size_t x = queue.front();
          queue.pop_front();
          for (const Edge& f : g.edges[x]) {
            if (seen[f.to] || component[f.to] != component[u]) continue;
            seen[f.to] = true;
            parent[f.to] = std::make_pair(x, f.negative);
            queue.push_back(f.to);
          }
        }
        std::vector<std::pair<std::size_t, bool>> path;  // (node, edge into it is negative)
        for (std::size_t x = u; x != e.to;) {
          auto [p, neg] = *parent[x];
          path.emplace_back(x, neg);
          x = p;
        }
        std::reverse(path.begin(), path.end());
        std::string cycle = to_string(g.nodes[u]) + " -not-> " + to_string(g.nodes[e.to]);
        for (auto [node, neg] : path) cycle += (neg ? " -not-> " : " -> ") + to_string(g.nodes[node]);
        return Unstratifiable{cycle, program.rules[rule].span};
      }
    }
  }
  return std::nullopt;
}

}  // namespace

SolverOutcome solve(const GroundProgram& program, SolveStats* stats) {
  DependencyGraph graph = build_graph(program);
  SccFinder finder(graph);
  auto components = finder.run();
  const auto& component = finder.component_of();
  if (auto cycle = find_negative_cycle(graph, component, program.source)) return {*cycle};

  const std::size_t n_atoms = program.atoms.size();
  std::vector<std::size_t> atom_stratum(n_atoms);
  for (std::size_t id = 0; id < n_atoms; ++id) {
    atom_stratum[id] = component[graph.index.at(program.atoms[static_cast<AtomId>(id)].signature())];
  }

  std::vector<std::vector<std::size_t>> rules_by_stratum(components.size());
  std::vector<std::size_t> constraints;
  for (std::size_t r = 0; r < program.rules.size(); ++r) {
    const GroundRule& rule = program.rules[r];
    if (rule.head) rules_by_stratum[atom_stratum[*rule.head]].push_back(r);
    else constraints.push_back(r);
  }

  std::vector<char> truth(n_atoms, 0);
  auto holds_negated = [&](const std::vector<AtomId>& ids) {
    return std::none_of(ids.begin(), ids.end(), [&](AtomId a) { return truth[a]; });
  };
  auto holds_conditional = [&](const GroundConditional& cond) {
    for (const auto& clause : cond.clauses) {
      bool conditions = std::all_of(clause.condition_positive.begin(), clause.condition_positive.end(),
                                    [&](AtomId a) { return truth[a]; }) &&
                        holds_negated(clause.condition_negative);
      if (!conditions) continue;
      bool head = clause.head_negated ? holds_negated(clause.head)
                                      : (!clause.head.empty() && truth[clause.head.front()]);
      if (!head) return false;
    }
    return true;
  };
  // Negative and conditional parts only reference lower strata here.
  auto side_conditions_hold = [&](const GroundRule& rule) {
    return holds_negated(rule.negative) &&
           std::all_of(rule.conditionals.begin(), rule.conditionals.end(), holds_conditional);
  };

  if (stats) {
    stats->strata.clear();
    stats->derived.clear();
  }

  std::vector<std::vector<std::size_t>> watchers(n_atoms);
  std::vector<std::size_t> missing(program.rules.size(), 0);
  for (std::size_t s = 0; s < components.size(); ++s) {
    std::vector<AtomId> derived;
    std::vector<AtomId> queue;
    auto make_true = [&](AtomId a) {
      if (!truth[a]) {
        truth[a] = 1;
        derived.push_back(a);
        queue.push_back(a);
      }
    };
    for (std::size_t r : rules_by_stratum[s]) {
      const GroundRule& rule = program.rules[r];
      if (!side_conditions_hold(rule)) continue;
      std::size_t count = 0;
      bool dead = false;
      for (AtomId a : rule.positive) {
        if (truth[a]) continue;
        if (atom_stratum[a] != s) {
          dead = true;  // lower stratum, already final
          break;
        }
        ++count;
      }
      if (dead) continue;
      missing[r] = count;
      if (count == 0) {
        make_true(*rule.head);
      } else {
        for (AtomId a : rule.positive) {
          if (!truth[a]) watchers[a].push_back(r);
        }
      }
    }
    while (!queue.empty()) {
      AtomId a = queue.back();
      queue.pop_back();
      for (std::size_t r : watchers[a]) {
        if (--missing[r] == 0) make_true(*program.rules[r].head);
      }
      watchers[a].clear();
    }
    if (stats) {
      std::vector<Signature> sigs;
      for (std::size_t node : components[s]) sigs.push_back(graph.nodes[node]);
      stats->strata.push_back(std::move(sigs));
      std::vector<GroundAtom> atoms;
      for (AtomId a : derived) atoms.push_back(program.atoms[a]);
      std::sort(atoms.begin(), atoms.end());
      stats->derived.push_back(std::move(atoms));
    }
  }

  for (std::size_t r : constraints) {
    const GroundRule& rule = program.rules[r];
    bool body = std::all_of(rule.positive.begin(), rule.positive.end(), [&](AtomId a) { return truth[a]; }) &&
                side_conditions_hold(rule);
    if (body) {
      const Rule& source = program.source.rules[rule.source_rule];
      return {Unsatisfiable{print_rule(source), source.span}};
    }
  }

  StableModel model;
  for (std::size_t id = 0; id < n_atoms; ++id) {
    if (truth[id]) model.atoms.push_back(program.atoms[static_cast<AtomId>(id)]);
  }
  std::sort(model.atoms.begin(), model.atoms.end());
  return {std::move(model)};
}

AnswerSet extract_answers(const StableModel& model, std::string_view predicate) {
  AnswerSet out;
  for (const auto& atom : model.atoms) {
    if (atom.predicate == predicate) out.push_back(atom.args);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

SolverOutcome evaluate(std::string_view text, const GroundOptions& options) {
  ParseResult parsed = parse_program(text);
  if (auto* err = std::get_if<ParseError>(&parsed)) return {*err};
  const Program& program = std::get<Program>(parsed);
  if (auto unsafe = check_safety(program)) return {*unsafe};
  GroundResult grounded = ground(program, options);
  if (auto* err = std::get_if<GroundError>(&grounded)) return {*err};
  return solve(std::get<GroundProgram>(grounded));
}

std::vector<SolverOutcome> evaluate_batch_serial(std::span<const std::string> programs,
                                                 const GroundOptions& options) {
  std::vector<SolverOutcome> out;
  out.reserve(programs.size());
  for (const auto& text : programs) out.push_back(evaluate(text, options));
  return out;
}

std::vector<SolverOutcome> evaluate_batch(std::span<const std::string> programs,
                                          const GroundOptions& options, int jobs) {
  std::vector<SolverOutcome> out(programs.size());
  const auto n = static_cast<std::ptrdiff_t>(programs.size());
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = evaluate(programs[static_cast<std::size_t>(i)], options);
  }
  return out;
}

}  // namespace spasp::asp
