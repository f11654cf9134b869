#pragma once

#include "spasp/asp/outcome.hpp"
#include "spasp/asp/program.hpp"

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <variant>
#include <vector>

namespace spasp::asp {

using AtomId = std::uint32_t;

struct GroundAtomHash {
  std::size_t operator()(const GroundAtom& atom) const noexcept;
};

/// Interned ground atoms with per-predicate and per-argument indexes.
class AtomTable {
 public:
  std::optional<AtomId> find(const GroundAtom& atom) const;
  /// Returns the id and whether the atom was new.
  std::pair<AtomId, bool> insert(GroundAtom atom);

  const GroundAtom& operator[](AtomId id) const { return atoms_[id]; }
  std::size_t size() const { return atoms_.size(); }

  /// Ids of a predicate's atoms, ascending.
  const std::vector<AtomId>& by_signature(const Signature& sig) const;
  /// Ids of a predicate's atoms with `value` at argument `pos`, ascending.
  const std::vector<AtomId>& by_argument(const Signature& sig, std::size_t pos,
                                         const Value& value) const;

 private:
  struct ArgKey {
    std::size_t sig;
    std::size_t pos;
    Value value;
    bool operator==(const ArgKey&) const = default;
  };
  struct ArgKeyHash {
    std::size_t operator()(const ArgKey& key) const noexcept;
  };

  std::size_t signature_slot(const Signature& sig) const;

  std::vector<GroundAtom> atoms_;
  std::unordered_map<GroundAtom, AtomId, GroundAtomHash> ids_;
  std::vector<Signature> signatures_;
  std::vector<std::vector<AtomId>> by_signature_;
  std::unordered_map<ArgKey, std::vector<AtomId>, ArgKeyHash> by_argument_;
};

/// Ground form of a negated atom with anonymous arguments: it holds iff none
/// of the listed atoms is true. A plain negated atom is the one-element case.
using NegatedSet = std::vector<AtomId>;

struct GroundClause {
  std::vector<AtomId> condition_positive;
  std::vector<AtomId> condition_negative;
  bool head_negated = false;
  /// Positive head: at most one atom (empty means the head can never hold).
  /// Negated head: every listed atom must be false.
  std::vector<AtomId> head;
};

/// Conjunction over all condition-satisfying instantiations.
struct GroundConditional {
  std::vector<GroundClause> clauses;
};

struct GroundRule {
  std::optional<AtomId> head;
  std::vector<AtomId> positive;
  std::vector<AtomId> negative;
  std::vector<GroundConditional> conditionals;
  std::size_t source_rule = 0;
};

struct GroundStats {
  std::size_t instantiations = 0;  // complete positive-body matches
  std::size_t dropped_out_of_domain = 0;
  std::size_t rounds = 0;
};

struct GroundProgram {
  Program source;
  AtomTable atoms;
  std::vector<GroundRule> rules;
  GroundStats stats;
};

struct GroundOptions {
  /// Derived integers must lie in [-domain_bound, domain_bound] unless they
  /// occur literally in the program.
  std::int64_t domain_bound = 100;
  std::size_t instantiation_ceiling = 1'000'000;
};

using GroundResult = std::variant<GroundProgram, GroundError>;

/// Bottom-up semi-naive instantiation over the atoms that can possibly be
/// derived (negation is ignored when computing that over-approximation).
/// Expects a program that passed check_safety.
GroundResult ground(const Program& program, const GroundOptions& options = {});

std::string print_ground_rule(const GroundProgram& program, const GroundRule& rule);
std::string print_ground_program(const GroundProgram& program);

}  // namespace spasp::asp
