#include "spasp/asp/safety.hpp"

#include "spasp/asp/parser.hpp"

#include <algorithm>
#include <set>

namespace spasp::asp {
namespace {

using VarSet = std::set<std::string>;

bool has_anonymous(const Term& term) {
  if (term.kind == Term::Kind::anonymous) return true;
  if (term.kind == Term::Kind::binary) {
    return has_anonymous(term.operands[0]) || has_anonymous(term.operands[1]);
  }
  return false;
}

void bind_plain_arguments(const Atom& atom, VarSet& bound) {
  for (const auto& arg : atom.args) {
    if (arg.kind == Term::Kind::variable) bound.insert(arg.name);
  }
}

bool all_bound(const Term& term, const VarSet& bound) {
  std::vector<std::string> vars;
  collect_variables(term, vars);
  return std::all_of(vars.begin(), vars.end(), [&](const auto& v) { return bound.count(v) > 0; });
}

/// Extends `bound` through `V = expr` / `expr = V` assignments until stable.
void close_assignments(const std::vector<const Comparison*>& comparisons, VarSet& bound) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Comparison* cmp : comparisons) {
      if (cmp->op != CompareOp::eq) continue;
      auto try_bind = [&](const Term& target, const Term& source) {
        if (target.kind == Term::Kind::variable && !bound.count(target.name) &&
            all_bound(source, bound)) {
          bound.insert(target.name);
          changed = true;
        }
      };
      try_bind(cmp->lhs, cmp->rhs);
      try_bind(cmp->rhs, cmp->lhs);
    }
  }
}

/// First variable of `vars` (in order) missing from `bound`.
std::optional<std::string> first_unbound(const std::vector<std::string>& vars, const VarSet& bound) {
  for (const auto& v : vars) {
    if (!bound.count(v)) return v;
  }
  return std::nullopt;
}

std::optional<std::string> check_literal(const Literal& lit, const VarSet& bound) {
  std::vector<std::string> vars;
  if (auto* a = std::get_if<AtomLiteral>(&lit)) {
    // Anonymous arguments of positive atoms match anything and under `not`
    // they are projected away, so only named variables matter here.
    collect_variables(a->atom, vars);
  } else {
    const auto& cmp = std::get<Comparison>(lit);
    if (has_anonymous(cmp.lhs) || has_anonymous(cmp.rhs)) return std::string("_");
    collect_variables(cmp.lhs, vars);
    collect_variables(cmp.rhs, vars);
  }
  return first_unbound(vars, bound);
}

std::optional<std::string> check_rule(const Rule& rule) {
  VarSet bound;
  std::vector<const Comparison*> comparisons;
  for (const auto& element : rule.body) {
    if (auto* a = std::get_if<AtomLiteral>(&element)) {
      if (a->polarity == Polarity::positive) bind_plain_arguments(a->atom, bound);
    } else if (auto* c = std::get_if<Comparison>(&element)) {
      comparisons.push_back(c);
    }
  }
  close_assignments(comparisons, bound);

  if (rule.head) {
    for (const auto& arg : rule.head->args) {
      if (has_anonymous(arg)) return std::string("_");
    }
    std::vector<std::string> vars;
    collect_variables(*rule.head, vars);
    if (auto v = first_unbound(vars, bound)) return v;
  }

  for (const auto& element : rule.body) {
    if (auto* a = std::get_if<AtomLiteral>(&element)) {
      // Arguments like p(X+1) do not bind X, so positive atoms are checked too.
      if (auto v = check_literal(*a, bound)) return v;
    } else if (auto* c = std::get_if<Comparison>(&element)) {
      if (auto v = check_literal(*c, bound)) return v;
    } else {
      const auto& cond = std::get<Conditional>(element);
      VarSet local = bound;
      std::vector<const Comparison*> local_cmps;
      for (const auto& lit : cond.conditions) {
        if (auto* a = std::get_if<AtomLiteral>(&lit)) {
          if (a->polarity == Polarity::positive) bind_plain_arguments(a->atom, local);
        } else {
          local_cmps.push_back(&std::get<Comparison>(lit));
        }
      }
      close_assignments(local_cmps, local);
      if (auto v = check_literal(cond.head, local)) return v;
      for (const auto& lit : cond.conditions) {
        if (auto v = check_literal(lit, local)) return v;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<UnsafeVariable> check_safety(const Program& program) {
  for (const auto& rule : program.rules) {
    if (auto var = check_rule(rule)) {
      return UnsafeVariable{*var, print_rule(rule), rule.span};
    }
  }
  return std::nullopt;
}

}  // namespace spasp::asp
