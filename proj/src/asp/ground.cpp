#include "spasp/asp/ground.hpp"

#include "spasp/asp/parser.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace spasp::asp {

// ---------------------------------------------------------------------------
// AtomTable

std::size_t GroundAtomHash::operator()(const GroundAtom& atom) const noexcept {
  std::size_t h = std::hash<std::string>{}(atom.predicate) ^ (atom.args.size() * 0x9e3779b97f4a7c15ULL);
  for (const auto& v : atom.args) {
    std::size_t x = v.type == Value::Type::integer ? std::hash<std::int64_t>{}(v.number)
                                                   : std::hash<std::string>{}(v.text);
    h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2) + static_cast<std::size_t>(v.type);
  }
  return h;
}

std::size_t AtomTable::ArgKeyHash::operator()(const ArgKey& key) const noexcept {
  std::size_t x = key.value.type == Value::Type::integer ? std::hash<std::int64_t>{}(key.value.number)
                                                         : std::hash<std::string>{}(key.value.text);
  return x ^ (key.sig * 0x9e3779b97f4a7c15ULL) ^ (key.pos << 17) ^ static_cast<std::size_t>(key.value.type);
}

std::size_t AtomTable::signature_slot(const Signature& sig) const {
  auto it = std::find(signatures_.begin(), signatures_.end(), sig);
  return static_cast<std::size_t>(it - signatures_.begin());
}

std::optional<AtomId> AtomTable::find(const GroundAtom& atom) const {
  auto it = ids_.find(atom);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::pair<AtomId, bool> AtomTable::insert(GroundAtom atom) {
  if (auto it = ids_.find(atom); it != ids_.end()) return {it->second, false};
  auto id = static_cast<AtomId>(atoms_.size());
  Signature sig = atom.signature();
  std::size_t slot = signature_slot(sig);
  if (slot == signatures_.size()) {
    signatures_.push_back(sig);
    by_signature_.emplace_back();
  }
  by_signature_[slot].push_back(id);
  for (std::size_t pos = 0; pos < atom.args.size(); ++pos) {
    by_argument_[ArgKey{slot, pos, atom.args[pos]}].push_back(id);
  }
  ids_.emplace(atom, id);
  atoms_.push_back(std::move(atom));
  return {id, true};
}

const std::vector<AtomId>& AtomTable::by_signature(const Signature& sig) const {
  static const std::vector<AtomId> kEmpty;
  std::size_t slot = signature_slot(sig);
  return slot < by_signature_.size() ? by_signature_[slot] : kEmpty;
}

const std::vector<AtomId>& AtomTable::by_argument(const Signature& sig, std::size_t pos,
                                                  const Value& value) const {
  static const std::vector<AtomId> kEmpty;
  std::size_t slot = signature_slot(sig);
  if (slot == signatures_.size()) return kEmpty;
  auto it = by_argument_.find(ArgKey{slot, pos, value});
  return it == by_argument_.end() ? kEmpty : it->second;
}

namespace {

// ---------------------------------------------------------------------------
// Compiled rule form: variables become substitution slots.

struct GroundFailure {
  GroundError error;
};

using Substitution = std::vector<std::optional<Value>>;

struct CTerm {
  enum class Kind : std::uint8_t { constant, variable, anonymous, binary };
  Kind kind = Kind::constant;
  Value value;
  std::size_t slot = 0;
  char op = 0;
  std::vector<CTerm> operands;
  const Term* source = nullptr;
};

struct CAtom {
  Signature sig;
  std::vector<CTerm> args;
  SourceSpan span;
};

struct CComparison {
  CTerm lhs;
  CompareOp op = CompareOp::eq;
  CTerm rhs;
  SourceSpan span;
};

/// Positive atoms plus comparisons, joined by a planned sequence of steps.
struct Body {
  std::vector<CAtom> positive;
  std::vector<CComparison> comparisons;
};

struct CLiteral {
  bool is_atom = true;
  bool negated = false;
  CAtom atom;
  CComparison comparison;
};

struct CConditional {
  CLiteral head;
  Body conditions;
  std::vector<CAtom> negative_conditions;
};

struct Step {
  enum class Kind : std::uint8_t { match, assign, filter };
  Kind kind = Kind::match;
  std::size_t index = 0;
  bool target_is_lhs = true;  // assign: which side is the unbound variable
};

struct CRule {
  std::size_t index = 0;
  const Rule* rule = nullptr;
  std::size_t slot_count = 0;
  std::optional<CAtom> head;
  Body body;
  std::vector<CAtom> negative;
  std::vector<CConditional> conditionals;
  std::vector<std::vector<Step>> delta_plans;  // one per positive atom
  std::vector<Step> full_plan;
};

class Compiler {
 public:
  explicit Compiler(const Rule& rule) : rule_(rule) {}

  CRule compile(std::size_t index) {
    CRule out;
    out.index = index;
    out.rule = &rule_;
    if (rule_.head) out.head = atom(*rule_.head, nullptr);
    for (const auto& element : rule_.body) {
      if (auto* a = std::get_if<AtomLiteral>(&element)) {
        if (a->polarity == Polarity::positive) {
          out.body.positive.push_back(atom(a->atom, &out.body));
        } else {
          out.negative.push_back(atom(a->atom, nullptr));
        }
      } else if (auto* c = std::get_if<Comparison>(&element)) {
        out.body.comparisons.push_back(comparison(*c));
      } else {
        const auto& cond = std::get<Conditional>(element);
        CConditional cc;
        cc.head = literal(cond.head);
        for (const auto& lit : cond.conditions) {
          if (auto* a = std::get_if<AtomLiteral>(&lit)) {
            if (a->polarity == Polarity::positive) {
              cc.conditions.positive.push_back(atom(a->atom, &cc.conditions));
            } else {
              cc.negative_conditions.push_back(atom(a->atom, nullptr));
            }
          } else {
            cc.conditions.comparisons.push_back(comparison(std::get<Comparison>(lit)));
          }
        }
        out.conditionals.push_back(std::move(cc));
      }
    }
    out.slot_count = names_.size();
    return out;
  }

 private:
  std::size_t slot_of(const std::string& name) {
    auto it = slots_.find(name);
    if (it != slots_.end()) return it->second;
    std::size_t s = names_.size();
    names_.push_back(name);
    slots_.emplace(name, s);
    return s;
  }

  std::size_t hidden_slot() {
    std::size_t s = names_.size();
    names_.push_back("#" + std::to_string(s));
    return s;
  }

  CTerm term(const Term& t) {
    CTerm out;
    out.source = &t;
    switch (t.kind) {
      case Term::Kind::symbol:
        out.value = Value::symbol(t.name);
        break;
      case Term::Kind::string:
        out.value = Value::string(t.name);
        break;
      case Term::Kind::integer:
        out.value = Value::integer(t.number);
        break;
      case Term::Kind::variable:
        out.kind = CTerm::Kind::variable;
        out.slot = slot_of(t.name);
        break;
      case Term::Kind::anonymous:
        out.kind = CTerm::Kind::anonymous;
        break;
      case Term::Kind::binary:
        out.kind = CTerm::Kind::binary;
        out.op = t.op;
        out.operands.push_back(term(t.operands[0]));
        out.operands.push_back(term(t.operands[1]));
        break;
    }
    return out;
  }

  /// With a join body, arithmetic arguments become a hidden variable plus an
  /// equality so they can be checked once their inputs are bound.
  CAtom atom(const Atom& a, Body* join) {
    CAtom out{a.signature(), {}, a.span};
    for (const auto& arg : a.args) {
      CTerm t = term(arg);
      if (join && t.kind == CTerm::Kind::binary) {
        CTerm hidden;
        hidden.kind = CTerm::Kind::variable;
        hidden.slot = hidden_slot();
        join->comparisons.push_back(CComparison{hidden, CompareOp::eq, std::move(t), a.span});
        out.args.push_back(hidden);
      } else {
        out.args.push_back(std::move(t));
      }
    }
    return out;
  }

  CComparison comparison(const Comparison& c) {
    return CComparison{term(c.lhs), c.op, term(c.rhs), c.span};
  }

  CLiteral literal(const Literal& lit) {
    CLiteral out;
    if (auto* a = std::get_if<AtomLiteral>(&lit)) {
      out.negated = a->polarity == Polarity::negative;
      out.atom = atom(a->atom, nullptr);
    } else {
      out.is_atom = false;
      out.comparison = comparison(std::get<Comparison>(lit));
    }
    return out;
  }

  const Rule& rule_;
  std::map<std::string, std::size_t> slots_;
  std::vector<std::string> names_;
};

// ---------------------------------------------------------------------------
// Planning

bool evaluable(const CTerm& t, const std::vector<bool>& bound) {
  switch (t.kind) {
    case CTerm::Kind::constant: return true;
    case CTerm::Kind::variable: return bound[t.slot];
    case CTerm::Kind::anonymous: return false;
    case CTerm::Kind::binary: return evaluable(t.operands[0], bound) && evaluable(t.operands[1], bound);
  }
  return false;
}

std::vector<Step> plan(const Body& body, std::vector<bool> bound, std::optional<std::size_t> first) {
  std::vector<Step> steps;
  std::vector<bool> atom_done(body.positive.size(), false);
  std::vector<bool> cmp_done(body.comparisons.size(), false);

  auto place_comparisons = [&] {
    bool progress = true;
    while (progress) {
      progress = false;
      for (std::size_t i = 0; i < body.comparisons.size(); ++i) {
        if (cmp_done[i]) continue;
        const auto& c = body.comparisons[i];
        bool l = evaluable(c.lhs, bound);
        bool r = evaluable(c.rhs, bound);
        if (l && r) {
          steps.push_back({Step::Kind::filter, i, true});
        } else if (c.op == CompareOp::eq && !l && r && c.lhs.kind == CTerm::Kind::variable) {
          steps.push_back({Step::Kind::assign, i, true});
          bound[c.lhs.slot] = true;
        } else if (c.op == CompareOp::eq && l && !r && c.rhs.kind == CTerm::Kind::variable) {
          steps.push_back({Step::Kind::assign, i, false});
          bound[c.rhs.slot] = true;
        } else {
          continue;
        }
        cmp_done[i] = true;
        progress = true;
      }
    }
  };
  auto take_atom = [&](std::size_t i) {
    steps.push_back({Step::Kind::match, i, true});
    atom_done[i] = true;
    for (const auto& arg : body.positive[i].args) {
      if (arg.kind == CTerm::Kind::variable) bound[arg.slot] = true;
    }
  };

  place_comparisons();
  if (first) {
    take_atom(*first);
    place_comparisons();
  }
  for (;;) {
    std::optional<std::size_t> best;
    std::size_t best_score = 0;
    for (std::size_t i = 0; i < body.positive.size(); ++i) {
      if (atom_done[i]) continue;
      std::size_t score = 0;
      for (const auto& arg : body.positive[i].args) score += evaluable(arg, bound) ? 1 : 0;
      if (!best || score > best_score) {
        best = i;
        best_score = score;
      }
    }
    if (!best) break;
    take_atom(*best);
    place_comparisons();
  }
  // Anything left over references unbound variables; safety rejects those
  // programs, so reaching here means a bug or an unchecked program.
  for (std::size_t i = 0; i < body.comparisons.size(); ++i) {
    if (!cmp_done[i]) steps.push_back({Step::Kind::filter, i, true});
  }
  return steps;
}

// ---------------------------------------------------------------------------
// Evaluation

Value evaluate(const CTerm& t, const Substitution& sub, const SourceSpan& at) {
  switch (t.kind) {
    case CTerm::Kind::constant:
      return t.value;
    case CTerm::Kind::variable:
      if (!sub[t.slot]) throw GroundFailure{GroundError{"unbound variable in term", at}};
      return *sub[t.slot];
    case CTerm::Kind::anonymous:
      throw GroundFailure{GroundError{"anonymous variable in evaluated term", at}};
    case CTerm::Kind::binary: {
      Value l = evaluate(t.operands[0], sub, at);
      Value r = evaluate(t.operands[1], sub, at);
      if (l.type != Value::Type::integer || r.type != Value::Type::integer) {
        const Value& bad = l.type != Value::Type::integer ? l : r;
        throw GroundFailure{GroundError{"arithmetic on non-integer value '" + to_string(bad) +
                                            "' in '" + print_term(*t.source) + "'",
                                        at}};
      }
      std::int64_t out = 0;
      bool overflow = t.op == '+' ? __builtin_add_overflow(l.number, r.number, &out)
                                  : __builtin_sub_overflow(l.number, r.number, &out);
      if (overflow) {
        throw GroundFailure{GroundError{"integer overflow in '" + print_term(*t.source) + "'", at}};
      }
      return Value::integer(out);
    }
  }
  return {};
}

bool compare(const Value& l, CompareOp op, const Value& r) {
  auto c = l <=> r;
  switch (op) {
    case CompareOp::eq: return c == 0;
    case CompareOp::ne: return c != 0;
    case CompareOp::lt: return c < 0;
    case CompareOp::le: return c <= 0;
    case CompareOp::gt: return c > 0;
    case CompareOp::ge: return c >= 0;
  }
  return false;
}

struct Range {
  AtomId lo = 0;
  AtomId hi = 0;
};

/// Atom ids that can match `atom` under `sub`, restricted to `range`. Copied
/// out because emitting heads during the join grows the index lists.
std::vector<AtomId> candidates(const AtomTable& table, const CAtom& atom, const Substitution& sub,
                               Range range) {
  const std::vector<AtomId>* list = nullptr;
  for (std::size_t pos = 0; pos < atom.args.size() && !list; ++pos) {
    const CTerm& arg = atom.args[pos];
    if (arg.kind == CTerm::Kind::constant) {
      list = &table.by_argument(atom.sig, pos, arg.value);
    } else if (arg.kind == CTerm::Kind::variable && sub[arg.slot]) {
      list = &table.by_argument(atom.sig, pos, *sub[arg.slot]);
    }
  }
  if (!list) list = &table.by_signature(atom.sig);
  auto b = std::lower_bound(list->begin(), list->end(), range.lo);
  auto e = std::lower_bound(b, list->end(), range.hi);
  return {b, e};
}

/// Unifies `atom` with a ground atom; newly bound slots are pushed to `trail`.
bool unify(const CAtom& atom, const GroundAtom& ground, Substitution& sub, std::vector<std::size_t>& trail,
           const SourceSpan& at) {
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    const CTerm& arg = atom.args[i];
    switch (arg.kind) {
      case CTerm::Kind::anonymous:
        break;
      case CTerm::Kind::constant:
        if (!(arg.value == ground.args[i])) return false;
        break;
      case CTerm::Kind::variable:
        if (sub[arg.slot]) {
          if (!(*sub[arg.slot] == ground.args[i])) return false;
        } else {
          sub[arg.slot] = ground.args[i];
          trail.push_back(arg.slot);
        }
        break;
      case CTerm::Kind::binary:
        if (!(evaluate(arg, sub, at) == ground.args[i])) return false;
        break;
    }
  }
  return true;
}

/// Depth-first join over `steps`; `on_match(sub, matched_ids)` per solution.
class Joiner {
 public:
  using Callback = std::function<void(const Substitution&, const std::vector<AtomId>&)>;

  Joiner(const AtomTable& table, const Body& body, const std::vector<Step>& steps,
         const std::vector<Range>& ranges, Callback cb)
      : table_(table), body_(body), steps_(steps), ranges_(ranges), cb_(std::move(cb)),
        matched_(body.positive.size(), 0) {}

  void run(Substitution& sub) { descend(0, sub); }

 private:
  void descend(std::size_t depth, Substitution& sub) {
    if (depth == steps_.size()) {
      cb_(sub, matched_);
      return;
    }
    const Step& step = steps_[depth];
    if (step.kind == Step::Kind::match) {
      const CAtom& atom = body_.positive[step.index];
      std::vector<std::size_t> trail;
      for (AtomId id : candidates(table_, atom, sub, ranges_[step.index])) {
        trail.clear();
        if (unify(atom, table_[id], sub, trail, atom.span)) {
          matched_[step.index] = id;
          descend(depth + 1, sub);
        }
        for (std::size_t s : trail) sub[s].reset();
      }
      return;
    }
    const CComparison& c = body_.comparisons[step.index];
    if (step.kind == Step::Kind::filter) {
      if (compare(evaluate(c.lhs, sub, c.span), c.op, evaluate(c.rhs, sub, c.span))) {
        descend(depth + 1, sub);
      }
      return;
    }
    const CTerm& target = step.target_is_lhs ? c.lhs : c.rhs;
    const CTerm& source = step.target_is_lhs ? c.rhs : c.lhs;
    sub[target.slot] = evaluate(source, sub, c.span);
    descend(depth + 1, sub);
    sub[target.slot].reset();
  }

  const AtomTable& table_;
  const Body& body_;
  const std::vector<Step>& steps_;
  const std::vector<Range>& ranges_;
  Callback cb_;
  std::vector<AtomId> matched_;
};

struct Instance {
  std::size_t rule = 0;
  Substitution sub;
  std::vector<AtomId> positive;
  std::optional<AtomId> head;
};

void collect_integers(const Term& t, std::set<std::int64_t>& out) {
  if (t.kind == Term::Kind::integer) out.insert(t.number);
  for (const auto& op : t.operands) collect_integers(op, out);
}

std::set<std::int64_t> literal_integers(const Program& program) {
  std::set<std::int64_t> out;
  auto atom = [&](const Atom& a) {
    for (const auto& t : a.args) collect_integers(t, out);
  };
  auto literal = [&](const Literal& lit) {
    if (auto* a = std::get_if<AtomLiteral>(&lit)) {
      atom(a->atom);
    } else {
      const auto& c = std::get<Comparison>(lit);
      collect_integers(c.lhs, out);
      collect_integers(c.rhs, out);
    }
  };
  for (const auto& rule : program.rules) {
    if (rule.head) atom(*rule.head);
    for (const auto& e : rule.body) {
      if (auto* a = std::get_if<AtomLiteral>(&e)) atom(a->atom);
      else if (auto* c = std::get_if<Comparison>(&e)) literal(*c);
      else {
        const auto& cond = std::get<Conditional>(e);
        literal(cond.head);
        for (const auto& l : cond.conditions) literal(l);
      }
    }
  }
  return out;
}

class Grounder {
 public:
  Grounder(const Program& program, const GroundOptions& options)
      : program_(program), options_(options), literals_(literal_integers(program)) {}

  GroundProgram run() {
    for (std::size_t i = 0; i < program_.rules.size(); ++i) {
      rules_.push_back(Compiler(program_.rules[i]).compile(i));
      CRule& r = rules_.back();
      std::vector<bool> none(r.slot_count, false);
      r.full_plan = plan(r.body, none, std::nullopt);
      for (std::size_t p = 0; p < r.body.positive.size(); ++p) {
        r.delta_plans.push_back(plan(r.body, none, p));
      }
    }

    // Round 0: rules without positive atoms.
    for (const auto& r : rules_) {
      if (!r.body.positive.empty()) continue;
      std::vector<Range> ranges;
      join(r, r.full_plan, ranges);
    }
    ++stats_.rounds;

    AtomId old_end = 0;
    auto delta_end = static_cast<AtomId>(atoms_.size());
    while (old_end < delta_end) {
      for (const auto& r : rules_) {
        for (std::size_t p = 0; p < r.body.positive.size(); ++p) {
          const auto& ids = atoms_.by_signature(r.body.positive[p].sig);
          auto first_new = std::lower_bound(ids.begin(), ids.end(), old_end);
          if (first_new == ids.end() || *first_new >= delta_end) continue;
          std::vector<Range> ranges(r.body.positive.size());
          for (std::size_t j = 0; j < ranges.size(); ++j) {
            if (j < p) ranges[j] = {0, old_end};
            else if (j == p) ranges[j] = {old_end, delta_end};
            else ranges[j] = {0, delta_end};
          }
          join(r, r.delta_plans[p], ranges);
        }
      }
      old_end = delta_end;
      delta_end = static_cast<AtomId>(atoms_.size());
      ++stats_.rounds;
    }

    GroundProgram out;
    out.rules.reserve(instances_.size());
    for (const auto& inst : instances_) out.rules.push_back(finalize(inst));
    out.source = program_;
    out.atoms = std::move(atoms_);
    out.stats = stats_;
    return out;
  }

 private:
  void join(const CRule& r, const std::vector<Step>& steps, const std::vector<Range>& ranges) {
    Substitution sub(r.slot_count);
    Joiner joiner(atoms_, r.body, steps, ranges,
                  [&](const Substitution& s, const std::vector<AtomId>& matched) { emit(r, s, matched); });
    joiner.run(sub);
  }

  bool in_domain(const Value& v) const {
    if (v.type != Value::Type::integer) return true;
    if (v.number >= -options_.domain_bound && v.number <= options_.domain_bound) return true;
    return literals_.count(v.number) > 0;
  }

  void emit(const CRule& r, const Substitution& sub, const std::vector<AtomId>& matched) {
    if (++stats_.instantiations > options_.instantiation_ceiling) {
      throw GroundFailure{GroundError{"instantiation ceiling " +
                                          std::to_string(options_.instantiation_ceiling) +
                                          " exceeded while grounding '" + print_rule(*r.rule) + "'",
                                      r.rule->span}};
    }
    Instance inst{r.index, sub, matched, std::nullopt};
    if (r.head) {
      GroundAtom head{r.head->sig.name, {}};
      for (const auto& arg : r.head->args) {
        Value v = evaluate(arg, sub, r.head->span);
        if (!in_domain(v)) {
          ++stats_.dropped_out_of_domain;
          return;
        }
        head.args.push_back(std::move(v));
      }
      inst.head = atoms_.insert(std::move(head)).first;
    }
    instances_.push_back(std::move(inst));
  }

  /// Ground atoms matching a (possibly anonymous-containing) negated atom.
  NegatedSet resolve_negated(const CAtom& atom, const Substitution& sub) const {
    bool wildcard = std::any_of(atom.args.begin(), atom.args.end(),
                                [](const CTerm& t) { return t.kind == CTerm::Kind::anonymous; });
    if (!wildcard) {
      GroundAtom g{atom.sig.name, {}};
      for (const auto& arg : atom.args) g.args.push_back(evaluate(arg, sub, atom.span));
      if (auto id = atoms_.find(g)) return {*id};
      return {};
    }
    std::vector<std::optional<Value>> fixed(atom.args.size());
    for (std::size_t i = 0; i < atom.args.size(); ++i) {
      if (atom.args[i].kind != CTerm::Kind::anonymous) fixed[i] = evaluate(atom.args[i], sub, atom.span);
    }
    NegatedSet out;
    for (AtomId id : atoms_.by_signature(atom.sig)) {
      const GroundAtom& g = atoms_[id];
      bool ok = true;
      for (std::size_t i = 0; i < fixed.size() && ok; ++i) {
        if (fixed[i] && !(*fixed[i] == g.args[i])) ok = false;
      }
      if (ok) out.push_back(id);
    }
    return out;
  }

  GroundConditional expand(const CConditional& cond, const Substitution& outer) {
    GroundConditional out;
    std::vector<bool> bound(outer.size());
    for (std::size_t i = 0; i < outer.size(); ++i) bound[i] = outer[i].has_value();
    std::vector<Step> steps = plan(cond.conditions, bound, std::nullopt);
    auto everything = static_cast<AtomId>(atoms_.size());
    std::vector<Range> ranges(cond.conditions.positive.size(), Range{0, everything});
    Substitution sub = outer;
    Joiner joiner(atoms_, cond.conditions, steps, ranges,
                  [&](const Substitution& s, const std::vector<AtomId>& matched) {
                    GroundClause clause;
                    clause.condition_positive = matched;
                    for (const auto& neg : cond.negative_conditions) {
                      NegatedSet set = resolve_negated(neg, s);
                      clause.condition_negative.insert(clause.condition_negative.end(), set.begin(), set.end());
                    }
                    const CLiteral& head = cond.head;
                    if (!head.is_atom) {
                      const auto& c = head.comparison;
                      if (compare(evaluate(c.lhs, s, c.span), c.op, evaluate(c.rhs, s, c.span))) return;
                    } else if (head.negated) {
                      clause.head_negated = true;
                      clause.head = resolve_negated(head.atom, s);
                      if (clause.head.empty()) return;
                    } else {
                      GroundAtom g{head.atom.sig.name, {}};
                      for (const auto& arg : head.atom.args) g.args.push_back(evaluate(arg, s, head.atom.span));
                      if (auto id = atoms_.find(g)) clause.head.push_back(*id);
                    }
                    out.clauses.push_back(std::move(clause));
                  });
    joiner.run(sub);
    return out;
  }

  GroundRule finalize(const Instance& inst) {
    const CRule& r = rules_[inst.rule];
    GroundRule out;
    out.head = inst.head;
    out.positive = inst.positive;
    out.source_rule = inst.rule;
    for (const auto& neg : r.negative) {
      NegatedSet set = resolve_negated(neg, inst.sub);
      out.negative.insert(out.negative.end(), set.begin(), set.end());
    }
    for (const auto& cond : r.conditionals) {
      GroundConditional gc = expand(cond, inst.sub);
      if (!gc.clauses.empty()) out.conditionals.push_back(std::move(gc));
    }
    return out;
  }

  const Program& program_;
  GroundOptions options_;
  std::set<std::int64_t> literals_;
  std::vector<CRule> rules_;
  AtomTable atoms_;
  std::vector<Instance> instances_;
  GroundStats stats_;
};

std::string join_atoms(const AtomTable& atoms, const std::vector<AtomId>& ids, std::string_view prefix) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ", ";
    out += std::string(prefix) + to_string(atoms[ids[i]]);
  }
  return out;
}

}  // namespace

GroundResult ground(const Program& program, const GroundOptions& options) {
  try {
    return Grounder(program, options).run();
  } catch (GroundFailure& f) {
    return std::move(f.error);
  }
}

std::string print_ground_rule(const GroundProgram& program, const GroundRule& rule) {
  const AtomTable& atoms = program.atoms;
  std::vector<std::string> parts;
  if (!rule.positive.empty()) parts.push_back(join_atoms(atoms, rule.positive, ""));
  if (!rule.negative.empty()) parts.push_back(join_atoms(atoms, rule.negative, "not "));
  for (const auto& cond : rule.conditionals) {
    std::vector<std::string> clauses;
    for (const auto& clause : cond.clauses) {
      std::string head;
      if (clause.head.empty()) head = "#false";
      else head = join_atoms(atoms, clause.head, clause.head_negated ? "not " : "");
      std::string conds = join_atoms(atoms, clause.condition_positive, "");
      std::string negs = join_atoms(atoms, clause.condition_negative, "not ");
      if (!conds.empty() && !negs.empty()) conds += ", ";
      clauses.push_back("{" + head + " : " + conds + negs + "}");
    }
    std::string joined;
    for (const auto& c : clauses) joined += (joined.empty() ? "" : " & ") + c;
    parts.push_back(joined);
  }
  std::string out = rule.head ? to_string(atoms[*rule.head]) : "";
  if (!parts.empty()) {
    out += rule.head ? " :- " : ":- ";
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? ", " : "") + parts[i];
  }
  return out + ".";
}

std::string print_ground_program(const GroundProgram& program) {
  std::string out;
  for (const auto& rule : program.rules) out += print_ground_rule(program, rule) + "\n";
  return out;
}

}  // namespace spasp::asp
