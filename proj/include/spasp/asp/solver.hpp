#pragma once

#include "spasp/asp/ground.hpp"
#include "spasp/asp/outcome.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spasp::asp {

struct SolveStats {
  /// Predicate strata in evaluation order.
  std::vector<std::vector<Signature>> strata;
  /// Atoms made true while evaluating each stratum.
  std::vector<std::vector<GroundAtom>> derived;
};

/// Stratified evaluation: builds the predicate dependency graph of the source
/// program, rejects cycles through negation (conditional literals count as
/// negative dependencies), computes each stratum's least fixpoint bottom-up,
/// then checks integrity constraints.
SolverOutcome solve(const GroundProgram& program, SolveStats* stats = nullptr);

/// Atoms of `predicate` (any arity), argument tuples sorted.
AnswerSet extract_answers(const StableModel& model, std::string_view predicate);

/// parse -> check_safety -> ground -> solve.
SolverOutcome evaluate(std::string_view text, const GroundOptions& options = {});

// Batch kernels. The serial version is the reference the parallel one is
// tested against. jobs <= 0 uses the OpenMP default.
std::vector<SolverOutcome> evaluate_batch_serial(std::span<const std::string> programs,
                                                 const GroundOptions& options = {});
std::vector<SolverOutcome> evaluate_batch(std::span<const std::string> programs,
                                          const GroundOptions& options = {}, int jobs = 0);

}  // namespace spasp::asp
