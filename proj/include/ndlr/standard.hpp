#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ndlr/rules.hpp"

namespace ndlr {

enum class StepFlag { Standard, Internal, Plain };
std::string_view flag_name(StepFlag f);  // st, i, plain

struct ReductionStep {
  Redex redex;
  StepFlag flag = StepFlag::Plain;
  Expr before, after;
};

/// Why a term has no standard redex.  FreeVariable covers open terms whose
/// evaluation needs an unbound variable.
enum class StuckClass { TypeError, Cycle, Value, FreeVariable };
std::string_view stuck_name(StuckClass c);

struct StandardRedex {
  enum class Kind { None, Deterministic, NdChoice };
  Kind kind = Kind::None;
  StuckClass stuck = StuckClass::Value;  // meaningful for None
  Redex redex{Rule::lbeta, {}, {}};      // for NdChoice the rule is ndl
};

StandardRedex standard_redex(const Expr& e);
/// No standard redex and the stop is classified as a value.
bool is_whnf(const Expr& e);

/// Whether `r` is the standard redex of `e` (either arm for a choice).
bool is_standard(const Expr& e, const Redex& r);

enum class StepClass { Standard, Internal, NotInReductionContext };
StepClass classify_step(const Expr& e, const Redex& r);

struct EvalResult {
  enum class Outcome { Converged, Stuck, Exhausted };
  Outcome outcome = Outcome::Exhausted;
  Expr final;
  StuckClass stuck = StuckClass::Value;
  std::size_t nd_count = 0;
  std::size_t steps = 0;
  std::vector<ReductionStep> trace;
};

enum class NdPolicy { Left, Right, Given };

/// Iterates the standard redex.  With NdPolicy::Given, `choices` supplies the
/// arm of each successive choice (true = left); running out counts as Exhausted.
EvalResult standard_reduce(const Expr& e, NdPolicy policy, std::size_t step_bound,
                           const std::vector<bool>& choices = {}, bool keep_trace = true);

/// One standard step; nullopt when there is none.  For a choice, `left` picks the arm.
std::optional<ReductionStep> standard_step(const Expr& e, bool left = true);

struct ConvergeSet {
  std::set<std::size_t> counts;  // nd-counts with a converging witness
  std::map<std::size_t, std::vector<std::vector<bool>>> witnesses;  // arm choices per count
  bool exhausted = false;        // some branch hit a bound: counts are a lower approximation
  std::size_t leaves = 0;
  bool free_variable = false;    // some branch stopped on an unbound variable

  std::optional<std::size_t> max_count() const {
    if (counts.empty()) return std::nullopt;
    return *counts.rbegin();
  }
};

struct ConvergeLimits {
  std::size_t step_bound = 200;  // per branch
  std::size_t work_cap = 20000;  // total standard steps across all branches
  bool witnesses = false;
};

/// Explores every arm of every choice breadth-first.
ConvergeSet converges_set(const Expr& e, const ConvergeLimits& limits = {});

std::string format_step(const ReductionStep& s);
std::string format_result(const EvalResult& r);

}  // namespace ndlr
