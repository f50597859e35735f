#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ndlr/enumerate.hpp"
#include "ndlr/parallel.hpp"
#include "ndlr/standard.hpp"

namespace ndlr {

enum class CtxMode { AllContexts, ReductionContexts };

struct CtxSpec {
  Signature sig;
  std::size_t max_ctx_size = 5;
  CtxMode restrict_to = CtxMode::AllContexts;
  std::size_t max_binders = 2;
  std::size_t max_letrec_bindings = 2;
};

/// One-hole contexts (the hole is the variable `[]`), smallest first.  In
/// ReductionContexts mode only those whose hole is in a reduction context.
std::vector<Expr> enumerate_contexts(const CtxSpec& spec);

/// C[e] without capture avoidance, then renamed apart where binders clash.
Expr plug(const Expr& context, const Expr& e);
Expr plug(const Expr& context, const Position& hole, const Expr& e);

struct EquivOptions {
  ConvergeLimits limits;  // step bound 200 per branch by default
  Execution exec = Execution::Parallel;
};

/// Contexts with their hole positions.  A context whose own evaluation (the
/// hole left as an unbound variable) finishes on every branch without
/// demanding the hole is inert: C[s] and C[t] then take the same steps for
/// every s and t, so it cannot separate anything and is skipped.
struct PreparedContexts {
  std::vector<Expr> contexts;
  std::vector<Position> holes;
  std::vector<bool> inert;

  std::size_t size() const { return contexts.size(); }
  std::size_t live() const;
};

PreparedContexts prepare_contexts(std::vector<Expr> contexts, const EquivOptions& opts = {});

struct EquivVerdict {
  enum class Kind { NoCounterexample, Counterexample };
  Kind kind = Kind::NoCounterexample;
  std::size_t contexts_checked = 0;  // including inert ones
  bool exhausted = false;  // some context was skipped because C[t] hit a bound
  std::optional<Expr> context;
  std::size_t nd = 0;      // the unmatched D
  std::string detail;

  bool counterexample() const { return kind == Kind::Counterexample; }
};

/// Falsifies s <=_c t: a context C and D with C[s] converging at nd-count D
/// while C[t] converges at no B >= D.  Contexts where C[t]'s exploration was
/// cut short are not reported.  The first counterexample in context order wins.
EquivVerdict check_le_c(const Expr& s, const Expr& t, const CtxSpec& spec, const EquivOptions& opts = {});
EquivVerdict check_le_c(const Expr& s, const Expr& t, const PreparedContexts& contexts,
                        const EquivOptions& opts = {});
/// {s <=_c t, t <=_c s} with each C[s] and C[t] evaluated once.  Same verdicts
/// as two check_le_c calls.
std::array<EquivVerdict, 2> check_both_ways(const Expr& s, const Expr& t, const PreparedContexts& contexts,
                                            const EquivOptions& opts = {});

struct ContextLemmaReport {
  EquivVerdict reduction_contexts, all_contexts;
  /// Passing in reduction contexts but failing in all contexts would contradict
  /// the context lemma.
  bool consistent() const {
    return !(!reduction_contexts.counterexample() && all_contexts.counterexample());
  }
};

ContextLemmaReport check_context_lemma_instance(const Expr& s, const Expr& t, const CtxSpec& spec,
                                                const EquivOptions& opts = {});

}  // namespace ndlr
