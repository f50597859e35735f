#include "ndlr/equiv.hpp"

#include <algorithm>

#include "ndlr/alpha.hpp"
#include "ndlr/contexts.hpp"
#include "ndlr/syntax.hpp"

namespace ndlr {

namespace {

std::optional<Position> hole_position(const Expr& e) {
  std::optional<Position> found;
  for_each_position(e, [&](const Position& p, const Expr& sub) {
    if (!found && is_hole(sub)) found = p;
  });
  return found;
}

}  // namespace

std::vector<Expr> enumerate_contexts(const CtxSpec& spec) {
  EnumParams p;
  p.sig = spec.sig;
  p.max_size = spec.max_ctx_size;
  p.max_binders = spec.max_binders;
  p.max_letrec_bindings = spec.max_letrec_bindings;
  auto all = enumerate_hole_terms(p);
  if (spec.restrict_to == CtxMode::AllContexts) return all;
  std::vector<Expr> out;
  for (auto& c : all)
    if (is_reduction_context(c, *hole_position(c))) out.push_back(std::move(c));
  return out;
}

Expr plug(const Expr& context, const Position& hole, const Expr& e) {
  return establish_convention(replace(context, hole, e));
}

Expr plug(const Expr& context, const Expr& e) {
  auto pos = hole_position(context);
  if (!pos) throw SyntaxError("context has no hole");
  return plug(context, *pos, e);
}

std::size_t PreparedContexts::live() const {
  return static_cast<std::size_t>(std::count(inert.begin(), inert.end(), false));
}

PreparedContexts prepare_contexts(std::vector<Expr> contexts, const EquivOptions& opts) {
  PreparedContexts out;
  out.holes.resize(contexts.size());
  std::vector<char> inert(contexts.size(), 0);
  parallel_for(contexts.size(), opts.exec, [&](std::size_t i) {
    auto pos = hole_position(contexts[i]);
    if (!pos) throw SyntaxError("context has no hole: " + pretty(contexts[i]));
    out.holes[i] = *pos;
    auto cs = converges_set(contexts[i], opts.limits);
    inert[i] = !cs.free_variable && !cs.exhausted;
  });
  out.inert.assign(inert.begin(), inert.end());
  out.contexts = std::move(contexts);
  return out;
}

namespace {

struct Slot {
  bool exhausted = false;
  std::optional<std::size_t> unmatched;
  std::string detail;
};

// One context, one direction: does C[t] match the best nd-count of C[s]?
void judge(const ConvergeSet& cs, const ConvergeSet& ct, Slot& slot) {
  if (cs.counts.empty()) return;  // nothing to match
  auto best = ct.max_count();
  auto need = *cs.max_count();
  if (best && *best >= need) return;
  if (ct.exhausted) {
    slot.exhausted = true;
    return;
  }
  slot.unmatched = need;
  slot.detail = "C[s] converges with nd-count " + std::to_string(need) + "; C[t] " +
                (best ? "converges only up to nd-count " + std::to_string(*best) : "never converges");
}

EquivVerdict collect(const PreparedContexts& contexts, const std::vector<Slot>& slots) {
  EquivVerdict v;
  for (std::size_t i = 0; i < contexts.size(); ++i) {
    ++v.contexts_checked;
    v.exhausted = v.exhausted || slots[i].exhausted;
    if (slots[i].unmatched) {
      v.kind = EquivVerdict::Kind::Counterexample;
      v.context = contexts.contexts[i];
      v.nd = *slots[i].unmatched;
      v.detail = slots[i].detail;
      break;
    }
  }
  return v;
}

}  // namespace

EquivVerdict check_le_c(const Expr& s, const Expr& t, const PreparedContexts& contexts, const EquivOptions& opts) {
  std::vector<Slot> slots(contexts.size());
  parallel_for(contexts.size(), opts.exec, [&](std::size_t i) {
    if (contexts.inert[i]) return;
    const auto& c = contexts.contexts[i];
    auto cs = converges_set(plug(c, contexts.holes[i], s), opts.limits);
    if (cs.counts.empty()) return;  // C[t] need not be evaluated
    judge(cs, converges_set(plug(c, contexts.holes[i], t), opts.limits), slots[i]);
  });
  return collect(contexts, slots);
}

std::array<EquivVerdict, 2> check_both_ways(const Expr& s, const Expr& t, const PreparedContexts& contexts,
                                            const EquivOptions& opts) {
  std::vector<Slot> forward(contexts.size()), backward(contexts.size());
  parallel_for(contexts.size(), opts.exec, [&](std::size_t i) {
    if (contexts.inert[i]) return;
    const auto& c = contexts.contexts[i];
    auto cs = converges_set(plug(c, contexts.holes[i], s), opts.limits);
    auto ct = converges_set(plug(c, contexts.holes[i], t), opts.limits);
    judge(cs, ct, forward[i]);
    judge(ct, cs, backward[i]);
  });
  return {collect(contexts, forward), collect(contexts, backward)};
}

EquivVerdict check_le_c(const Expr& s, const Expr& t, const CtxSpec& spec, const EquivOptions& opts) {
  return check_le_c(s, t, prepare_contexts(enumerate_contexts(spec), opts), opts);
}

ContextLemmaReport check_context_lemma_instance(const Expr& s, const Expr& t, const CtxSpec& spec,
                                                const EquivOptions& opts) {
  ContextLemmaReport r;
  auto reduction = spec;
  reduction.restrict_to = CtxMode::ReductionContexts;
  auto all = spec;
  all.restrict_to = CtxMode::AllContexts;
  r.reduction_contexts = check_le_c(s, t, reduction, opts);
  r.all_contexts = check_le_c(s, t, all, opts);
  return r;
}

}  // namespace ndlr
