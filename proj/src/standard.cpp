#include "ndlr/standard.hpp"

#include <queue>
#include <unordered_set>

#include "ndlr/alpha.hpp"
#include "ndlr/contexts.hpp"
#include "ndlr/syntax.hpp"

namespace ndlr {

std::string_view flag_name(StepFlag f) {
  switch (f) {
    case StepFlag::Standard: return "st";
    case StepFlag::Internal: return "i";
    case StepFlag::Plain: return "plain";
  }
  return "?";
}

std::string_view stuck_name(StuckClass c) {
  switch (c) {
    case StuckClass::TypeError: return "TypeError";
    case StuckClass::Cycle: return "Cycle";
    case StuckClass::Value: return "Value";
    case StuckClass::FreeVariable: return "FreeVariable";
  }
  return "?";
}

namespace {

StandardRedex stuck(StuckClass c) {
  StandardRedex r;
  r.stuck = c;
  return r;
}

StandardRedex redex(Rule rule, Position pos) {
  StandardRedex r;
  r.kind = StandardRedex::Kind::Deterministic;
  r.redex = {rule, std::move(pos), {}};
  return r;
}

Position parent(const Position& p) { return Position(p.begin(), p.end() - 1); }

bool case_accepts(const Expr& e, const Position& case_pos, const std::string& constructor) {
  auto c = subterm(e, case_pos);
  const auto& alts = c.as<Case>().alts;
  return std::any_of(alts.begin(), alts.end(), [&](const Alt& a) { return a.constructor == constructor; });
}

// The end of the demand chain is a constructor application: walk back through
// the chain collecting applied arguments until a case, the body, or a misuse.
StandardRedex constructor_at_chain_end(const Expr& e, const MaxRedexLocus& locus, const Con& k) {
  std::size_t args = k.args.size();
  for (std::size_t i = locus.chain.size(); i-- > 0;) {
    Position q = locus.chain[i].occurrence;
    while (!q.empty() && q.back().sel == Sel::AppFun) {
      q.pop_back();
      ++args;
    }
    if (args > k.arity) return stuck(StuckClass::TypeError);
    if (!q.empty() && q.back().sel == Sel::Scrutinee) {
      auto case_pos = parent(q);
      if (args == k.arity && case_accepts(e, case_pos, k.name)) return redex(Rule::case_, case_pos);
      return stuck(StuckClass::TypeError);
    }
    if (q.size() == 1 && q[0].sel == Sel::LetBody) return stuck(StuckClass::Value);
    // q is a whole binding x_{i+1} = x_i t..: the application continues the chain
  }
  return stuck(StuckClass::Value);
}

}  // namespace

StandardRedex standard_redex(const Expr& e) {
  auto locus = maximal_reduction_locus(e);
  if (locus.kind == MaxRedexLocus::Kind::Cycle) return stuck(StuckClass::Cycle);
  if (locus.kind == MaxRedexLocus::Kind::NoPosition) return stuck(StuckClass::FreeVariable);
  const auto& pos = locus.position;
  const auto& t = locus.subterm;

  if (t.is<Choice>()) {
    StandardRedex r;
    r.kind = StandardRedex::Kind::NdChoice;
    r.redex = {Rule::ndl, pos, {}};
    return r;
  }
  if (pos.size() == 1 && pos[0].sel == Sel::LetBody && t.is<Letrec>()) return redex(Rule::llet, pos);
  if (!pos.empty() && pos.back().sel == Sel::AppFun) {
    if (t.is<Letrec>()) return redex(Rule::lapp, parent(pos));
    if (t.is<Lam>()) return redex(Rule::lbeta, parent(pos));
    return stuck(StuckClass::TypeError);
  }
  if (!pos.empty() && pos.back().sel == Sel::Scrutinee) {
    if (t.is<Letrec>()) return redex(Rule::lcase, parent(pos));
    if (auto* k = t.get_if<Con>(); k && k->saturated() && case_accepts(e, parent(pos), k->name))
      return redex(Rule::case_, parent(pos));
    return stuck(StuckClass::TypeError);
  }
  if (pos.size() == 1 && pos[0].sel == Sel::Binding) {
    if (t.is<Letrec>()) return redex(Rule::llet, pos);
    if (t.is<Lam>()) {
      // copy to the first place the chain is used by more than a plain indirection
      for (std::size_t i = locus.chain.size(); i-- > 0;) {
        const auto& occ = locus.chain[i].occurrence;
        if (i > 0 && occ.size() == 1 && occ[0].sel == Sel::Binding) continue;
        return redex(Rule::cpn, occ);
      }
    }
    if (auto* k = t.get_if<Con>()) return constructor_at_chain_end(e, locus, *k);
  }
  if (t.is<Lam>() || t.is<Con>()) return stuck(StuckClass::Value);
  return stuck(StuckClass::TypeError);
}

bool is_whnf(const Expr& e) {
  auto r = standard_redex(e);
  return r.kind == StandardRedex::Kind::None && r.stuck == StuckClass::Value;
}

bool is_standard(const Expr& e, const Redex& r) {
  auto sr = standard_redex(e);
  switch (sr.kind) {
    case StandardRedex::Kind::None: return false;
    case StandardRedex::Kind::NdChoice:
      return (r.rule == Rule::ndl || r.rule == Rule::ndr) && r.pos == sr.redex.pos;
    case StandardRedex::Kind::Deterministic:
      if (r.pos != sr.redex.pos) return false;
      if (r.rule == sr.redex.rule) return true;
      // a copy straight from the abstraction's own binding is the same step
      return sr.redex.rule == Rule::cpn && (r.rule == Rule::cpt || r.rule == Rule::cpd);
  }
  return false;
}

StepClass classify_step(const Expr& e, const Redex& r) {
  if (is_standard(e, r)) return StepClass::Standard;
  if (is_reduction_context(e, redex_root(e, r))) return StepClass::Internal;
  return StepClass::NotInReductionContext;
}

std::optional<ReductionStep> standard_step(const Expr& e, bool left) {
  auto sr = standard_redex(e);
  if (sr.kind == StandardRedex::Kind::None) return std::nullopt;
  auto rx = sr.redex;
  if (sr.kind == StandardRedex::Kind::NdChoice) rx.rule = left ? Rule::ndl : Rule::ndr;
  return ReductionStep{rx, StepFlag::Standard, e, apply(e, rx)};
}

EvalResult standard_reduce(const Expr& e, NdPolicy policy, std::size_t step_bound,
                           const std::vector<bool>& choices, bool keep_trace) {
  EvalResult res;
  Expr cur = e;
  std::size_t next_choice = 0;
  while (true) {
    auto sr = standard_redex(cur);
    if (sr.kind == StandardRedex::Kind::None) {
      res.outcome = sr.stuck == StuckClass::Value ? EvalResult::Outcome::Converged
                                                  : EvalResult::Outcome::Stuck;
      res.stuck = sr.stuck;
      break;
    }
    if (res.steps >= step_bound) {
      res.outcome = EvalResult::Outcome::Exhausted;
      break;
    }
    auto rx = sr.redex;
    if (sr.kind == StandardRedex::Kind::NdChoice) {
      bool left = policy == NdPolicy::Left;
      if (policy == NdPolicy::Given) {
        if (next_choice >= choices.size()) {
          res.outcome = EvalResult::Outcome::Exhausted;
          break;
        }
        left = choices[next_choice++];
      }
      rx.rule = left ? Rule::ndl : Rule::ndr;
      ++res.nd_count;
    }
    auto next = apply(cur, rx);
    if (keep_trace) res.trace.push_back({rx, StepFlag::Standard, cur, next});
    cur = std::move(next);
    ++res.steps;
  }
  res.final = cur;
  return res;
}

ConvergeSet converges_set(const Expr& e, const ConvergeLimits& limits) {
  struct Branch {
    Expr term;
    std::size_t nd = 0;
    std::size_t steps = 0;
    std::vector<bool> arms;
  };
  // fewest steps first, so a term reached again with the same nd-count is
  // always a longer path to the same futures
  auto later = [](const Branch& a, const Branch& b) { return a.steps > b.steps; };
  std::priority_queue<Branch, std::vector<Branch>, decltype(later)> queue(later);
  std::unordered_set<std::string> seen;
  queue.push({e, 0, 0, {}});
  ConvergeSet out;
  std::size_t work = 0;
  while (!queue.empty()) {
    auto b = queue.top();
    queue.pop();
    while (true) {
      auto sr = standard_redex(b.term);
      if (sr.kind == StandardRedex::Kind::None) {
        ++out.leaves;
        if (sr.stuck == StuckClass::FreeVariable) out.free_variable = true;
        if (sr.stuck == StuckClass::Value) {
          out.counts.insert(b.nd);
          if (limits.witnesses) out.witnesses[b.nd].push_back(b.arms);
        }
        break;
      }
      if (b.steps >= limits.step_bound || work >= limits.work_cap) {
        out.exhausted = true;
        break;
      }
      ++work;
      ++b.steps;
      if (sr.kind == StandardRedex::Kind::NdChoice) {
        for (bool left : {true, false}) {
          auto rx = sr.redex;
          rx.rule = left ? Rule::ndl : Rule::ndr;
          Branch c{apply(b.term, rx), b.nd + 1, b.steps, b.arms};
          c.arms.push_back(left);
          if (seen.insert(std::to_string(c.nd) + ":" + canonical(c.term)).second) queue.push(std::move(c));
        }
        break;
      }
      b.term = apply(b.term, sr.redex);
    }
    if (work >= limits.work_cap && !queue.empty()) {
      out.exhausted = true;
      break;
    }
  }
  return out;
}

std::string format_step(const ReductionStep& s) {
  return std::string(rule_name(s.redex.rule)) + " " + std::string(flag_name(s.flag)) + " @" +
         to_string(s.redex.pos) + " => " + pretty(s.after);
}

std::string format_result(const EvalResult& r) {
  std::string out = "RESULT ";
  switch (r.outcome) {
    case EvalResult::Outcome::Converged: out += "Converged"; break;
    case EvalResult::Outcome::Stuck: out += "Stuck:" + std::string(stuck_name(r.stuck)); break;
    case EvalResult::Outcome::Exhausted: out += "Exhausted"; break;
  }
  return out + " nd=" + std::to_string(r.nd_count);
}

}  // namespace ndlr
