#include "ndlr/rules.hpp"

#include <algorithm>
#include <array>
#include <unordered_map>

#include "ndlr/alpha.hpp"
#include "ndlr/contexts.hpp"

namespace ndlr {

namespace {

constexpr std::array<std::pair<Rule, std::string_view>, 15> kNames{{
    {Rule::lbeta, "lbeta"},
    {Rule::cpn, "cpn"},
    {Rule::llet, "llet"},
    {Rule::lapp, "lapp"},
    {Rule::lcase, "lcase"},
    {Rule::case_, "case"},
    {Rule::ndl, "ndl"},
    {Rule::ndr, "ndr"},
    {Rule::ldel, "ldel"},
    {Rule::ldelcyc1, "ldelcyc1"},
    {Rule::ldelcyc2, "ldelcyc2"},
    {Rule::lcv, "lcv"},
    {Rule::cpt, "cpt"},
    {Rule::cpd, "cpd"},
    {Rule::ucp, "ucp"},
}};

}  // namespace

std::string_view rule_name(Rule r) {
  for (const auto& [rule, name] : kNames)
    if (rule == r) return name;
  return "?";
}

std::optional<Rule> rule_from_name(std::string_view name) {
  for (const auto& [rule, n] : kNames)
    if (n == name) return rule;
  return std::nullopt;
}

const std::vector<Rule>& base_rules() {
  static const std::vector<Rule> rules{Rule::lbeta, Rule::cpn,   Rule::llet, Rule::lapp,
                                       Rule::lcase, Rule::case_, Rule::ndl,  Rule::ndr};
  return rules;
}

const std::vector<Rule>& all_rules() {
  static const std::vector<Rule> rules = [] {
    std::vector<Rule> out;
    for (const auto& [rule, name] : kNames) out.push_back(rule);
    return out;
  }();
  return rules;
}

std::optional<std::vector<Rule>> family_members(std::string_view family) {
  if (family == "lll" || family == "ll") return std::vector<Rule>{Rule::llet, Rule::lapp, Rule::lcase};
  if (family == "nd") return std::vector<Rule>{Rule::ndl, Rule::ndr};
  // the standard copy step is the cp instance used during evaluation
  if (family == "cp") return std::vector<Rule>{Rule::cpt, Rule::cpd, Rule::cpn};
  if (family == "ldelcyc") return std::vector<Rule>{Rule::ldelcyc1, Rule::ldelcyc2};
  return std::nullopt;
}

bool in_family(Rule r, std::string_view family) {
  auto members = family_members(family);
  return members && std::find(members->begin(), members->end(), r) != members->end();
}

std::optional<std::vector<Rule>> resolve_label(std::string_view name) {
  if (auto r = rule_from_name(name)) return std::vector<Rule>{*r};
  return family_members(name);
}

// ---------------------------------------------------------------------------
// Scope helpers

std::optional<Position> binding_letrec(const Expr& e, const Position& occurrence,
                                       const std::string& name) {
  // innermost binder of `name` strictly above the occurrence
  std::optional<Position> found;
  bool letrec_bound = false;
  Expr cur = e;
  Position prefix;
  for (const auto& step : occurrence) {
    bool binds = false;
    if (auto* l = cur.get_if<Lam>()) binds = l->binder == name;
    else if (auto* c = cur.get_if<Case>(); c && step.sel == Sel::Alt && step.index < c->alts.size()) {
      const auto& vars = c->alts[step.index].vars;
      binds = std::find(vars.begin(), vars.end(), name) != vars.end();
    } else if (auto* lr = cur.get_if<Letrec>()) {
      if (lr->find(name)) {
        found = prefix;
        letrec_bound = true;
      }
    }
    if (binds) {
      found = prefix;
      letrec_bound = false;
    }
    cur = child(cur, step);
    prefix.push_back(step);
  }
  if (found && letrec_bound) return found;
  return std::nullopt;
}

namespace {

void occurrences_in(const Expr& e, const std::string& name, Position& pos, std::vector<Position>& out) {
  auto visit = [&](PathStep s, const Expr& c) {
    pos.push_back(std::move(s));
    occurrences_in(c, name, pos, out);
    pos.pop_back();
  };
  if (auto* v = e.get_if<Var>()) {
    if (v->name == name) out.push_back(pos);
  } else if (auto* c = e.get_if<Con>()) {
    for (std::size_t i = 0; i < c->args.size(); ++i) visit(con_arg(i), c->args[i]);
  } else if (auto* ch = e.get_if<Choice>()) {
    visit(choice_left(), ch->left);
    visit(choice_right(), ch->right);
  } else if (auto* cs = e.get_if<Case>()) {
    visit(scrutinee(), cs->scrutinee);
    for (std::size_t i = 0; i < cs->alts.size(); ++i) {
      const auto& vars = cs->alts[i].vars;
      if (std::find(vars.begin(), vars.end(), name) == vars.end()) visit(alt(i), cs->alts[i].rhs);
    }
  } else if (auto* a = e.get_if<App>()) {
    visit(app_fun(), a->fun);
    visit(app_arg(), a->arg);
  } else if (auto* l = e.get_if<Lam>()) {
    if (l->binder != name) visit(lam_body(), l->body);
  } else {
    auto& lr = e.as<Letrec>();
    if (lr.find(name)) return;
    for (const auto& b : lr.bindings) visit(binding(b.name), b.rhs);
    visit(let_body(), lr.body);
  }
}

[[noreturn]] void fail(const std::string& msg) { throw RuleError(msg); }

Expr at(const Expr& e, const Position& pos) {
  try {
    return subterm(e, pos);
  } catch (const InvalidPosition& ex) {
    fail(ex.what());
  }
}

Position parent_of(const Position& p) { return Position(p.begin(), p.end() - 1); }

// Splits an application spine into head and arguments.
Expr spine(const Expr& e, std::vector<Expr>& args) {
  Expr cur = e;
  while (auto* a = cur.get_if<App>()) {
    args.push_back(a->arg);
    cur = a->fun;
  }
  std::reverse(args.begin(), args.end());
  return cur;
}

}  // namespace

std::vector<Position> free_occurrences(const Expr& e, const std::string& name) {
  std::vector<Position> out;
  Position pos;
  occurrences_in(e, name, pos, out);
  return out;
}

// ---------------------------------------------------------------------------
// Base calculus

Expr apply_lbeta(const Expr& e, const Position& pos) {
  auto t = at(e, pos);
  auto* a = t.get_if<App>();
  if (!a || !a->fun.is<Lam>()) fail("lbeta needs an abstraction applied to an argument");
  const auto& l = a->fun.as<Lam>();
  return replace(e, pos, letrec({{l.binder, a->arg}}, l.body));
}

Expr apply_lapp(const Expr& e, const Position& pos) {
  auto t = at(e, pos);
  auto* a = t.get_if<App>();
  if (!a || !a->fun.is<Letrec>()) fail("lapp needs a letrec in function position");
  const auto& lr = a->fun.as<Letrec>();
  return replace(e, pos, letrec(lr.bindings, app(lr.body, a->arg)));
}

Expr apply_lcase(const Expr& e, const Position& pos) {
  auto t = at(e, pos);
  auto* c = t.get_if<Case>();
  if (!c || !c->scrutinee.is<Letrec>()) fail("lcase needs a letrec as case scrutinee");
  const auto& lr = c->scrutinee.as<Letrec>();
  return replace(e, pos, letrec(lr.bindings, case_of(c->type, lr.body, c->alts)));
}

Expr apply_llet(const Expr& e, const Position& pos) {
  if (pos.empty()) fail("llet needs a letrec directly inside another letrec");
  auto outer_pos = parent_of(pos);
  auto outer = at(e, outer_pos);
  auto* lr = outer.get_if<Letrec>();
  auto inner = at(e, pos);
  auto* in = inner.get_if<Letrec>();
  if (!lr || !in) fail("llet needs a letrec directly inside another letrec");
  auto bindings = lr->bindings;
  Expr body = lr->body;
  if (pos.back().sel == Sel::LetBody) {
    body = in->body;
  } else {
    auto i = lr->index_of(pos.back().binder);
    bindings[static_cast<std::size_t>(i)].rhs = in->body;
  }
  bindings.insert(bindings.end(), in->bindings.begin(), in->bindings.end());
  return replace(e, outer_pos, letrec(std::move(bindings), std::move(body)));
}

Expr apply_nd(const Expr& e, const Position& pos, bool left) {
  auto t = at(e, pos);
  auto* c = t.get_if<Choice>();
  if (!c) fail(std::string(left ? "ndl" : "ndr") + " needs a choice expression");
  return replace(e, pos, left ? c->left : c->right);
}

Expr apply_case_direct(const Expr& e, const Position& pos) {
  auto t = at(e, pos);
  auto* c = t.get_if<Case>();
  if (!c) fail("case needs a case expression");
  auto* k = c->scrutinee.get_if<Con>();
  if (!k) fail("case scrutinee is not a constructor application");
  if (!k->saturated()) fail("constructor " + k->name + " is not saturated");
  auto it = std::find_if(c->alts.begin(), c->alts.end(),
                         [&](const Alt& a) { return a.constructor == k->name; });
  if (it == c->alts.end()) fail("constructor " + k->name + " does not belong to type " + c->type);
  std::vector<Binding> bs;
  for (std::size_t i = 0; i < k->args.size(); ++i) bs.push_back({it->vars[i], k->args[i]});
  return replace(e, pos, letrec(std::move(bs), it->rhs));
}

namespace {

struct ChainCase {
  Position letrec_pos;
  std::vector<std::string> links;  // x_1 (the constructor) first
  std::string constructor;
  std::size_t arity = 0;
  std::size_t total_args = 0;
};

// Reads the chain x_m -> ... -> x_1 = c ... behind the case at `pos`.
ChainCase analyse_chain(const Expr& e, const Position& pos) {
  auto t = at(e, pos);
  auto* cs = t.get_if<Case>();
  if (!cs) fail("case needs a case expression");
  std::vector<Expr> args;
  auto head = spine(cs->scrutinee, args);
  auto* v = head.get_if<Var>();
  if (!v) fail("case scrutinee is neither a constructor nor bound by a letrec chain");
  auto lpos = binding_letrec(e, pos, v->name);
  if (!lpos) fail("variable " + v->name + " is not bound by an enclosing letrec");
  const auto lnode = at(e, *lpos);
  const auto& lr = lnode.as<Letrec>();
  ChainCase out;
  out.letrec_pos = *lpos;
  out.total_args = args.size();
  std::string x = v->name;
  while (true) {
    if (std::find(out.links.begin(), out.links.end(), x) != out.links.end())
      fail("binding chain through " + x + " is cyclic");
    out.links.push_back(x);
    const auto* b = lr.find(x);
    if (!b) fail("variable " + x + " is not bound by the same letrec");
    std::vector<Expr> link_args;
    auto h = spine(b->rhs, link_args);
    out.total_args += link_args.size();
    if (auto* k = h.get_if<Con>()) {
      out.constructor = k->name;
      out.arity = k->arity;
      out.total_args += k->args.size();
      if (!link_args.empty() && !k->saturated()) fail("malformed constructor application");
      break;
    }
    auto* hv = h.get_if<Var>();
    if (!hv) fail("binding of " + x + " is not a constructor application or indirection");
    x = hv->name;
  }
  std::reverse(out.links.begin(), out.links.end());
  auto alt_it = std::find_if(cs->alts.begin(), cs->alts.end(),
                             [&](const Alt& a) { return a.constructor == out.constructor; });
  if (alt_it == cs->alts.end())
    fail("constructor " + out.constructor + " does not belong to type " + cs->type);
  if (out.total_args != out.arity)
    fail("assembled application of " + out.constructor + " has " + std::to_string(out.total_args) +
         " arguments, arity is " + std::to_string(out.arity));
  return out;
}

}  // namespace

bool case_chain_applicable(const Expr& e, const Position& pos) {
  try {
    analyse_chain(e, pos);
    return true;
  } catch (const RuleError&) {
    return false;
  }
}

Expr apply_case_chain(const Expr& e, const Position& pos) {
  auto chain = analyse_chain(e, pos);
  NameSupply supply(e);
  auto lnode = at(e, chain.letrec_pos);
  Position rel(pos.begin() + static_cast<std::ptrdiff_t>(chain.letrec_pos.size()), pos.end());

  auto site = at(lnode, rel);
  const auto& cs = site.as<Case>();
  std::vector<Expr> site_args;
  spine(cs.scrutinee, site_args);
  const auto& chosen = *std::find_if(cs.alts.begin(), cs.alts.end(),
                                     [&](const Alt& a) { return a.constructor == chain.constructor; });

  // y's are numbered along the chain first, then the case site's own arguments
  std::vector<std::string> ys;
  for (std::size_t i = 0; i < chain.total_args; ++i) ys.push_back(supply.fresh("y"));
  std::size_t chain_args = chain.total_args - site_args.size();

  std::vector<Binding> site_bs;
  for (std::size_t i = 0; i < site_args.size(); ++i) site_bs.push_back({ys[chain_args + i], site_args[i]});
  for (std::size_t i = 0; i < chosen.vars.size(); ++i) site_bs.push_back({chosen.vars[i], var(ys[i])});
  auto l1 = replace(lnode, rel, letrec(std::move(site_bs), chosen.rhs));
  const auto& lr = l1.as<Letrec>();

  // y_i follow the chain order x_1, x_2, ..., whatever the binding order
  std::unordered_map<std::string, std::size_t> offset;
  std::size_t next = 0;
  for (const auto& x : chain.links) {
    offset[x] = next;
    std::vector<Expr> args;
    auto h = spine(lr.find(x)->rhs, args);
    next += args.size();
    if (auto* k = h.get_if<Con>()) next += k->args.size();
  }

  std::vector<Binding> out;
  for (const auto& b : lr.bindings) {
    auto off = offset.find(b.name);
    if (off == offset.end()) {
      out.push_back(b);
      continue;
    }
    std::size_t k_next = off->second;
    std::vector<Expr> args;
    auto h = spine(b.rhs, args);
    std::vector<Binding> extra;
    std::vector<Expr> yvars;
    auto take = [&](const Expr& t) {
      extra.push_back({ys[k_next], t});
      yvars.push_back(var(ys[k_next]));
      ++k_next;
    };
    if (auto* k = h.get_if<Con>()) {
      for (const auto& a : k->args) take(a);
      for (const auto& a : args) take(a);
      out.push_back({b.name, con(k->name, k->arity, std::move(yvars))});
    } else {
      for (const auto& a : args) take(a);
      out.push_back({b.name, apps(h, std::move(yvars))});
    }
    out.insert(out.end(), extra.begin(), extra.end());
  }
  return replace(e, chain.letrec_pos, letrec(std::move(out), lr.body));
}

Expr apply_case(const Expr& e, const Position& pos) {
  auto t = at(e, pos);
  auto* c = t.get_if<Case>();
  if (!c) fail("case needs a case expression");
  if (c->scrutinee.is<Con>()) return apply_case_direct(e, pos);
  return apply_case_chain(e, pos);
}


// ---------------------------------------------------------------------------
// Copying and garbage collection

namespace {

struct Occurrence {
  std::string name;
  Position letrec_pos;
};

Occurrence letrec_occurrence(const Expr& e, const Position& occurrence, std::string_view rule) {
  auto t = at(e, occurrence);
  auto* v = t.get_if<Var>();
  if (!v) fail(std::string(rule) + " needs a variable occurrence at " + to_string(occurrence));
  auto lpos = binding_letrec(e, occurrence, v->name);
  if (!lpos) fail("variable " + v->name + " is not bound by a letrec");
  return {v->name, *lpos};
}

// Follows x = y indirections inside one letrec; returns the final binding.
const Binding* follow_indirections(const Letrec& lr, const std::string& start) {
  std::vector<std::string> seen;
  const Binding* b = lr.find(start);
  while (b) {
    auto* v = b->rhs.get_if<Var>();
    if (!v) return b;
    if (std::find(seen.begin(), seen.end(), b->name) != seen.end()) return nullptr;
    seen.push_back(b->name);
    b = lr.find(v->name);
  }
  return nullptr;
}

}  // namespace

Expr apply_cpn(const Expr& e, const Position& occurrence) {
  auto occ = letrec_occurrence(e, occurrence, "cpn");
  auto lnode = at(e, occ.letrec_pos);
  const auto* target = follow_indirections(lnode.as<Letrec>(), occ.name);
  if (!target || !target->rhs.is<Lam>())
    fail("binding chain of " + occ.name + " does not end in an abstraction");
  NameSupply supply(e);
  return replace(e, occurrence, freshen(target->rhs, supply));
}

std::pair<Expr, Rule> apply_cp(const Expr& e, const Position& occurrence) {
  auto occ = letrec_occurrence(e, occurrence, "cp");
  auto lnode = at(e, occ.letrec_pos);
  const auto* b = lnode.as<Letrec>().find(occ.name);
  if (!b->rhs.is<Lam>()) fail(occ.name + " is not bound to an abstraction");
  NameSupply supply(e);
  auto kind = is_surface_context(e, occurrence) ? Rule::cpt : Rule::cpd;
  return {replace(e, occurrence, freshen(b->rhs, supply)), kind};
}

Expr apply_lcv(const Expr& e, const Position& occurrence) {
  auto occ = letrec_occurrence(e, occurrence, "lcv");
  auto lnode = at(e, occ.letrec_pos);
  const auto* b = lnode.as<Letrec>().find(occ.name);
  auto* y = b->rhs.get_if<Var>();
  if (!y) fail(occ.name + " is not bound to a variable");
  if (y->name == occ.name) fail(occ.name + " is bound to itself");
  return replace(e, occurrence, b->rhs);
}

namespace {

struct BindingRef {
  Position letrec_pos;
  std::string name;
};

BindingRef binding_ref(const Expr& e, const Position& pos, std::string_view rule) {
  if (pos.empty() || pos.back().sel != Sel::Binding)
    fail(std::string(rule) + " needs a binding position ending in letB(x)");
  auto lpos = parent_of(pos);
  auto lnode = at(e, lpos);
  if (!lnode.is<Letrec>() || !lnode.as<Letrec>().find(pos.back().binder))
    fail("no binding " + pos.back().binder + " at " + to_string(lpos));
  return {lpos, pos.back().binder};
}

std::vector<Binding> without(const std::vector<Binding>& bs, const std::vector<std::string>& names) {
  std::vector<Binding> out;
  for (const auto& b : bs)
    if (std::find(names.begin(), names.end(), b.name) == names.end()) out.push_back(b);
  return out;
}

// Relative position of the single inlinable occurrence of `x`, or an explanation.
std::variant<Position, std::string> ucp_target(const Letrec& lr, const std::string& x) {
  std::vector<Position> occs;
  for (const auto& b : lr.bindings)
    for (auto& p : free_occurrences(b.rhs, x)) {
      Position full{binding(b.name)};
      full.insert(full.end(), p.begin(), p.end());
      occs.push_back(std::move(full));
    }
  for (auto& p : free_occurrences(lr.body, x)) {
    Position full{let_body()};
    full.insert(full.end(), p.begin(), p.end());
    occs.push_back(std::move(full));
  }
  if (occs.size() != 1)
    return x + " occurs " + std::to_string(occs.size()) + " times, ucp needs exactly one occurrence";
  const auto& p = occs.front();
  if (p[0].sel == Sel::Binding && p[0].binder == x) return x + " occurs in its own right-hand side";
  for (std::size_t i = 1; i < p.size(); ++i)
    if (p[i].sel == Sel::LamBody) return "the occurrence of " + x + " is not in a surface context";
  return p;
}

}  // namespace

Expr apply_ldel(const Expr& e, const Position& pos) {
  auto ref = binding_ref(e, pos, "ldel");
  auto lnode = at(e, ref.letrec_pos);
  const auto& lr = lnode.as<Letrec>();
  if (occurs_free(lr.body, ref.name)) fail(ref.name + " occurs in the letrec body");
  for (const auto& b : lr.bindings)
    if (b.name != ref.name && occurs_free(b.rhs, ref.name))
      fail(ref.name + " occurs in the binding of " + b.name);
  return replace(e, ref.letrec_pos, letrec(without(lr.bindings, {ref.name}), lr.body));
}

Expr apply_ldelcyc(const Expr& e, const Position& letrec_pos, const std::vector<std::string>& group) {
  auto lnode = at(e, letrec_pos);
  auto* lr = lnode.get_if<Letrec>();
  if (!lr) fail("ldelcyc needs a letrec at " + to_string(letrec_pos));
  if (group.empty()) fail("ldelcyc needs at least one binder to drop");
  for (const auto& x : group)
    if (!lr->find(x)) fail("no binding " + x + " in this letrec");
  auto kept = without(lr->bindings, group);
  for (const auto& x : group) {
    if (occurs_free(lr->body, x)) fail(x + " occurs in the letrec body");
    for (const auto& b : kept)
      if (occurs_free(b.rhs, x)) fail(x + " occurs in the kept binding of " + b.name);
  }
  return replace(e, letrec_pos, letrec(std::move(kept), lr->body));
}

Expr apply_ucp(const Expr& e, const Position& pos) {
  auto ref = binding_ref(e, pos, "ucp");
  auto lnode = at(e, ref.letrec_pos);
  const auto& lr = lnode.as<Letrec>();
  auto target = ucp_target(lr, ref.name);
  if (auto* why = std::get_if<std::string>(&target)) fail(*why);
  const auto& rel = std::get<Position>(target);
  auto s = lr.find(ref.name)->rhs;
  auto filled = replace(lnode, rel, s).as<Letrec>();
  return replace(e, ref.letrec_pos, letrec(without(filled.bindings, {ref.name}), filled.body));
}

// ---------------------------------------------------------------------------
// Generic interface

Position redex_root(const Expr& e, const Redex& r) {
  switch (r.rule) {
    case Rule::llet:
    case Rule::ldel:
    case Rule::ucp:
      return r.pos.empty() ? r.pos : parent_of(r.pos);
    case Rule::cpn:
    case Rule::cpt:
    case Rule::cpd:
    case Rule::lcv: {
      auto t = at(e, r.pos);
      if (auto* v = t.get_if<Var>())
        if (auto lpos = binding_letrec(e, r.pos, v->name)) return *lpos;
      return r.pos;
    }
    default:
      return r.pos;
  }
}

Expr apply(const Expr& e, const Redex& r) {
  switch (r.rule) {
    case Rule::lbeta: return apply_lbeta(e, r.pos);
    case Rule::cpn: return apply_cpn(e, r.pos);
    case Rule::llet: return apply_llet(e, r.pos);
    case Rule::lapp: return apply_lapp(e, r.pos);
    case Rule::lcase: return apply_lcase(e, r.pos);
    case Rule::case_: return apply_case(e, r.pos);
    case Rule::ndl: return apply_nd(e, r.pos, true);
    case Rule::ndr: return apply_nd(e, r.pos, false);
    case Rule::ldel: return apply_ldel(e, r.pos);
    case Rule::ldelcyc1: {
      auto lnode = at(e, r.pos);
      if (auto* lr = lnode.get_if<Letrec>(); lr && r.group.size() >= lr->bindings.size())
        fail("ldelcyc1 must keep at least one binding");
      return apply_ldelcyc(e, r.pos, r.group);
    }
    case Rule::ldelcyc2: {
      auto lnode = at(e, r.pos);
      auto* lr = lnode.get_if<Letrec>();
      if (!lr) fail("ldelcyc2 needs a letrec at " + to_string(r.pos));
      std::vector<std::string> all;
      for (const auto& b : lr->bindings) all.push_back(b.name);
      return apply_ldelcyc(e, r.pos, all);
    }
    case Rule::lcv: return apply_lcv(e, r.pos);
    case Rule::cpt:
    case Rule::cpd: {
      auto [out, kind] = apply_cp(e, r.pos);
      if (kind != r.rule)
        fail("copy target is " + std::string(kind == Rule::cpt ? "" : "not ") +
             "in a surface context, so the step is " + std::string(rule_name(kind)));
      return out;
    }
    case Rule::ucp: return apply_ucp(e, r.pos);
  }
  fail("unknown rule");
}

namespace {

struct Finder {
  const Expr& root;
  const std::vector<Rule>& rules;
  std::vector<Redex> out;
  struct Scope {
    std::string name;
    const Letrec* letrec;  // null for lambda and pattern binders
    Position letrec_pos;
  };
  std::vector<Scope> scope;
  Position pos;
  std::vector<bool> under_lam;

  bool want(Rule r) const { return std::find(rules.begin(), rules.end(), r) != rules.end(); }
  void add(Rule r, Position p, std::vector<std::string> group = {}) {
    if (want(r)) out.push_back({r, std::move(p), std::move(group)});
  }

  const Scope* lookup(const std::string& name) const {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->name == name) return &*it;
    return nullptr;
  }

  void visit(PathStep s, const Expr& c, bool lam = false) {
    pos.push_back(std::move(s));
    under_lam.push_back(lam || under_lam.back());
    walk(c);
    under_lam.pop_back();
    pos.pop_back();
  }

  void variable(const Var& v) {
    const auto* sc = lookup(v.name);
    if (!sc || !sc->letrec) return;
    const auto* b = sc->letrec->find(v.name);
    if (b->rhs.is<Lam>()) add(under_lam.back() ? Rule::cpd : Rule::cpt, pos);
    if (auto* y = b->rhs.get_if<Var>(); y && y->name != v.name) add(Rule::lcv, pos);
    if (const auto* end = follow_indirections(*sc->letrec, v.name); end && end->rhs.is<Lam>())
      add(Rule::cpn, pos);
  }

  void letrec_node(const Letrec& lr) {
    if (!pos.empty() && (pos.back().sel == Sel::LetBody || pos.back().sel == Sel::Binding)) {
      // parent is a letrec exactly when the last selector enters one
      add(Rule::llet, pos);
    }
    auto m = lr.bindings.size();
    std::vector<std::vector<bool>> occurs(m, std::vector<bool>(m));
    std::vector<bool> in_body(m);
    for (std::size_t i = 0; i < m; ++i) {
      in_body[i] = occurs_free(lr.body, lr.bindings[i].name);
      for (std::size_t j = 0; j < m; ++j) occurs[i][j] = occurs_free(lr.bindings[j].rhs, lr.bindings[i].name);
    }
    for (std::size_t i = 0; i < m; ++i) {
      bool used = in_body[i];
      for (std::size_t j = 0; j < m; ++j) used = used || (j != i && occurs[i][j]);
      if (!used) add(Rule::ldel, extend(pos, binding(lr.bindings[i].name)));
      if (want(Rule::ucp) && std::holds_alternative<Position>(ucp_target(lr, lr.bindings[i].name)))
        add(Rule::ucp, extend(pos, binding(lr.bindings[i].name)));
    }
    if ((want(Rule::ldelcyc1) || want(Rule::ldelcyc2)) && m <= 12) {
      for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
        bool ok = true;
        for (std::size_t i = 0; i < m && ok; ++i) {
          if (!(mask >> i & 1)) continue;
          if (in_body[i]) ok = false;
          for (std::size_t j = 0; j < m && ok; ++j)
            if (!(mask >> j & 1) && occurs[i][j]) ok = false;
        }
        if (!ok) continue;
        std::vector<std::string> group;
        for (std::size_t i = 0; i < m; ++i)
          if (mask >> i & 1) group.push_back(lr.bindings[i].name);
        if (group.size() == m) add(Rule::ldelcyc2, pos);
        else add(Rule::ldelcyc1, pos, std::move(group));
      }
    }
  }

  void walk(const Expr& e) {
    if (auto* v = e.get_if<Var>()) {
      variable(*v);
    } else if (auto* c = e.get_if<Con>()) {
      for (std::size_t i = 0; i < c->args.size(); ++i) visit(con_arg(i), c->args[i]);
    } else if (auto* ch = e.get_if<Choice>()) {
      add(Rule::ndl, pos);
      add(Rule::ndr, pos);
      visit(choice_left(), ch->left);
      visit(choice_right(), ch->right);
    } else if (auto* cs = e.get_if<Case>()) {
      if (cs->scrutinee.is<Letrec>()) add(Rule::lcase, pos);
      if (want(Rule::case_)) {
        if (auto* k = cs->scrutinee.get_if<Con>()) {
          bool typed = std::any_of(cs->alts.begin(), cs->alts.end(),
                                   [&](const Alt& a) { return a.constructor == k->name; });
          if (k->saturated() && typed) add(Rule::case_, pos);
        } else if (case_chain_applicable(root, pos)) {
          add(Rule::case_, pos);
        }
      }
      visit(scrutinee(), cs->scrutinee);
      for (std::size_t i = 0; i < cs->alts.size(); ++i) {
        for (const auto& x : cs->alts[i].vars) scope.push_back({x, nullptr, {}});
        visit(alt(i), cs->alts[i].rhs);
        scope.resize(scope.size() - cs->alts[i].vars.size());
      }
    } else if (auto* a = e.get_if<App>()) {
      if (a->fun.is<Lam>()) add(Rule::lbeta, pos);
      if (a->fun.is<Letrec>()) add(Rule::lapp, pos);
      visit(app_fun(), a->fun);
      visit(app_arg(), a->arg);
    } else if (auto* l = e.get_if<Lam>()) {
      scope.push_back({l->binder, nullptr, {}});
      visit(lam_body(), l->body, true);
      scope.pop_back();
    } else {
      auto& lr = e.as<Letrec>();
      letrec_node(lr);
      for (const auto& b : lr.bindings) scope.push_back({b.name, &lr, pos});
      for (const auto& b : lr.bindings) visit(binding(b.name), b.rhs);
      visit(let_body(), lr.body);
      scope.resize(scope.size() - lr.bindings.size());
    }
  }
};

}  // namespace

std::vector<Redex> find_redexes(const Expr& e, const std::vector<Rule>& rules) {
  Finder f{e, rules, {}, {}, {}, {false}};
  f.walk(e);
  return std::move(f.out);
}

std::vector<Redex> find_redexes(const Expr& e) { return find_redexes(e, all_rules()); }

}  // namespace ndlr
