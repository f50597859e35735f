#pragma once

// Reference implementations used only by the tests.  They are written from the
// definitions directly and share no code with the library beyond the Expr
// constructors and position plumbing.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ndlr/enumerate.hpp"
#include "ndlr/expr.hpp"
#include "ndlr/position.hpp"
#include "ndlr/rules.hpp"

namespace oracle {

using namespace ndlr;

// ---------------------------------------------------------------------------
// Brute-force enumeration: no memoisation, alpha classes collapsed by trying
// every binding order of every letrec and keeping the least serialisation.

inline void serialise_all(const Expr& e, std::map<std::string, std::size_t> env, std::size_t next,
                          std::vector<std::string>& out);

inline std::vector<std::string> serialise_all(const Expr& e, const std::map<std::string, std::size_t>& env,
                                              std::size_t next) {
  std::vector<std::string> out;
  serialise_all(e, env, next, out);
  return out;
}

// all concatenations a + b for a in xs, b in ys
inline std::vector<std::string> product(const std::vector<std::string>& xs, const std::vector<std::string>& ys) {
  std::vector<std::string> out;
  for (const auto& a : xs)
    for (const auto& b : ys) out.push_back(a + b);
  return out;
}

inline void serialise_all(const Expr& e, std::map<std::string, std::size_t> env, std::size_t next,
                          std::vector<std::string>& out) {
  if (const auto* v = e.get_if<Var>()) {
    auto it = env.find(v->name);
    out.push_back(it == env.end() ? "F" + v->name + " " : "v" + std::to_string(it->second) + " ");
  } else if (const auto* c = e.get_if<Con>()) {
    std::vector<std::string> acc{"C" + c->name + "/" + std::to_string(c->args.size()) + "("};
    for (const auto& a : c->args) acc = product(acc, serialise_all(a, env, next));
    for (auto& s : acc) out.push_back(s + ")");
  } else if (const auto* ch = e.get_if<Choice>()) {
    auto acc = product({"N("}, serialise_all(ch->left, env, next));
    acc = product(acc, serialise_all(ch->right, env, next));
    for (auto& s : acc) out.push_back(s + ")");
  } else if (const auto* cs = e.get_if<Case>()) {
    auto acc = product({"K" + cs->type + "("}, serialise_all(cs->scrutinee, env, next));
    for (const auto& alt : cs->alts) {
      auto inner = env;
      std::size_t n = next;
      for (const auto& x : alt.vars) inner[x] = n++;
      acc = product(acc, product({"|" + alt.constructor + ":"}, serialise_all(alt.rhs, inner, n)));
    }
    for (auto& s : acc) out.push_back(s + ")");
  } else if (const auto* ap = e.get_if<App>()) {
    auto acc = product({"A("}, serialise_all(ap->fun, env, next));
    acc = product(acc, serialise_all(ap->arg, env, next));
    for (auto& s : acc) out.push_back(s + ")");
  } else if (const auto* l = e.get_if<Lam>()) {
    env[l->binder] = next;
    for (auto& s : serialise_all(l->body, env, next + 1)) out.push_back("L(" + s + ")");
  } else if (const auto* lr = e.get_if<Letrec>()) {
    std::vector<std::size_t> order(lr->bindings.size());
    std::iota(order.begin(), order.end(), 0);
    do {
      auto inner = env;
      std::size_t n = next;
      for (auto i : order) inner[lr->bindings[i].name] = n++;
      std::vector<std::string> acc{"R("};
      for (auto i : order) acc = product(acc, product(serialise_all(lr->bindings[i].rhs, inner, n), {";"}));
      acc = product(acc, serialise_all(lr->body, inner, n));
      for (auto& s : acc) out.push_back(s + ")");
    } while (std::next_permutation(order.begin(), order.end()));
  }
}

inline std::string brute_canonical(const Expr& e) {
  auto all = serialise_all(e, {}, 0);
  return *std::min_element(all.begin(), all.end());
}

class BruteEnumerator {
public:
  explicit BruteEnumerator(EnumParams p) : p_(std::move(p)) {}

  // every raw tree of exactly `size` nodes over variables b0..b(scope-1)
  std::vector<Expr> raw(std::size_t size, std::size_t scope) const {
    std::vector<Expr> out;
    if (size == 0) return out;
    auto name = [](std::size_t i) { return "b" + std::to_string(i); };
    if (size == 1)
      for (std::size_t i = 0; i < scope; ++i) out.push_back(var(name(i)));
    if (p_.constructors)
      for (const auto& type : p_.sig.types())
        for (const auto& cname : type.constructors) {
          auto arity = p_.sig.constructor(cname).arity;
          if (size == 1) out.push_back(con(cname, arity, {}));
          for (std::size_t k = 1; k <= arity; ++k)
            for (auto& args : tuples(std::vector<std::size_t>(k, scope), size - 1))
              out.push_back(con(cname, arity, args));
        }
    if (size == 1) return out;
    if (scope < p_.max_binders)
      for (auto& b : raw(size - 1, scope + 1)) out.push_back(lam(name(scope), b));
    for (auto& fa : tuples({scope, scope}, size - 1)) {
      const auto* k = fa[0].get_if<Con>();
      if (k && k->args.size() < k->arity) continue;
      out.push_back(app(fa[0], fa[1]));
    }
    if (p_.choice)
      for (auto& lr : tuples({scope, scope}, size - 1)) out.push_back(choice(lr[0], lr[1]));
    if (p_.case_)
      for (const auto& type : p_.sig.types()) {
        std::vector<std::size_t> scopes{scope};
        bool fits = true;
        for (const auto& c : type.constructors) {
          auto a = p_.sig.constructor(c).arity;
          fits = fits && scope + a <= p_.max_binders;
          scopes.push_back(scope + a);
        }
        if (!fits) continue;
        for (auto& parts : tuples(scopes, size - 1)) {
          std::vector<Alt> alts;
          for (std::size_t i = 0; i < type.constructors.size(); ++i) {
            Alt a{type.constructors[i], {}, parts[i + 1]};
            for (std::size_t j = scope; j < scopes[i + 1]; ++j) a.vars.push_back(name(j));
            alts.push_back(a);
          }
          out.push_back(case_of(type.name, parts[0], alts));
        }
      }
    if (p_.letrec)
      for (std::size_t k = 1; k <= p_.max_letrec_bindings && scope + k <= p_.max_binders; ++k) {
        if (size < 1 + k + k + 1) continue;
        for (auto& parts : tuples(std::vector<std::size_t>(k + 1, scope + k), size - 1 - k)) {
          std::vector<Binding> bs;
          for (std::size_t i = 0; i < k; ++i) bs.push_back({name(scope + i), parts[i]});
          out.push_back(letrec(bs, parts[k]));
        }
      }
    return out;
  }

  std::size_t count(std::size_t max_size) const {
    std::size_t n = 0;
    for (std::size_t s = 1; s <= max_size; ++s) {
      std::set<std::string> classes;
      for (const auto& t : raw(s, 0)) classes.insert(brute_canonical(t));
      n += classes.size();
    }
    return n;
  }

private:
  // all tuples of trees, slot i with scope scopes[i], sizes summing to `budget`
  std::vector<std::vector<Expr>> tuples(const std::vector<std::size_t>& scopes, std::size_t budget) const {
    std::vector<std::vector<Expr>> out;
    std::vector<Expr> cur;
    build(scopes, 0, budget, cur, out);
    return out;
  }
  void build(const std::vector<std::size_t>& scopes, std::size_t i, std::size_t budget, std::vector<Expr>& cur,
             std::vector<std::vector<Expr>>& out) const {
    if (i == scopes.size()) {
      if (budget == 0) out.push_back(cur);
      return;
    }
    for (std::size_t s = 1; s + (scopes.size() - i - 1) <= budget; ++s)
      for (auto& t : raw(s, scopes[i])) {
        cur.push_back(t);
        build(scopes, i + 1, budget - s, cur, out);
        cur.pop_back();
      }
  }

  EnumParams p_;
};

// ---------------------------------------------------------------------------
// Reduction contexts and the standard redex, read off the grammar and the case
// list of the standard-redex definition.

inline bool weak_selector(const PathStep& s) { return s.sel == Sel::AppFun || s.sel == Sel::Scrutinee; }

inline bool all_weak(const Position& p, std::size_t from) {
  for (std::size_t i = from; i < p.size(); ++i)
    if (!weak_selector(p[i])) return false;
  return true;
}

// Descends through applications' functions and case scrutinees.
inline Position weak_descend(const Expr& t, Position p) {
  while (true) {
    auto s = subterm(t, p);
    if (s.is<App>()) p.push_back({Sel::AppFun, 0, {}});
    else if (s.is<Case>()) p.push_back({Sel::Scrutinee, 0, {}});
    else return p;
  }
}

struct Link {
  std::string binder;
  Position occurrence;
};

// The chain x_j, x_(j-1), .. x_1 of the chain-form context, from the body down.
// nullopt for a cycle or an unbound variable at the end.
struct Locus {
  Position hole;
  std::vector<Link> chain;
};

inline std::optional<Locus> maximal_locus(const Expr& t) {
  if (!t.is<Letrec>()) return Locus{weak_descend(t, {}), {}};
  const auto& lr = t.as<Letrec>();
  Locus l;
  l.hole = weak_descend(t, {{Sel::LetBody, 0, {}}});
  std::set<std::string> seen;
  while (true) {
    auto s = subterm(t, l.hole);
    const auto* v = s.get_if<Var>();
    if (!v) return l;
    if (!lr.find(v->name)) return std::nullopt;  // free variable
    if (!seen.insert(v->name).second) return std::nullopt;  // cycle
    l.chain.push_back({v->name, l.hole});
    l.hole = weak_descend(t, {{Sel::Binding, 0, v->name}});
  }
}

inline bool in_reduction_context(const Expr& t, const Position& p) {
  if (all_weak(p, 0)) return true;
  if (!t.is<Letrec>() || !all_weak(p, 1)) return false;
  if (p[0].sel == Sel::LetBody) return true;
  if (p[0].sel != Sel::Binding) return false;
  // x1 = R1[.], x2 = R2[x1], .., body R[xj]: p[0] must name some x_i of the chain
  const auto& lr = t.as<Letrec>();
  auto at = weak_descend(t, {{Sel::LetBody, 0, {}}});
  std::set<std::string> seen;
  while (true) {
    const auto* v = subterm(t, at).get_if<Var>();
    if (!v || !lr.find(v->name) || !seen.insert(v->name).second) return false;
    if (v->name == p[0].binder) return true;
    at = weak_descend(t, {{Sel::Binding, 0, v->name}});
  }
}

inline Position parent(Position p) {
  p.pop_back();
  return p;
}

struct Standard {
  Rule rule;
  Position pos;
};

// Empty when there is no standard redex; two entries (ndl, ndr) for a choice.
inline std::vector<Standard> standard_redexes(const Expr& t, const Signature& sig) {
  auto locus = maximal_locus(t);
  if (!locus) return {};
  const auto& p = locus->hole;
  auto s = subterm(t, p);
  bool in_binding = !p.empty() && p.size() == 1 && p[0].sel == Sel::Binding;
  auto last = p.empty() ? std::optional<Sel>() : std::optional<Sel>(p.back().sel);

  if (s.is<Choice>()) return {{Rule::ndl, p}, {Rule::ndr, p}};
  if (s.is<Letrec>()) {
    if (p.size() == 1 && (p[0].sel == Sel::LetBody || p[0].sel == Sel::Binding)) return {{Rule::llet, p}};
    if (last == Sel::AppFun) return {{Rule::lapp, parent(p)}};
    if (last == Sel::Scrutinee) return {{Rule::lcase, parent(p)}};
    return {};
  }
  if (s.is<Lam>()) {
    if (last == Sel::AppFun) return {{Rule::lbeta, parent(p)}};
    if (!in_binding) return {};
    // replace the first occurrence, going up from x1, that is not a bare indirection x_i = x_(i-1)
    for (auto it = locus->chain.rbegin(); it != locus->chain.rend(); ++it) {
      const auto& occ = it->occurrence;
      bool indirection = occ.size() == 1 && occ[0].sel == Sel::Binding;
      if (!indirection) return {{Rule::cpn, occ}};
    }
    return {};
  }
  if (const auto* c = s.get_if<Con>()) {
    const auto& info = sig.constructor(c->name);
    auto matches = [&](const Position& case_pos, std::size_t args) {
      return subterm(t, case_pos).as<Case>().type == info.type && args == info.arity;
    };
    if (last == Sel::Scrutinee) {
      if (matches(parent(p), c->args.size())) return {{Rule::case_, parent(p)}};
      return {};
    }
    if (!in_binding) return {};
    // walk back up the chain counting the arguments each use applies
    std::size_t args = c->args.size();
    for (auto it = locus->chain.rbegin(); it != locus->chain.rend(); ++it) {
      auto occ = it->occurrence;
      while (occ.back().sel == Sel::AppFun) {
        ++args;
        occ.pop_back();
      }
      if (args > info.arity) return {};
      if (occ.back().sel == Sel::Scrutinee) {
        if (matches(parent(occ), args)) return {{Rule::case_, parent(occ)}};
        return {};
      }
      if (occ.size() == 1 && occ[0].sel == Sel::LetBody) return {};  // a value
    }
    return {};
  }
  return {};
}

}  // namespace oracle
