#include "ndlr/enumerate.hpp"

#include <unordered_set>

#include "ndlr/alpha.hpp"

namespace ndlr {

Enumerator::Enumerator(EnumParams p, std::size_t memo_limit) : p_(std::move(p)), memo_limit_(memo_limit) {}

std::string Enumerator::level_name(std::size_t level) {
  static const char* names[] = {"x", "y", "z", "u", "v", "w", "p", "q", "r", "s"};
  if (level < std::size(names)) return names[level];
  return "x" + std::to_string(level);
}

const std::vector<Expr>& Enumerator::terms(std::size_t size, std::size_t scope, std::size_t holes) {
  Key key{size, scope, holes};
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  auto generated = generate(size, scope, holes);
  return memo_.emplace(key, std::move(generated)).first->second;
}

void Enumerator::each(std::size_t size, std::size_t scope, std::size_t holes,
                      const std::function<void(const Expr&)>& f) {
  if (size <= memo_limit_) {
    // map nodes are stable, so the list survives recursive memo growth
    const auto& list = terms(size, scope, holes);
    for (const auto& t : list) f(t);
    return;
  }
  produce(size, scope, holes, f);
}

void Enumerator::fill(const std::vector<std::size_t>& scopes, std::size_t budget, std::size_t holes,
                      std::vector<Expr>& current,
                      const std::function<void(const std::vector<Expr>&)>& emit) {
  std::size_t slot = current.size();
  if (slot == scopes.size()) {
    if (budget == 0 && holes == 0) emit(current);
    return;
  }
  std::size_t rest = scopes.size() - slot - 1;  // every later slot needs at least one node
  if (budget < rest + 1) return;
  bool last = rest == 0;
  for (std::size_t s = last ? budget : 1; s + rest <= budget; ++s) {
    for (std::size_t h = 0; h <= holes; ++h) {
      if (last && h != holes) continue;
      each(s, scopes[slot], h, [&](const Expr& t) {
        current.push_back(t);
        fill(scopes, budget - s, holes - h, current, emit);
        current.pop_back();
      });
    }
  }
}

std::vector<Expr> Enumerator::generate(std::size_t size, std::size_t scope, std::size_t holes) {
  std::vector<Expr> out;
  produce(size, scope, holes, [&](const Expr& t) { out.push_back(t); });
  return out;
}

void Enumerator::produce(std::size_t size, std::size_t scope, std::size_t holes,
                         const std::function<void(const Expr&)>& out) {
  if (size == 0) return;
  if (size == 1) {
    if (holes == 1) {
      out(hole());
      return;
    }
    for (std::size_t i = 0; i < scope; ++i) out(var(level_name(i)));
  }
  std::vector<Expr> cur;
  std::size_t budget = size - 1;

  if (p_.constructors) {
    for (const auto& type : p_.sig.types())
      for (const auto& cname : type.constructors) {
        const auto& info = p_.sig.constructor(cname);
        for (std::size_t k = 0; k <= info.arity; ++k) {
          if (k == 0 && budget != 0) continue;
          if (k > 0 && budget < k) continue;
          std::vector<std::size_t> scopes(k, scope);
          fill(scopes, budget, holes, cur, [&](const std::vector<Expr>& args) {
            out(con(cname, info.arity, args));
          });
        }
      }
  }
  if (size == 1) return;

  if (scope + 1 <= p_.max_binders) {
    auto x = level_name(scope);
    each(budget, scope + 1, holes, [&](const Expr& body) { out(lam(x, body)); });
  }

  fill({scope, scope}, budget, holes, cur, [&](const std::vector<Expr>& fa) {
    if (auto* k = fa[0].get_if<Con>(); k && !k->saturated()) return;  // would be a longer constructor application
    out(app(fa[0], fa[1]));
  });

  if (p_.choice)
    fill({scope, scope}, budget, holes, cur,
         [&](const std::vector<Expr>& lr) { out(choice(lr[0], lr[1])); });

  if (p_.case_) {
    for (const auto& type : p_.sig.types()) {
      std::vector<std::size_t> scopes{scope};
      bool fits = true;
      for (const auto& cname : type.constructors) {
        auto a = p_.sig.constructor(cname).arity;
        if (scope + a > p_.max_binders) fits = false;
        scopes.push_back(scope + a);
      }
      if (!fits || budget < scopes.size()) continue;
      fill(scopes, budget, holes, cur, [&](const std::vector<Expr>& parts) {
        std::vector<Alt> alts;
        for (std::size_t i = 0; i < type.constructors.size(); ++i) {
          Alt a{type.constructors[i], {}, parts[i + 1]};
          for (std::size_t j = 0; j < scopes[i + 1] - scope; ++j) a.vars.push_back(level_name(scope + j));
          alts.push_back(std::move(a));
        }
        out(case_of(type.name, parts[0], std::move(alts)));
      });
    }
  }

  if (p_.letrec) {
    std::unordered_set<std::string> seen;
    for (std::size_t k = 1; k <= p_.max_letrec_bindings && scope + k <= p_.max_binders; ++k) {
      if (budget < k + k + 1) break;
      std::vector<std::size_t> scopes(k + 1, scope + k);
      fill(scopes, budget - k, holes, cur, [&](const std::vector<Expr>& parts) {
        std::vector<Binding> bs;
        for (std::size_t i = 0; i < k; ++i) bs.push_back({level_name(scope + i), parts[i]});
        auto t = letrec(std::move(bs), parts[k]);
        // permuted bindings give alpha-equal letrecs
        if (k > 1 && !seen.insert(canonical(t)).second) return;
        out(t);
      });
    }
  }
}

namespace {

std::vector<Expr> closed(const EnumParams& p, std::size_t holes) {
  Enumerator en(p);
  std::vector<Expr> out;
  for (std::size_t s = 1; s <= p.max_size; ++s)
    for (const auto& t : en.terms(s, 0, holes)) out.push_back(establish_convention(t));
  return out;
}

}  // namespace

std::vector<Expr> enumerate_terms(const EnumParams& p) { return closed(p, 0); }

std::size_t count_terms(const EnumParams& p) {
  Enumerator en(p);
  std::size_t n = 0;
  for (std::size_t s = 1; s <= p.max_size; ++s) n += en.terms(s, 0, 0).size();
  return n;
}

std::vector<Expr> enumerate_hole_terms(const EnumParams& p) { return closed(p, 1); }

void for_each_term(const EnumParams& p, std::size_t memo_limit, const std::function<void(const Expr&)>& f) {
  Enumerator en(p, memo_limit);
  for (std::size_t s = 1; s <= p.max_size; ++s)
    en.each(s, 0, 0, [&](const Expr& t) { f(establish_convention(t)); });
}

}  // namespace ndlr
