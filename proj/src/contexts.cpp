#include "ndlr/contexts.hpp"

#include <algorithm>

namespace ndlr {

namespace {

void require_valid(const Expr& e, const Position& p) {
  if (!valid_position(e, p)) throw InvalidPosition("position " + to_string(p) + " is not valid here");
}

bool weak_from(const Position& p, std::size_t start) {
  for (std::size_t i = start; i < p.size(); ++i)
    if (p[i].sel != Sel::AppFun && p[i].sel != Sel::Scrutinee) return false;
  return true;
}

}  // namespace

bool is_weak_reduction_context(const Expr& e, const Position& p) {
  require_valid(e, p);
  return weak_from(p, 0);
}

bool is_surface_context(const Expr& e, const Position& p) {
  require_valid(e, p);
  return std::none_of(p.begin(), p.end(), [](const PathStep& s) { return s.sel == Sel::LamBody; });
}

Position weak_spine_end(const Expr& e, Position from) {
  Expr cur = subterm(e, from);
  while (true) {
    if (auto* a = cur.get_if<App>()) {
      from.push_back(app_fun());
      cur = a->fun;
    } else if (auto* c = cur.get_if<Case>()) {
      from.push_back(scrutinee());
      cur = c->scrutinee;
    } else {
      return from;
    }
  }
}

MaxRedexLocus maximal_reduction_locus(const Expr& e) {
  MaxRedexLocus out;
  auto* top = e.get_if<Letrec>();
  Position pos = top ? weak_spine_end(e, {let_body()}) : weak_spine_end(e, {});
  std::vector<std::string> visited;
  while (true) {
    Expr t = subterm(e, pos);
    auto* v = t.get_if<Var>();
    if (!v) {
      out.kind = MaxRedexLocus::Kind::Found;
      out.position = std::move(pos);
      out.subterm = std::move(t);
      return out;
    }
    if (!top || !top->find(v->name)) {
      // bound variables cannot sit on a weak spine below the top letrec
      out.kind = MaxRedexLocus::Kind::NoPosition;
      out.free_variable = v->name;
      return out;
    }
    out.chain.push_back({v->name, pos});
    if (std::find(visited.begin(), visited.end(), v->name) != visited.end()) {
      out.kind = MaxRedexLocus::Kind::Cycle;
      return out;
    }
    visited.push_back(v->name);
    pos = weak_spine_end(e, {binding(v->name)});
  }
}

std::vector<std::string> demand_chain(const Expr& e) {
  auto locus = maximal_reduction_locus(e);
  std::vector<std::string> out;
  for (const auto& link : locus.chain)
    if (std::find(out.begin(), out.end(), link.binder) == out.end()) out.push_back(link.binder);
  return out;
}

bool is_reduction_context(const Expr& e, const Position& p) {
  require_valid(e, p);
  if (weak_from(p, 0)) return true;
  if (!e.is<Letrec>() || p.empty() || !weak_from(p, 1)) return false;
  if (p[0].sel == Sel::LetBody) return true;
  if (p[0].sel != Sel::Binding) return false;
  auto chain = demand_chain(e);
  return std::find(chain.begin(), chain.end(), p[0].binder) != chain.end();
}

}  // namespace ndlr
