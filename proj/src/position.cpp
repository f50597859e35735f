#include "ndlr/position.hpp"

#include <cctype>

namespace ndlr {

PathStep app_fun() { return {Sel::AppFun, 0, {}}; }
PathStep app_arg() { return {Sel::AppArg, 0, {}}; }
PathStep scrutinee() { return {Sel::Scrutinee, 0, {}}; }
PathStep alt(std::size_t i) { return {Sel::Alt, i, {}}; }
PathStep binding(std::string name) { return {Sel::Binding, 0, std::move(name)}; }
PathStep let_body() { return {Sel::LetBody, 0, {}}; }
PathStep lam_body() { return {Sel::LamBody, 0, {}}; }
PathStep con_arg(std::size_t i) { return {Sel::ConArg, i, {}}; }
PathStep choice_left() { return {Sel::ChoiceLeft, 0, {}}; }
PathStep choice_right() { return {Sel::ChoiceRight, 0, {}}; }

Position extend(Position p, PathStep s) {
  p.push_back(std::move(s));
  return p;
}

bool is_prefix(const Position& prefix, const Position& p) {
  if (prefix.size() > p.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (!(prefix[i] == p[i])) return false;
  return true;
}

namespace {

std::string step_name(const PathStep& s) {
  switch (s.sel) {
    case Sel::AppFun: return "appF";
    case Sel::AppArg: return "appA";
    case Sel::Scrutinee: return "scrut";
    case Sel::Alt: return "alt(" + std::to_string(s.index) + ")";
    case Sel::Binding: return "letB(" + s.binder + ")";
    case Sel::LetBody: return "letIn";
    case Sel::LamBody: return "lam";
    case Sel::ConArg: return "arg(" + std::to_string(s.index) + ")";
    case Sel::ChoiceLeft: return "chL";
    case Sel::ChoiceRight: return "chR";
  }
  return "?";
}

[[noreturn]] void bad(const PathStep& s) {
  throw InvalidPosition("selector " + step_name(s) + " does not apply here");
}

}  // namespace

Expr child(const Expr& e, const PathStep& s) {
  switch (s.sel) {
    case Sel::AppFun:
      if (auto* a = e.get_if<App>()) return a->fun;
      break;
    case Sel::AppArg:
      if (auto* a = e.get_if<App>()) return a->arg;
      break;
    case Sel::Scrutinee:
      if (auto* c = e.get_if<Case>()) return c->scrutinee;
      break;
    case Sel::Alt:
      if (auto* c = e.get_if<Case>(); c && s.index < c->alts.size()) return c->alts[s.index].rhs;
      break;
    case Sel::Binding:
      if (auto* l = e.get_if<Letrec>())
        if (auto* b = l->find(s.binder)) return b->rhs;
      break;
    case Sel::LetBody:
      if (auto* l = e.get_if<Letrec>()) return l->body;
      break;
    case Sel::LamBody:
      if (auto* l = e.get_if<Lam>()) return l->body;
      break;
    case Sel::ConArg:
      if (auto* c = e.get_if<Con>(); c && s.index < c->args.size()) return c->args[s.index];
      break;
    case Sel::ChoiceLeft:
      if (auto* c = e.get_if<Choice>()) return c->left;
      break;
    case Sel::ChoiceRight:
      if (auto* c = e.get_if<Choice>()) return c->right;
      break;
  }
  bad(s);
}

Expr subterm(const Expr& e, const Position& p) {
  Expr cur = e;
  for (const auto& s : p) cur = child(cur, s);
  return cur;
}

bool valid_position(const Expr& e, const Position& p) {
  try {
    subterm(e, p);
    return true;
  } catch (const InvalidPosition&) {
    return false;
  }
}

namespace {

Expr replace_child(const Expr& e, const PathStep& s, Expr r) {
  switch (s.sel) {
    case Sel::AppFun:
      if (auto* a = e.get_if<App>()) return app(std::move(r), a->arg);
      break;
    case Sel::AppArg:
      if (auto* a = e.get_if<App>()) return app(a->fun, std::move(r));
      break;
    case Sel::Scrutinee:
      if (auto* c = e.get_if<Case>()) return case_of(c->type, std::move(r), c->alts);
      break;
    case Sel::Alt:
      if (auto* c = e.get_if<Case>(); c && s.index < c->alts.size()) {
        auto alts = c->alts;
        alts[s.index].rhs = std::move(r);
        return case_of(c->type, c->scrutinee, std::move(alts));
      }
      break;
    case Sel::Binding:
      if (auto* l = e.get_if<Letrec>()) {
        auto i = l->index_of(s.binder);
        if (i < 0) break;
        auto bs = l->bindings;
        bs[static_cast<std::size_t>(i)].rhs = std::move(r);
        return letrec(std::move(bs), l->body);
      }
      break;
    case Sel::LetBody:
      if (auto* l = e.get_if<Letrec>()) return letrec(l->bindings, std::move(r));
      break;
    case Sel::LamBody:
      if (auto* l = e.get_if<Lam>()) return lam(l->binder, std::move(r));
      break;
    case Sel::ConArg:
      if (auto* c = e.get_if<Con>(); c && s.index < c->args.size()) {
        auto args = c->args;
        args[s.index] = std::move(r);
        return con(c->name, c->arity, std::move(args));
      }
      break;
    case Sel::ChoiceLeft:
      if (auto* c = e.get_if<Choice>()) return choice(std::move(r), c->right);
      break;
    case Sel::ChoiceRight:
      if (auto* c = e.get_if<Choice>()) return choice(c->left, std::move(r));
      break;
  }
  bad(s);
}

Expr replace_from(const Expr& e, const Position& p, std::size_t depth, const Expr& r) {
  if (depth == p.size()) return r;
  return replace_child(e, p[depth], replace_from(child(e, p[depth]), p, depth + 1, r));
}

void walk(const Expr& e, Position& pos,
          const std::function<void(const Position&, const Expr&)>& f) {
  f(pos, e);
  auto visit = [&](PathStep s, const Expr& c) {
    pos.push_back(std::move(s));
    walk(c, pos, f);
    pos.pop_back();
  };
  if (auto* a = e.get_if<App>()) {
    visit(app_fun(), a->fun);
    visit(app_arg(), a->arg);
  } else if (auto* c = e.get_if<Con>()) {
    for (std::size_t i = 0; i < c->args.size(); ++i) visit(con_arg(i), c->args[i]);
  } else if (auto* ch = e.get_if<Choice>()) {
    visit(choice_left(), ch->left);
    visit(choice_right(), ch->right);
  } else if (auto* cs = e.get_if<Case>()) {
    visit(scrutinee(), cs->scrutinee);
    for (std::size_t i = 0; i < cs->alts.size(); ++i) visit(alt(i), cs->alts[i].rhs);
  } else if (auto* l = e.get_if<Lam>()) {
    visit(lam_body(), l->body);
  } else if (auto* lr = e.get_if<Letrec>()) {
    for (const auto& b : lr->bindings) visit(binding(b.name), b.rhs);
    visit(let_body(), lr->body);
  }
}

}  // namespace

Expr replace(const Expr& e, const Position& p, const Expr& replacement) {
  return replace_from(e, p, 0, replacement);
}

void for_each_position(const Expr& e,
                       const std::function<void(const Position&, const Expr&)>& f) {
  Position pos;
  walk(e, pos, f);
}

std::string to_string(const Position& p) {
  if (p.empty()) return "ε";
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += '.';
    out += step_name(p[i]);
  }
  return out;
}

Position parse_position(std::string_view text) {
  Position p;
  if (text.empty() || text == "ε" || text == "eps" || text == "root") return p;
  std::size_t start = 0;
  while (start <= text.size()) {
    // selectors may carry a parenthesised argument containing no dots
    std::size_t end = start;
    while (end < text.size() && text[end] != '.') ++end;
    auto tok = text.substr(start, end - start);
    auto open = tok.find('(');
    std::string_view head = tok.substr(0, open);
    std::string arg;
    if (open != std::string_view::npos) {
      if (tok.back() != ')') throw InvalidPosition("unterminated selector '" + std::string(tok) + "'");
      arg = std::string(tok.substr(open + 1, tok.size() - open - 2));
    }
    auto index = [&] {
      if (arg.empty() || arg.find_first_not_of("0123456789") != std::string::npos)
        throw InvalidPosition("selector '" + std::string(tok) + "' needs a numeric index");
      return static_cast<std::size_t>(std::stoul(arg));
    };
    if (head == "appF") p.push_back(app_fun());
    else if (head == "appA") p.push_back(app_arg());
    else if (head == "scrut") p.push_back(scrutinee());
    else if (head == "alt") p.push_back(alt(index()));
    else if (head == "letB") {
      if (arg.empty()) throw InvalidPosition("letB needs a binder name");
      p.push_back(binding(arg));
    } else if (head == "letIn") p.push_back(let_body());
    else if (head == "lam") p.push_back(lam_body());
    else if (head == "arg") p.push_back(con_arg(index()));
    else if (head == "chL") p.push_back(choice_left());
    else if (head == "chR") p.push_back(choice_right());
    else throw InvalidPosition("unknown selector '" + std::string(tok) + "'");
    start = end + 1;
    if (end == text.size()) break;
  }
  return p;
}

}  // namespace ndlr
