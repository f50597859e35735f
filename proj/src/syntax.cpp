#include "ndlr/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "ndlr/alpha.hpp"

namespace ndlr {

namespace {

enum class Tok {
  Var,
  Con,
  Letrec,
  In,
  Choice,
  Case,
  Of,
  Lambda,
  Dot,
  LParen,
  RParen,
  Eq,
  Comma,
  Semi,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Arrow,
  Hole,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t line, col;
};

std::string describe(const Token& t) {
  if (t.kind == Tok::End) return "end of input";
  return "'" + t.text + "'";
}

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      auto line = line_, col = col_;
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, "", line, col});
        return out;
      }
      char c = src_[pos_];
      auto single = [&](Tok k) {
        out.push_back({k, std::string(1, c), line, col});
        advance(1);
      };
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t end = pos_;
        while (end < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[end])) ||
                                     src_[end] == '_' || src_[end] == '\''))
          ++end;
        std::string word(src_.substr(pos_, end - pos_));
        Tok k = std::isupper(static_cast<unsigned char>(c)) ? Tok::Con : Tok::Var;
        if (word == "letrec") k = Tok::Letrec;
        else if (word == "in") k = Tok::In;
        else if (word == "choice") k = Tok::Choice;
        else if (word == "case") k = Tok::Case;
        else if (word == "of") k = Tok::Of;
        out.push_back({k, word, line, col});
        advance(end - pos_);
      } else if (c == '\\') {
        single(Tok::Lambda);
      } else if (src_.substr(pos_, 2) == "\xCE\xBB") {  // λ
        out.push_back({Tok::Lambda, "λ", line, col});
        advance(2);
      } else if (src_.substr(pos_, 2) == "->") {
        out.push_back({Tok::Arrow, "->", line, col});
        advance(2);
      } else if (src_.substr(pos_, 2) == "[]") {
        out.push_back({Tok::Hole, "[]", line, col});
        advance(2);
      } else {
        switch (c) {
          case '.': single(Tok::Dot); break;
          case '(': single(Tok::LParen); break;
          case ')': single(Tok::RParen); break;
          case '=': single(Tok::Eq); break;
          case ',': single(Tok::Comma); break;
          case ';': single(Tok::Semi); break;
          case '{': single(Tok::LBrace); break;
          case '}': single(Tok::RBrace); break;
          case '[': single(Tok::LBracket); break;
          case ']': single(Tok::RBracket); break;
          default:
            throw SyntaxError(std::to_string(line) + ":" + std::to_string(col) +
                              ": unexpected character '" + std::string(1, c) + "'");
        }
      }
    }
  }

private:
  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {  // comment to end of line
        while (pos_ < src_.size() && src_[pos_] != '\n') advance(1);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance(1);
      } else {
        break;
      }
    }
  }
  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i, ++pos_) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0, line_ = 1, col_ = 1;
};

class Parser {
public:
  Parser(std::vector<Token> toks, const Signature& sig, ParseOptions opts)
      : toks_(std::move(toks)), sig_(sig), opts_(opts) {}

  Expr run() {
    auto e = expr();
    if (peek().kind != Tok::End) fail(peek(), "unexpected " + describe(peek()));
    return e;
  }

private:
  const Token& peek() const { return toks_[i_]; }
  Token next() { return toks_[i_++]; }

  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    throw SyntaxError(std::to_string(t.line) + ":" + std::to_string(t.col) + ": " + msg);
  }

  Token expect(Tok k, const char* what) {
    if (peek().kind != k) fail(peek(), std::string("expected ") + what + ", found " + describe(peek()));
    return next();
  }

  static bool starts_atom(Tok k) {
    return k == Tok::Var || k == Tok::Con || k == Tok::LParen || k == Tok::Lambda ||
           k == Tok::Letrec || k == Tok::Hole;
  }

  Expr expr() {
    switch (peek().kind) {
      case Tok::Lambda: return lambda();
      case Tok::Letrec: return let();
      case Tok::Choice: {
        auto t = next();
        auto l = atom();
        auto r = atom();
        if (starts_atom(peek().kind))
          fail(peek(), "choice takes exactly two arguments");
        (void)t;
        return choice(std::move(l), std::move(r));
      }
      case Tok::Case: {
        auto e = case_expr();
        if (starts_atom(peek().kind))
          fail(peek(), "a case expression cannot be applied without parentheses");
        return e;
      }
      case Tok::Con: return constructor_app();
      default: break;
    }
    auto head = atom();
    while (starts_atom(peek().kind)) {
      bool tail = peek().kind == Tok::Lambda || peek().kind == Tok::Letrec;
      head = app(std::move(head), atom());
      if (tail) break;
    }
    return head;
  }

  Expr constructor_app() {
    auto t = next();
    auto* info = sig_.find_constructor(t.text);
    if (!info) fail(t, "unknown constructor '" + t.text + "'");
    std::vector<Expr> args;
    while (starts_atom(peek().kind)) {
      if (args.size() == info->arity)
        fail(peek(), "constructor " + t.text + " applied to more than its arity " +
                         std::to_string(info->arity));
      args.push_back(atom());
    }
    return con(info->name, info->arity, std::move(args));
  }

  Expr atom() {
    auto t = peek();
    switch (t.kind) {
      case Tok::Var: next(); return var(t.text);
      case Tok::Con: {
        next();
        auto* info = sig_.find_constructor(t.text);
        if (!info) fail(t, "unknown constructor '" + t.text + "'");
        return con(info->name, info->arity);
      }
      case Tok::Hole:
        if (!opts_.allow_hole) fail(t, "hole '[]' is only allowed in contexts");
        next();
        return hole();
      case Tok::LParen: {
        next();
        auto e = expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Lambda: return lambda();
      case Tok::Letrec: return let();
      default: fail(t, "expected an expression, found " + describe(t));
    }
  }

  Expr lambda() {
    next();
    auto x = expect(Tok::Var, "a variable after lambda");
    expect(Tok::Dot, "'.'");
    return lam(x.text, expr());
  }

  Expr let() {
    next();
    std::vector<Binding> bs;
    std::set<std::string> seen;
    do {
      auto x = expect(Tok::Var, "a binder");
      if (!seen.insert(x.text).second) fail(x, "duplicate letrec binder '" + x.text + "'");
      expect(Tok::Eq, "'='");
      bs.push_back({x.text, expr()});
    } while (peek().kind == Tok::Comma && (next(), true));
    expect(Tok::In, "'in'");
    return letrec(std::move(bs), expr());
  }

  Expr case_expr() {
    auto start = next();
    expect(Tok::LBracket, "'[' after case");
    auto ty = expect(Tok::Con, "a type name");
    expect(Tok::RBracket, "']'");
    auto* info = sig_.find_type(ty.text);
    if (!info) fail(ty, "unknown type '" + ty.text + "'");
    auto scrut = expr();
    expect(Tok::Of, "'of'");
    expect(Tok::LBrace, "'{'");
    std::vector<Alt> alts(info->constructors.size());
    std::vector<bool> filled(alts.size(), false);
    while (true) {
      auto c = expect(Tok::Con, "a constructor pattern");
      auto* ci = sig_.find_constructor(c.text);
      if (!ci) fail(c, "unknown constructor '" + c.text + "'");
      if (ci->type != info->name)
        fail(c, "constructor " + c.text + " does not belong to type " + info->name);
      if (filled[ci->index]) fail(c, "duplicate alternative for " + c.text);
      std::vector<std::string> vars;
      while (peek().kind == Tok::Var) {
        auto v = next();
        if (std::find(vars.begin(), vars.end(), v.text) != vars.end())
          fail(v, "pattern variable '" + v.text + "' repeated");
        vars.push_back(v.text);
      }
      if (vars.size() != ci->arity)
        fail(c, "pattern " + c.text + " needs " + std::to_string(ci->arity) + " variables");
      expect(Tok::Arrow, "'->'");
      alts[ci->index] = Alt{ci->name, std::move(vars), expr()};
      filled[ci->index] = true;
      if (peek().kind == Tok::Semi) {
        next();
        continue;
      }
      expect(Tok::RBrace, "'}' or ';'");
      break;
    }
    for (std::size_t i = 0; i < filled.size(); ++i)
      if (!filled[i])
        fail(start, "case[" + info->name + "] lacks an alternative for " + info->constructors[i]);
    return case_of(info->name, std::move(scrut), std::move(alts));
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  const Signature& sig_;
  ParseOptions opts_;
};

enum class Mode { Top, Arg, Head };

void print(const Expr& e, Mode mode, std::string& out) {
  auto paren = [&](auto&& body) {
    out += '(';
    body();
    out += ')';
  };
  if (auto* v = e.get_if<Var>()) {
    out += v->name;
  } else if (auto* c = e.get_if<Con>()) {
    if (c->args.empty()) {
      out += c->name;
      return;
    }
    auto body = [&] {
      out += c->name;
      for (const auto& a : c->args) {
        out += ' ';
        print(a, Mode::Arg, out);
      }
    };
    if (mode == Mode::Top) body();
    else paren(body);
  } else if (auto* ch = e.get_if<Choice>()) {
    auto body = [&] {
      out += "choice ";
      print(ch->left, Mode::Arg, out);
      out += ' ';
      print(ch->right, Mode::Arg, out);
    };
    if (mode == Mode::Top) body();
    else paren(body);
  } else if (auto* cs = e.get_if<Case>()) {
    auto body = [&] {
      out += "case[" + cs->type + "] ";
      print(cs->scrutinee, Mode::Top, out);
      out += " of {";
      for (std::size_t i = 0; i < cs->alts.size(); ++i) {
        if (i) out += "; ";
        out += cs->alts[i].constructor;
        for (const auto& x : cs->alts[i].vars) out += ' ' + x;
        out += " -> ";
        print(cs->alts[i].rhs, Mode::Top, out);
      }
      out += '}';
    };
    if (mode == Mode::Top) body();
    else paren(body);
  } else if (e.is<App>()) {
    std::vector<const Expr*> spine;
    const Expr* head = &e;
    while (auto* a = head->get_if<App>()) {
      spine.push_back(&a->arg);
      head = &a->fun;
    }
    out += '(';
    // a constructor head would swallow the arguments when read back
    if (head->is<Con>()) {
      out += '(';
      print(*head, Mode::Top, out);
      out += ')';
    } else {
      print(*head, Mode::Head, out);
    }
    for (auto it = spine.rbegin(); it != spine.rend(); ++it) {
      out += ' ';
      print(**it, Mode::Arg, out);
    }
    out += ')';
  } else if (auto* l = e.get_if<Lam>()) {
    auto body = [&] {
      out += '\\' + l->binder + '.';
      print(l->body, Mode::Top, out);
    };
    if (mode == Mode::Top) body();
    else paren(body);
  } else {
    auto& lr = e.as<Letrec>();
    auto body = [&] {
      out += "letrec ";
      for (std::size_t i = 0; i < lr.bindings.size(); ++i) {
        if (i) out += ", ";
        out += lr.bindings[i].name + '=';
        print(lr.bindings[i].rhs, lr.bindings[i].rhs.is<Letrec>() ? Mode::Arg : Mode::Top, out);
      }
      out += " in ";
      print(lr.body, Mode::Top, out);
    };
    if (mode == Mode::Top) body();
    else paren(body);
  }
}

}  // namespace

Expr parse(std::string_view text, const Signature& sig, ParseOptions opts) {
  Parser p(Lexer(text).run(), sig, opts);
  return establish_convention(p.run());
}

std::string pretty(const Expr& e) {
  std::string out;
  print(e, Mode::Top, out);
  return out;
}

}  // namespace ndlr
