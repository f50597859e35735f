#include "ndlr/expr.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace ndlr {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

bool is_upper_ident(std::string_view s) {
  if (s.empty() || !std::isupper(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

}  // namespace

void Signature::add_type(const std::string& name,
                         const std::vector<std::pair<std::string, std::size_t>>& constructors) {
  if (!is_upper_ident(name)) throw SyntaxError("type name must be capitalised: '" + name + "'");
  if (find_type(name)) throw SyntaxError("duplicate type '" + name + "'");
  if (constructors.empty()) throw SyntaxError("type '" + name + "' has no constructors");
  TypeInfo info{name, {}};
  for (std::size_t i = 0; i < constructors.size(); ++i) {
    const auto& [cname, arity] = constructors[i];
    if (!is_upper_ident(cname))
      throw SyntaxError("constructor name must be capitalised: '" + cname + "'");
    if (constructors_.count(cname)) throw SyntaxError("duplicate constructor '" + cname + "'");
    constructors_.emplace(cname, ConstructorInfo{cname, name, i, arity});
    info.constructors.push_back(cname);
  }
  types_.push_back(std::move(info));
}

Signature Signature::parse(std::string_view text) {
  Signature sig;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    auto where = "signature line " + std::to_string(line_no) + ": ";
    if (line.rfind("type", 0) != 0 || line.size() < 5 || !std::isspace(static_cast<unsigned char>(line[4])))
      throw SyntaxError(where + "expected 'type <Name> = ...'");
    auto eq = line.find('=');
    if (eq == std::string::npos) throw SyntaxError(where + "missing '='");
    auto name = trim(line.substr(4, eq - 4));
    std::vector<std::pair<std::string, std::size_t>> cons;
    for (const auto& item : split(line.substr(eq + 1), '|')) {
      auto slash = item.find('/');
      if (slash == std::string::npos) throw SyntaxError(where + "constructor '" + item + "' lacks '/arity'");
      auto cname = trim(item.substr(0, slash));
      auto digits = trim(item.substr(slash + 1));
      if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
        throw SyntaxError(where + "bad arity for '" + cname + "'");
      cons.emplace_back(cname, static_cast<std::size_t>(std::stoul(digits)));
    }
    try {
      sig.add_type(name, cons);
    } catch (const SyntaxError& err) {
      throw SyntaxError(where + err.what());
    }
  }
  return sig;
}

Signature Signature::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open signature file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const ConstructorInfo* Signature::find_constructor(std::string_view name) const {
  auto it = constructors_.find(std::string(name));
  return it == constructors_.end() ? nullptr : &it->second;
}

const TypeInfo* Signature::find_type(std::string_view name) const {
  for (const auto& t : types_)
    if (t.name == name) return &t;
  return nullptr;
}

const ConstructorInfo& Signature::constructor(std::string_view name) const {
  if (auto* c = find_constructor(name)) return *c;
  throw SyntaxError("unknown constructor '" + std::string(name) + "'");
}

const TypeInfo& Signature::type(std::string_view name) const {
  if (auto* t = find_type(name)) return *t;
  throw SyntaxError("unknown type '" + std::string(name) + "'");
}

std::string Signature::to_string() const {
  std::ostringstream out;
  for (const auto& t : types_) {
    out << "type " << t.name << " =";
    for (std::size_t i = 0; i < t.constructors.size(); ++i) {
      const auto& c = constructors_.at(t.constructors[i]);
      out << (i ? " | " : " ") << c.name << '/' << c.arity;
    }
    out << '\n';
  }
  return out.str();
}

Signature bool_list_signature() {
  return Signature::parse("type Bool = True/0 | False/0\ntype List = Nil/0 | Cons/2\n");
}

Signature bool_signature() { return Signature::parse("type Bool = True/0 | False/0\n"); }

const Binding* Letrec::find(std::string_view name) const {
  for (const auto& b : bindings)
    if (b.name == name) return &b;
  return nullptr;
}

std::ptrdiff_t Letrec::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < bindings.size(); ++i)
    if (bindings[i].name == name) return static_cast<std::ptrdiff_t>(i);
  return -1;
}

namespace {
template <class T>
Expr make(T&& value) {
  return Expr(std::make_shared<const Node>(std::forward<T>(value)));
}
}  // namespace

Expr var(std::string name) { return make(Var{std::move(name)}); }

Expr hole() { return var(std::string(kHoleName)); }

Expr con(std::string name, std::size_t arity, std::vector<Expr> args) {
  if (args.size() > arity)
    throw SyntaxError("constructor " + name + " applied to " + std::to_string(args.size()) +
                      " arguments, arity is " + std::to_string(arity));
  return make(Con{std::move(name), arity, std::move(args)});
}

Expr con(const Signature& sig, std::string name, std::vector<Expr> args) {
  auto arity = sig.constructor(name).arity;
  return con(std::move(name), arity, std::move(args));
}

Expr choice(Expr left, Expr right) { return make(Choice{std::move(left), std::move(right)}); }

Expr case_of(std::string type, Expr scrutinee, std::vector<Alt> alts) {
  return make(Case{std::move(type), std::move(scrutinee), std::move(alts)});
}

Expr app(Expr fun, Expr arg) {
  if (auto* c = fun.get_if<Con>(); c && !c->saturated()) {
    auto args = c->args;
    args.push_back(std::move(arg));
    return make(Con{c->name, c->arity, std::move(args)});
  }
  return make(App{std::move(fun), std::move(arg)});
}

Expr apps(Expr fun, std::vector<Expr> args) {
  for (auto& a : args) fun = app(std::move(fun), std::move(a));
  return fun;
}

Expr lam(std::string binder, Expr body) { return make(Lam{std::move(binder), std::move(body)}); }

Expr letrec(std::vector<Binding> bindings, Expr body) {
  if (bindings.empty()) return body;
  return make(Letrec{std::move(bindings), std::move(body)});
}

bool is_hole(const Expr& e) {
  auto* v = e.get_if<Var>();
  return v && v->name == kHoleName;
}

bool is_value_head(const Expr& e) { return e.is<Lam>() || e.is<Con>(); }

std::size_t size(const Expr& e) {
  struct Visitor {
    std::size_t operator()(const Var&) const { return 1; }
    std::size_t operator()(const Con& c) const {
      std::size_t n = 1;
      for (const auto& a : c.args) n += size(a);
      return n;
    }
    std::size_t operator()(const Choice& c) const { return 1 + size(c.left) + size(c.right); }
    std::size_t operator()(const Case& c) const {
      std::size_t n = 1 + size(c.scrutinee);
      for (const auto& a : c.alts) n += size(a.rhs);
      return n;
    }
    std::size_t operator()(const App& a) const { return 1 + size(a.fun) + size(a.arg); }
    std::size_t operator()(const Lam& l) const { return 1 + size(l.body); }
    std::size_t operator()(const Letrec& l) const {
      std::size_t n = 1 + l.bindings.size() + size(l.body);
      for (const auto& b : l.bindings) n += size(b.rhs);
      return n;
    }
  };
  return std::visit(Visitor{}, static_cast<const Node::variant&>(e.node()));
}

bool identical(const Expr& a, const Expr& b) {
  if (a.same(b)) return true;
  if (a.node().index() != b.node().index()) return false;
  if (auto* x = a.get_if<Var>()) return x->name == b.as<Var>().name;
  if (auto* x = a.get_if<Con>()) {
    auto& y = b.as<Con>();
    if (x->name != y.name || x->args.size() != y.args.size()) return false;
    for (std::size_t i = 0; i < x->args.size(); ++i)
      if (!identical(x->args[i], y.args[i])) return false;
    return true;
  }
  if (auto* x = a.get_if<Choice>()) {
    auto& y = b.as<Choice>();
    return identical(x->left, y.left) && identical(x->right, y.right);
  }
  if (auto* x = a.get_if<Case>()) {
    auto& y = b.as<Case>();
    if (x->type != y.type || x->alts.size() != y.alts.size() || !identical(x->scrutinee, y.scrutinee))
      return false;
    for (std::size_t i = 0; i < x->alts.size(); ++i)
      if (x->alts[i].constructor != y.alts[i].constructor || x->alts[i].vars != y.alts[i].vars ||
          !identical(x->alts[i].rhs, y.alts[i].rhs))
        return false;
    return true;
  }
  if (auto* x = a.get_if<App>()) {
    auto& y = b.as<App>();
    return identical(x->fun, y.fun) && identical(x->arg, y.arg);
  }
  if (auto* x = a.get_if<Lam>()) {
    auto& y = b.as<Lam>();
    return x->binder == y.binder && identical(x->body, y.body);
  }
  auto& x = a.as<Letrec>();
  auto& y = b.as<Letrec>();
  if (x.bindings.size() != y.bindings.size() || !identical(x.body, y.body)) return false;
  for (std::size_t i = 0; i < x.bindings.size(); ++i)
    if (x.bindings[i].name != y.bindings[i].name || !identical(x.bindings[i].rhs, y.bindings[i].rhs))
      return false;
  return true;
}

}  // namespace ndlr
