#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace ndlr {

/// Raised for malformed terms, signatures or positions.
class SyntaxError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct ConstructorInfo {
  std::string name;
  std::string type;
  std::size_t index = 0;  // position within its type
  std::size_t arity = 0;
};

struct TypeInfo {
  std::string name;
  std::vector<std::string> constructors;
};

/// Declared types with their ordered constructor lists.
class Signature {
public:
  Signature() = default;

  /// Parses the line-based format `type Bool = True/0 | False/0`.
  static Signature parse(std::string_view text);
  static Signature from_file(const std::string& path);

  void add_type(const std::string& name,
                const std::vector<std::pair<std::string, std::size_t>>& constructors);

  const ConstructorInfo* find_constructor(std::string_view name) const;
  const TypeInfo* find_type(std::string_view name) const;
  const ConstructorInfo& constructor(std::string_view name) const;
  const TypeInfo& type(std::string_view name) const;
  const std::vector<TypeInfo>& types() const { return types_; }

  std::string to_string() const;

private:
  std::vector<TypeInfo> types_;
  std::unordered_map<std::string, ConstructorInfo> constructors_;
};

/// Bool and List, the signature most tests and the acceptance suite run on.
Signature bool_list_signature();
Signature bool_signature();

struct Node;

/// Immutable, structurally shared expression handle.
class Expr {
public:
  Expr() = default;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  const Node& node() const { return *node_; }
  bool valid() const { return static_cast<bool>(node_); }
  bool same(const Expr& other) const { return node_ == other.node_; }

  template <class T>
  bool is() const;
  template <class T>
  const T& as() const;
  template <class T>
  const T* get_if() const;

private:
  std::shared_ptr<const Node> node_;
};

struct Binding {
  std::string name;
  Expr rhs;
};

struct Alt {
  std::string constructor;
  std::vector<std::string> vars;
  Expr rhs;
};

struct Var {
  std::string name;
};
/// Constructor application with at most `arity` arguments.
struct Con {
  std::string name;
  std::size_t arity = 0;
  std::vector<Expr> args;
  bool saturated() const { return args.size() == arity; }
};
struct Choice {
  Expr left, right;
};
/// Alternatives are kept in the declaration order of `type`.
struct Case {
  std::string type;
  Expr scrutinee;
  std::vector<Alt> alts;
};
struct App {
  Expr fun, arg;
};
struct Lam {
  std::string binder;
  Expr body;
};
struct Letrec {
  std::vector<Binding> bindings;
  Expr body;
  const Binding* find(std::string_view name) const;
  std::ptrdiff_t index_of(std::string_view name) const;
};

struct Node : std::variant<Var, Con, Choice, Case, App, Lam, Letrec> {
  using variant::variant;
};

template <class T>
bool Expr::is() const {
  return std::holds_alternative<T>(*node_);
}
template <class T>
const T& Expr::as() const {
  return std::get<T>(*node_);
}
template <class T>
const T* Expr::get_if() const {
  return std::get_if<T>(node_.get());
}

/// Name used for the hole of a one-hole context.
inline constexpr std::string_view kHoleName = "[]";

Expr var(std::string name);
Expr hole();
Expr con(std::string name, std::size_t arity, std::vector<Expr> args = {});
Expr con(const Signature& sig, std::string name, std::vector<Expr> args = {});
Expr choice(Expr left, Expr right);
Expr case_of(std::string type, Expr scrutinee, std::vector<Alt> alts);
/// Application; an unsaturated constructor application absorbs the argument.
Expr app(Expr fun, Expr arg);
Expr apps(Expr fun, std::vector<Expr> args);
Expr lam(std::string binder, Expr body);
/// Letrec; zero bindings yields the body itself.
Expr letrec(std::vector<Binding> bindings, Expr body);

bool is_hole(const Expr& e);
bool is_value_head(const Expr& e);  // abstraction or constructor application

/// Node count; a letrec counts one for itself plus one per binding.
std::size_t size(const Expr& e);

/// Structural identity including names and binding order.
bool identical(const Expr& a, const Expr& b);

}  // namespace ndlr
