#pragma once

#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "ndlr/expr.hpp"

namespace ndlr {

std::set<std::string> free_vars(const Expr& e);
bool occurs_free(const Expr& e, std::string_view name);
/// Number of free occurrences of `name`.
std::size_t count_free(const Expr& e, std::string_view name);
bool is_closed(const Expr& e);

/// Every variable name in `e`, bound or free.
std::unordered_set<std::string> all_names(const Expr& e);

/// Deterministic supply of names not yet used; `x` becomes `x1`, `x2`, ...
class NameSupply {
public:
  NameSupply() = default;
  explicit NameSupply(std::unordered_set<std::string> used) : used_(std::move(used)) {}
  explicit NameSupply(const Expr& e) : used_(all_names(e)) {}

  void reserve(const std::string& name) { used_.insert(name); }
  bool used(const std::string& name) const { return used_.count(name) != 0; }
  std::string fresh(const std::string& base);

private:
  std::unordered_set<std::string> used_;
  std::unordered_map<std::string, std::size_t> next_;
};

/// Canonical encoding: binders become de Bruijn levels and letrec bindings are
/// ordered by a refinement of their encodings, then by first use.
std::string canonical(const Expr& e);
bool alpha_eq(const Expr& a, const Expr& b);

/// Alpha-equivalent copy whose binders are pairwise distinct and avoid `supply`.
Expr freshen(const Expr& e, NameSupply& supply);
Expr freshen(const Expr& e, const std::set<std::string>& avoid);

/// Renames only the binders that break the distinct-variable convention.
Expr establish_convention(const Expr& e);
/// All binders pairwise distinct and disjoint from the free variables.
bool satisfies_convention(const Expr& e);

}  // namespace ndlr
