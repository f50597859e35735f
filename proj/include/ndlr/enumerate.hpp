#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "ndlr/expr.hpp"

namespace ndlr {

struct EnumParams {
  Signature sig;
  std::size_t max_size = 5;             // node count, see size()
  std::size_t max_letrec_bindings = 2;
  std::size_t max_binders = 3;          // variables simultaneously in scope
  bool choice = true;
  bool case_ = true;
  bool letrec = true;
  bool constructors = true;
};

/// Closed terms of size 1..max_size, one per alpha class, smallest first.
std::vector<Expr> enumerate_terms(const EnumParams& p);
std::size_t count_terms(const EnumParams& p);

/// Closed one-hole contexts (the hole is the variable `[]`) of size 1..max_size.
std::vector<Expr> enumerate_hole_terms(const EnumParams& p);

/// Streams the same terms as enumerate_terms without keeping them: subterms
/// up to `memo_limit` nodes are memoised, larger ones are regenerated.
void for_each_term(const EnumParams& p, std::size_t memo_limit, const std::function<void(const Expr&)>& f);

/// Generates all terms of exactly one size; used by the entry points above.
class Enumerator {
public:
  explicit Enumerator(EnumParams p, std::size_t memo_limit = static_cast<std::size_t>(-1));

  /// Terms of exactly `size` with `scope` level-named variables in scope and
  /// `holes` (0 or 1) occurrences of the hole.  Results are memoised.
  const std::vector<Expr>& terms(std::size_t size, std::size_t scope, std::size_t holes);

  /// Like terms(), but sizes above the memo limit are streamed, not stored.
  void each(std::size_t size, std::size_t scope, std::size_t holes, const std::function<void(const Expr&)>& f);

  /// Name of the variable bound at binder level `level`.
  static std::string level_name(std::size_t level);

private:
  struct Key {
    std::size_t size, scope, holes;
    bool operator<(const Key& o) const {
      return std::tie(size, scope, holes) < std::tie(o.size, o.scope, o.holes);
    }
  };
  std::vector<Expr> generate(std::size_t size, std::size_t scope, std::size_t holes);
  void produce(std::size_t size, std::size_t scope, std::size_t holes, const std::function<void(const Expr&)>& out);

  // all ways to fill `slots` children with total size `budget` and `holes` holes,
  // slot i having scope `scopes[i]`
  void fill(const std::vector<std::size_t>& scopes, std::size_t budget, std::size_t holes,
            std::vector<Expr>& current, const std::function<void(const std::vector<Expr>&)>& emit);

  EnumParams p_;
  std::size_t memo_limit_;
  std::map<Key, std::vector<Expr>> memo_;
};

}  // namespace ndlr
