#pragma once

#include <string>
#include <string_view>

#include "ndlr/expr.hpp"

namespace ndlr {

struct ParseOptions {
  bool allow_hole = false;  // accept `[]` as an atom (one-hole contexts)
};

/// Parses the concrete syntax
///   e ::= x | C e1..ek | \x.e | (e1 e2) | letrec x1=e1, .. in e | choice e1 e2
///       | case[T] e of {C x1..xn -> e; ..}
/// Application is left-associative, lambda and letrec bodies extend to the right.
/// The result satisfies the distinct-variable convention: clashing binders are renamed.
Expr parse(std::string_view text, const Signature& sig, ParseOptions opts = {});

/// Inverse of parse up to alpha-equivalence.
std::string pretty(const Expr& e);

}  // namespace ndlr
