#pragma once

#include <string>

#include "ndlr/alpha.hpp"
#include "ndlr/enumerate.hpp"
#include "ndlr/expr.hpp"
#include "ndlr/syntax.hpp"

namespace testing {

inline const ndlr::Signature& bl() {
  static const auto sig = ndlr::bool_list_signature();
  return sig;
}

inline ndlr::Expr P(const std::string& text) { return ndlr::parse(text, bl()); }

inline bool same(const ndlr::Expr& a, const std::string& b) { return ndlr::alpha_eq(a, P(b)); }

inline ndlr::EnumParams small_params(std::size_t size) {
  ndlr::EnumParams p;
  p.sig = bl();
  p.max_size = size;
  p.max_binders = 2;
  p.max_letrec_bindings = 2;
  return p;
}

}  // namespace testing
