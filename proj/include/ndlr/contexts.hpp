#pragma once

#include <string>
#include <vector>

#include "ndlr/expr.hpp"
#include "ndlr/position.hpp"

namespace ndlr {

/// Only function-position and scrutinee selectors on the path.
bool is_weak_reduction_context(const Expr& e, const Position& p);
/// No abstraction body on the path.
bool is_surface_context(const Expr& e, const Position& p);
/// Weak context, possibly under the top letrec's body or along its demand chain.
bool is_reduction_context(const Expr& e, const Position& p);

/// Follows function and scrutinee positions from `from` as far as possible.
Position weak_spine_end(const Expr& e, Position from);

/// One demand-chain step: `binder` is needed at `occurrence`.
struct ChainLink {
  std::string binder;
  Position occurrence;
};

struct MaxRedexLocus {
  enum class Kind { Found, Cycle, NoPosition };
  Kind kind = Kind::NoPosition;
  Position position;             // hole of the maximal reduction context
  Expr subterm;                  // t'
  std::vector<ChainLink> chain;  // from the letrec body towards the hole
  std::string free_variable;     // set when descent stops at a free variable
};

MaxRedexLocus maximal_reduction_locus(const Expr& e);

/// Binders of the top-level letrec along the demand chain (empty if none).
std::vector<std::string> demand_chain(const Expr& e);

}  // namespace ndlr
