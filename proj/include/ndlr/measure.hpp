#pragma once

#include <cstddef>
#include <tuple>

#include "ndlr/expr.hpp"

namespace ndlr {

/// Termination measure for lll steps, compared lexicographically.
///   letrec_count: letrec nodes; llet removes one, lapp/lcase keep the count.
///   spine_sum: over letrec nodes, the number of application and case
///   ancestors whose function or scrutinee contains the letrec.  lapp and
///   lcase move a letrec out of exactly one such ancestor and leave the
///   others alone.
struct LllMeasure {
  std::size_t letrec_count = 0;
  std::size_t spine_sum = 0;

  auto operator<=>(const LllMeasure&) const = default;
};

LllMeasure lll_measure(const Expr& e);

/// Sum over letrec nodes of their ancestor count.  Not a valid lll measure:
/// lapp on ((letrec x=c in f) (letrec y=a in b)) leaves it unchanged.  Kept
/// for the test that shows this.
std::size_t letrec_depth_sum(const Expr& e);

}  // namespace ndlr
