#include "doctest.h"
#include "helpers.hpp"
#include "ndlr/contexts.hpp"
#include "oracle.hpp"

using namespace ndlr;
using testing::P;

TEST_CASE("weak and surface contexts on a fixed term") {
  auto e = P("((\\x.case[Bool] x of {True -> x; False -> x}) (choice True False))");
  CHECK(is_weak_reduction_context(e, {}));
  CHECK(is_weak_reduction_context(e, {app_fun()}));
  CHECK_FALSE(is_weak_reduction_context(e, {app_arg()}));
  CHECK(is_surface_context(e, {app_arg(), choice_left()}));
  CHECK_FALSE(is_surface_context(e, {app_fun(), lam_body()}));
  CHECK_FALSE(is_reduction_context(e, {app_fun(), lam_body(), scrutinee()}));
}

TEST_CASE("reduction contexts follow the demand chain of the top letrec") {
  auto e = P("letrec x=(y True), y=(\\z.z), w=(y False) in (x False)");
  CHECK(demand_chain(e) == std::vector<std::string>{"x", "y"});
  CHECK(is_reduction_context(e, {let_body(), app_fun()}));
  CHECK(is_reduction_context(e, {binding("x"), app_fun()}));
  CHECK(is_reduction_context(e, {binding("y")}));
  CHECK_FALSE(is_reduction_context(e, {binding("w")}));
  CHECK_FALSE(is_reduction_context(e, {let_body(), app_arg()}));
  auto l = maximal_reduction_locus(e);
  CHECK(l.kind == MaxRedexLocus::Kind::Found);
  CHECK(l.position == Position{binding("y")});
  CHECK(l.subterm.is<Lam>());
}

TEST_CASE("locus kinds for cycles and free variables") {
  CHECK(maximal_reduction_locus(P("letrec x=y, y=x in x")).kind == MaxRedexLocus::Kind::Cycle);
  CHECK(maximal_reduction_locus(P("letrec x=x in (x True)")).kind == MaxRedexLocus::Kind::Cycle);
  auto open = maximal_reduction_locus(parse("letrec x=d in x", testing::bl()));
  CHECK(open.kind == MaxRedexLocus::Kind::NoPosition);
  CHECK(open.free_variable == "d");
}

TEST_CASE("reduction-context membership agrees with the grammar oracle") {
  auto terms = enumerate_terms(testing::small_params(7));
  std::size_t positions = 0, inside = 0;
  for (const auto& t : terms)
    for_each_position(t, [&](const Position& p, const Expr&) {
      ++positions;
      bool expected = oracle::in_reduction_context(t, p);
      inside += expected;
      if (is_reduction_context(t, p) != expected) FAIL_CHECK(pretty(t) << " at " << to_string(p));
    });
  CHECK(positions > 100000);
  CHECK(inside > 0);
  CHECK(inside < positions);
}
