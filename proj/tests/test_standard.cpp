#include <algorithm>

#include "doctest.h"
#include "helpers.hpp"
#include "ndlr/standard.hpp"
#include "oracle.hpp"

using namespace ndlr;
using testing::bl;
using testing::P;
using testing::same;

TEST_CASE("the worked ldel/lapp overlap: both orders meet") {
  auto s = parse("((letrec x=c in \\y.y) d)", bl());
  auto run = standard_reduce(s, NdPolicy::Left, 10);
  REQUIRE(run.trace.size() >= 1);
  CHECK(format_step(run.trace[0]) == "lapp st @ε => letrec x=c in ((\\y.y) d)");
  // open term: evaluation stops when it needs d
  CHECK(run.outcome == EvalResult::Outcome::Stuck);
  CHECK(run.stuck == StuckClass::FreeVariable);

  auto via_ldel = apply(s, {Rule::ldel, parse_position("appF.letB(x)"), {}});
  CHECK(alpha_eq(via_ldel, parse("((\\y.y) d)", bl())));
  auto lapped = run.trace[0].after;
  auto back = apply(lapped, {Rule::ldel, parse_position("letB(x)"), {}});
  CHECK(alpha_eq(back, via_ldel));
}

TEST_CASE("standard reduction to WHNF") {
  auto r = standard_reduce(P("((letrec x=True in \\y.y) False)"), NdPolicy::Left, 50);
  CHECK(r.outcome == EvalResult::Outcome::Converged);
  CHECK(r.steps == 3);
  CHECK(same(r.final, "letrec x=True, y=False in y"));
  REQUIRE(r.trace.size() == 3);
  CHECK(r.trace[1].redex.rule == Rule::lbeta);
  CHECK(r.trace[2].redex.rule == Rule::llet);
  // y is a variable bound to a constructor: the chain ends in a value
  CHECK(is_whnf(r.final));
}

TEST_CASE("stuck classes") {
  CHECK(standard_reduce(P("letrec x=x in x"), NdPolicy::Left, 50).stuck == StuckClass::Cycle);
  CHECK(format_result(standard_reduce(P("letrec x=x in x"), NdPolicy::Left, 50)) == "RESULT Stuck:Cycle nd=0");
  auto te = standard_reduce(P("((True) False)"), NdPolicy::Left, 50);
  CHECK(te.outcome == EvalResult::Outcome::Stuck);
  CHECK(te.stuck == StuckClass::TypeError);
  CHECK(standard_reduce(P("case[Bool] Nil of {True -> True; False -> False}"), NdPolicy::Left, 5).stuck ==
        StuckClass::TypeError);
  auto omega = standard_reduce(P("letrec f=\\x.(f x) in (f True)"), NdPolicy::Left, 40);
  CHECK(omega.outcome == EvalResult::Outcome::Exhausted);
  CHECK(omega.steps == 40);
}

TEST_CASE("choice: both arms, nd counts") {
  auto l = standard_reduce(P("choice True False"), NdPolicy::Left, 5);
  auto r = standard_reduce(P("choice True False"), NdPolicy::Right, 5);
  CHECK(same(l.final, "True"));
  CHECK(same(r.final, "False"));
  CHECK(l.nd_count == 1);
  CHECK(r.nd_count == 1);

  auto cs = converges_set(P("choice True False"));
  CHECK(cs.leaves == 2);
  CHECK(cs.counts == std::set<std::size_t>{1});
  CHECK_FALSE(cs.exhausted);

  // one arm diverges, one converges after two choices
  auto mixed = converges_set(P("choice (letrec x=x in x) (choice False True)"));
  CHECK(mixed.counts == std::set<std::size_t>{2});
  CHECK(mixed.leaves == 3);

  auto inf = converges_set(P("letrec f=\\x.(f x) in (f True)"), {50, 500, false});
  CHECK(inf.counts.empty());
  CHECK(inf.exhausted);
}

TEST_CASE("given arm choices") {
  auto t = P("choice (choice True False) Nil");
  CHECK(same(standard_reduce(t, NdPolicy::Given, 10, {true, false}).final, "False"));
  CHECK(same(standard_reduce(t, NdPolicy::Given, 10, {false}).final, "Nil"));
  CHECK(standard_reduce(t, NdPolicy::Given, 10, {true}).outcome == EvalResult::Outcome::Exhausted);
}

TEST_CASE("standard redex agrees with the case-list oracle") {
  auto terms = enumerate_terms(testing::small_params(7));
  std::size_t with_redex = 0;
  for (const auto& t : terms) {
    auto expected = oracle::standard_redexes(t, bl());
    auto sr = standard_redex(t);
    if (expected.empty()) {
      if (sr.kind != StandardRedex::Kind::None) FAIL_CHECK(pretty(t));
      continue;
    }
    ++with_redex;
    bool ok = sr.kind != StandardRedex::Kind::None && sr.redex.pos == expected[0].pos &&
              (sr.redex.rule == expected[0].rule);
    if (!ok) FAIL_CHECK(pretty(t) << " oracle " << rule_name(expected[0].rule) << "@" << to_string(expected[0].pos));
    for (const auto& e : expected)
      if (!is_standard(t, {e.rule, e.pos, {}})) FAIL_CHECK(pretty(t));
  }
  CHECK(with_redex > 1000);
}

TEST_CASE("step classification") {
  auto e = P("letrec x=((\\y.y) True) in ((\\z.z) False)");
  CHECK(classify_step(e, {Rule::lbeta, {let_body()}, {}}) == StepClass::Standard);
  CHECK(classify_step(e, {Rule::lbeta, {binding("x")}, {}}) == StepClass::NotInReductionContext);
  auto f = P("letrec x=((\\y.y) True) in (x False)");
  CHECK(classify_step(f, {Rule::lbeta, {binding("x")}, {}}) == StepClass::Standard);
  auto g = P("letrec x=True in letrec y=x in (\\z.z)");
  CHECK(classify_step(g, {Rule::llet, {let_body()}, {}}) == StepClass::Standard);
}
