#include <algorithm>

#include "doctest.h"
#include "helpers.hpp"
#include "ndlr/rules.hpp"

using namespace ndlr;
using testing::P;
using testing::same;

namespace {

Expr run(const std::string& term, Rule r, const std::string& pos, std::vector<std::string> group = {}) {
  return apply(P(term), Redex{r, parse_position(pos), std::move(group)});
}

bool found(const std::string& term, Rule r, const std::string& pos) {
  auto all = find_redexes(P(term));
  return std::any_of(all.begin(), all.end(),
                     [&](const Redex& x) { return x.rule == r && to_string(x.pos) == pos; });
}

}  // namespace

TEST_CASE("base rules") {
  CHECK(same(run("((\\x.x) True)", Rule::lbeta, "ε"), "letrec x=True in x"));
  CHECK(same(run("letrec f=\\x.x, g=f in (g True)", Rule::cpn, "letIn.appF"),
             "letrec f=\\x.x, g=f in ((\\z.z) True)"));
  CHECK(same(run("letrec f=\\x.x, g=f, h=(g True) in h", Rule::cpn, "letB(h).appF"),
             "letrec f=\\x.x, g=f, h=((\\z.z) True) in h"));
  CHECK(same(run("letrec x=True in letrec y=False in x", Rule::llet, "letIn"),
             "letrec x=True, y=False in x"));
  CHECK(same(run("letrec x=(letrec y=False in y) in x", Rule::llet, "letB(x)"),
             "letrec x=y, y=False in x"));
  CHECK(same(run("((letrec x=True in \\y.y) False)", Rule::lapp, "ε"), "letrec x=True in ((\\y.y) False)"));
  CHECK(same(run("case[Bool] (letrec x=True in x) of {True -> False; False -> True}", Rule::lcase, "ε"),
             "letrec x=True in case[Bool] x of {True -> False; False -> True}"));
  CHECK(same(run("choice True False", Rule::ndl, "ε"), "True"));
  CHECK(same(run("choice True False", Rule::ndr, "ε"), "False"));
}

TEST_CASE("case: direct, zero arity, and in a binding") {
  CHECK(same(run("case[List] (Cons True Nil) of {Nil -> Nil; Cons a b -> b}", Rule::case_, "ε"),
             "letrec a=True, b=Nil in b"));
  // no arguments: the letrec disappears
  CHECK(same(run("case[Bool] True of {True -> False; False -> True}", Rule::case_, "ε"), "False"));
  CHECK(same(run("letrec x=True, y=case[Bool] x of {True -> False; False -> True} in y", Rule::case_, "letB(y)"),
             "letrec x=True, y=False in y"));
}

TEST_CASE("case through a chain of bindings") {
  // x1 = c t1, x2 = x1 t2, case on x2: every argument is shared through a fresh y
  CHECK(same(run("letrec x=Cons True, y=(x Nil) in case[List] y of {Nil -> Nil; Cons a b -> b}", Rule::case_,
                 "letIn"),
             "letrec x=Cons p, p=True, y=(x q), q=Nil in letrec a=p, b=q in b"));
  // the last argument is supplied at the case itself
  CHECK(same(run("letrec x=Cons, y=(x True) in case[List] (y Nil) of {Nil -> Nil; Cons a b -> a}", Rule::case_,
                 "letIn"),
             "letrec x=Cons, y=(x p), p=True in letrec q=Nil, a=p, b=q in a"));
  // pure indirections with a nullary constructor
  CHECK(same(run("letrec x=False, y=x in case[Bool] y of {True -> False; False -> True}", Rule::case_, "letIn"),
             "letrec x=False, y=x in True"));
  CHECK_FALSE(case_chain_applicable(P("letrec x=Cons True in case[List] x of {Nil -> Nil; Cons a b -> b}"),
                                    {let_body()}));
  CHECK_FALSE(found("letrec x=True in case[List] x of {Nil -> Nil; Cons a b -> b}", Rule::case_, "letIn"));
}

TEST_CASE("ldel and ldelcyc") {
  CHECK(same(run("((letrec x=True in \\y.y) False)", Rule::ldel, "appF.letB(x)"), "((\\y.y) False)"));
  CHECK(same(run("letrec x=True, y=False in y", Rule::ldel, "letB(x)"), "letrec y=False in y"));
  CHECK_THROWS_AS(run("letrec x=True, y=False in y", Rule::ldel, "letB(y)"), RuleError);
  CHECK_THROWS_AS(run("letrec x=True, y=x in y", Rule::ldel, "letB(x)"), RuleError);
  CHECK(same(run("letrec x=y, y=x, z=True in z", Rule::ldelcyc1, "ε", {"x", "y"}), "letrec z=True in z"));
  CHECK(same(run("letrec x=y, y=x in True", Rule::ldelcyc2, "ε"), "True"));
  CHECK_THROWS_AS(run("letrec x=y, y=x, z=True in z", Rule::ldelcyc2, "ε"), RuleError);
  // a group still used by the rest cannot be dropped
  CHECK_THROWS_AS(run("letrec x=True, z=x in z", Rule::ldelcyc1, "ε", {"x"}), RuleError);
}

TEST_CASE("lcv in the body and in a binding") {
  CHECK(same(run("letrec y=True, x=y in (x x)", Rule::lcv, "letIn.appF"), "letrec y=True, x=y in (y x)"));
  CHECK(same(run("letrec y=True, x=y, z=(x False) in z", Rule::lcv, "letB(z).appF"),
             "letrec y=True, x=y, z=(y False) in z"));
  CHECK_THROWS_AS(run("letrec y=True, x=(\\v.v) in (x x)", Rule::lcv, "letIn.appF"), RuleError);
}

TEST_CASE("cp splits into cpt and cpd by surface position") {
  auto e = P("letrec x=\\y.y in choice True x");
  auto [t1, k1] = apply_cp(e, parse_position("letIn.chR"));
  CHECK(k1 == Rule::cpt);
  CHECK(same(t1, "letrec x=\\y.y in choice True (\\z.z)"));
  auto [t2, k2] = apply_cp(P("letrec x=\\y.y in (\\z.x)"), parse_position("letIn.lam"));
  CHECK(k2 == Rule::cpd);
  CHECK(same(t2, "letrec x=\\y.y in \\z.\\w.w"));
  auto [t3, k3] = apply_cp(P("letrec x=\\y.y, w=(\\v.x) in w"), parse_position("letB(w).lam"));
  CHECK(k3 == Rule::cpd);
  CHECK(same(t3, "letrec x=\\y.y, w=\\v.\\q.q in w"));
  CHECK_THROWS_AS(apply_cp(P("letrec x=True in (\\z.x)"), parse_position("letIn.lam")), RuleError);
}

TEST_CASE("ucp inlines a single surface occurrence") {
  CHECK(same(run("letrec x=(\\y.y) in (choice x False)", Rule::ucp, "letB(x)"), "choice (\\y.y) False"));
  CHECK(same(run("letrec x=True, z=False in (choice x z)", Rule::ucp, "letB(x)"),
             "letrec z=False in choice True z"));
  CHECK(same(run("letrec x=True, y=(Cons x Nil) in y", Rule::ucp, "letB(x)"), "letrec y=Cons True Nil in y"));
  CHECK_THROWS_AS(run("letrec x=True in (\\z.x)", Rule::ucp, "letB(x)"), RuleError);
  CHECK_THROWS_AS(run("letrec x=True in (x x)", Rule::ucp, "letB(x)"), RuleError);
  CHECK_THROWS_AS(run("letrec x=(\\v.x) in x", Rule::ucp, "letB(x)"), RuleError);
}

TEST_CASE("find_redexes lists instances in pre-order") {
  auto all = find_redexes(P("((\\x.x) (choice True False))"));
  REQUIRE(all.size() == 3);
  CHECK(all[0].rule == Rule::lbeta);
  CHECK(all[1].rule == Rule::ndl);
  CHECK(all[2].rule == Rule::ndr);
  CHECK(found("letrec x=True in letrec y=False in y", Rule::llet, "letIn"));
  CHECK(found("letrec x=True in True", Rule::ldel, "letB(x)"));
  CHECK(found("letrec x=\\y.y in (\\z.x)", Rule::cpd, "letIn.lam"));
}

TEST_CASE("apply rejects a redex that is not there") {
  CHECK_THROWS(run("True", Rule::lbeta, "ε"));
  CHECK_THROWS(run("((\\x.x) True)", Rule::lapp, "ε"));
  CHECK_THROWS(run("((\\x.x) True)", Rule::lbeta, "appA.appF"));
}
