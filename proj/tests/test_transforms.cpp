#include "doctest.h"
#include "helpers.hpp"
#include "ndlr/contexts.hpp"
#include "ndlr/measure.hpp"
#include "ndlr/rules.hpp"

using namespace ndlr;
using testing::P;

namespace {

const std::vector<Expr>& corpus() {
  static const auto terms = enumerate_terms(testing::small_params(7));
  return terms;
}

std::optional<Position> occurrence_of(const Expr& e, const Position& within, const std::string& x) {
  std::optional<Position> out;
  for_each_position(subterm(e, within), [&](const Position& p, const Expr& s) {
    if (auto* v = s.get_if<Var>(); v && v->name == x && !out) {
      auto full = within;
      full.insert(full.end(), p.begin(), p.end());
      out = full;
    }
  });
  return out;
}

}  // namespace

TEST_CASE("ucp of an abstraction is cp followed by ldel") {
  std::size_t checked = 0;
  for (const auto& t : corpus())
    for (const auto& r : find_redexes(t, {Rule::ucp})) {
      auto letrec_pos = r.pos;
      letrec_pos.pop_back();
      const auto& name = r.pos.back().binder;
      const auto* b = subterm(t, letrec_pos).as<Letrec>().find(name);
      if (!b->rhs.is<Lam>()) continue;
      // the single occurrence is not inside the binding itself
      std::optional<Position> occ;
      for (const auto& other : subterm(t, letrec_pos).as<Letrec>().bindings)
        if (other.name != name && !occ) occ = occurrence_of(t, extend(letrec_pos, binding(other.name)), name);
      if (!occ) occ = occurrence_of(t, extend(letrec_pos, let_body()), name);
      REQUIRE(occ);
      auto copied = apply_cp(t, *occ).first;
      auto both = apply(copied, {Rule::ldel, r.pos, {}});
      if (!alpha_eq(both, apply(t, r))) FAIL_CHECK(pretty(t));
      ++checked;
    }
  CHECK(checked > 20);
}

TEST_CASE("cpd exactly when the target sits under an abstraction") {
  std::size_t cpt = 0, cpd = 0;
  for (const auto& t : corpus())
    for (const auto& r : find_redexes(t, {Rule::cpt, Rule::cpd})) {
      bool surface = is_surface_context(t, r.pos);
      if ((r.rule == Rule::cpt) != surface) FAIL_CHECK(pretty(t) << " " << to_string(r.pos));
      CHECK(apply_cp(t, r.pos).second == r.rule);
      (r.rule == Rule::cpt ? cpt : cpd)++;
    }
  CHECK(cpt > 0);
  CHECK(cpd > 0);
}

TEST_CASE("every lll step decreases the lll measure") {
  std::size_t steps = 0;
  for (const auto& t : corpus()) {
    auto before = lll_measure(t);
    for (const auto& r : find_redexes(t, {Rule::llet, Rule::lapp, Rule::lcase})) {
      auto after = lll_measure(apply(t, r));
      if (!(after < before)) FAIL_CHECK(pretty(t) << " " << rule_name(r.rule) << " " << to_string(r.pos));
      ++steps;
    }
  }
  CHECK(steps > 1000);
}

TEST_CASE("the letrec depth sum is not a measure for lapp") {
  auto sig = testing::bl();
  auto t = parse("((letrec x=c in f) (letrec y=a in b))", sig);
  auto u = apply(t, {Rule::lapp, {}, {}});
  CHECK(letrec_depth_sum(u) == letrec_depth_sum(t));
  CHECK(lll_measure(u) < lll_measure(t));
}

TEST_CASE("measure components") {
  auto m = lll_measure(P("((letrec x=True in \\y.y) False)"));
  CHECK(m.letrec_count == 1);
  CHECK(m.spine_sum == 1);
  auto n = lll_measure(P("case[Bool] ((letrec x=True in \\y.y) False) of {True -> True; False -> False}"));
  CHECK(n.spine_sum == 2);
  CHECK(lll_measure(P("letrec x=True in letrec y=x in y")).letrec_count == 2);
}

TEST_CASE("transformations keep terms closed and names distinct") {
  for (const auto& t : corpus())
    for (const auto& r : find_redexes(t)) {
      auto u = apply(t, r);
      if (!is_closed(u) || !satisfies_convention(u)) FAIL_CHECK(pretty(t) << " " << rule_name(r.rule));
    }
}
