#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "oracle.hpp"

using namespace ndlr;

namespace {

EnumParams params(const Signature& sig, std::size_t size, std::size_t binders, std::size_t bindings) {
  EnumParams p;
  p.sig = sig;
  p.max_size = size;
  p.max_binders = binders;
  p.max_letrec_bindings = bindings;
  return p;
}

}  // namespace

TEST_CASE("hand-counted small cases") {
  auto sig = bool_signature();
  // True, False
  CHECK(count_terms(params(sig, 1, 2, 2)) == 2);
  // size 2 adds \x.x, \x.True, \x.False
  CHECK(count_terms(params(sig, 2, 2, 2)) == 5);
  auto p = params(sig, 3, 1, 1);
  p.case_ = p.choice = p.letrec = false;
  // one binder: no lambda of size 3, so size 3 is only the four (c d) applications
  CHECK(count_terms(p) == 5 + 4);
}

TEST_CASE("counts match the brute-force enumerator") {
  struct Case {
    Signature sig;
    std::size_t size, binders, bindings;
  };
  for (const auto& c : {Case{bool_signature(), 6, 2, 2}, Case{bool_list_signature(), 5, 2, 2},
                        Case{bool_list_signature(), 6, 1, 1}, Case{bool_signature(), 7, 1, 1},
                        Case{bool_signature(), 5, 3, 3}}) {
    auto p = params(c.sig, c.size, c.binders, c.bindings);
    CAPTURE(c.size);
    CAPTURE(c.binders);
    CHECK(count_terms(p) == oracle::BruteEnumerator(p).count(c.size));
  }
}

TEST_CASE("flags switch off syntax classes") {
  auto p = params(bool_list_signature(), 5, 2, 2);
  p.choice = false;
  p.letrec = false;
  for (const auto& t : enumerate_terms(p))
    for_each_position(t, [&](const Position&, const Expr& s) {
      CHECK_FALSE(s.is<Choice>());
      CHECK_FALSE(s.is<Letrec>());
    });
  CHECK(count_terms(p) == oracle::BruteEnumerator(p).count(5));
}

TEST_CASE("enumerated terms are closed, distinct up to alpha, and ordered by size") {
  auto terms = enumerate_terms(testing::small_params(7));
  std::set<std::string> seen;
  std::size_t last = 0;
  for (const auto& t : terms) {
    CHECK(is_closed(t));
    CHECK(satisfies_convention(t));
    CHECK(seen.insert(canonical(t)).second);
    CHECK(size(t) >= last);
    last = size(t);
  }
  CHECK(terms.size() == count_terms(testing::small_params(7)));
}

TEST_CASE("hole terms carry exactly one hole") {
  auto ctxs = enumerate_hole_terms(testing::small_params(5));
  REQUIRE_FALSE(ctxs.empty());
  CHECK(is_hole(ctxs.front()));
  for (const auto& c : ctxs) {
    std::size_t holes = 0;
    for_each_position(c, [&](const Position&, const Expr& s) { holes += is_hole(s); });
    CHECK(holes == 1);
  }
}
