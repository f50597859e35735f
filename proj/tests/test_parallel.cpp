#include "doctest.h"
#include "helpers.hpp"
#include "ndlr/diagram.hpp"
#include "ndlr/parallel.hpp"

using namespace ndlr;

namespace {

std::vector<Expr> terms() {
  EnumParams p;
  p.sig = bool_signature();
  p.max_size = 7;
  p.max_binders = 2;
  p.max_letrec_bindings = 2;
  return enumerate_terms(p);
}

}  // namespace

TEST_CASE("parallel_for fills every slot once") {
  set_workers(3);
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), Execution::Parallel, [&](std::size_t i) { hits[i] += static_cast<int>(i % 7); });
  for (std::size_t i = 0; i < hits.size(); ++i) CHECK(hits[i] == static_cast<int>(i % 7));
  CHECK_THROWS_AS(parallel_for(10, Execution::Parallel,
                               [](std::size_t i) {
                                 if (i == 5) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
  set_workers(0);
}

TEST_CASE("diagram reports do not depend on the worker count") {
  auto ts = terms();
  // a mutated set so the counterexample list is non-trivial
  auto ds = parse_diagram_set("ldel . st,a ~> st,a . ldel\n");
  CheckOptions ser;
  ser.exec = Execution::Serial;
  auto a = verify_complete_set("ldel", DiagramKind::Commuting, ds, ts, ser);
  REQUIRE_FALSE(a.verified());
  for (int w : {1, 2, 4}) {
    set_workers(w);
    auto b = verify_complete_set("ldel", DiagramKind::Commuting, ds, ts, CheckOptions{});
    CAPTURE(w);
    CHECK(b.instances_checked == a.instances_checked);
    CHECK(b.base_cases == a.base_cases);
    CHECK(b.matches == a.matches);
    CHECK(b.prolongations_used == a.prolongations_used);
    REQUIRE(b.counterexamples.size() == a.counterexamples.size());
    for (std::size_t i = 0; i < a.counterexamples.size(); ++i) {
      CHECK(b.counterexamples[i].term == a.counterexamples[i].term);
      CHECK(b.counterexamples[i].position == a.counterexamples[i].position);
    }
  }
  set_workers(0);
}

TEST_CASE("proposals do not depend on the worker count") {
  auto ts = terms();
  CheckOptions ser;
  ser.exec = Execution::Serial;
  auto a = propose_diagrams("llet", DiagramKind::Forking, ts, ser);
  set_workers(3);
  auto b = propose_diagrams("llet", DiagramKind::Forking, ts, CheckOptions{});
  set_workers(0);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(to_string(a[i]) == to_string(b[i]));
}
