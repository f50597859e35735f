// Serial reference against the OpenMP kernels on the two hot loops: diagram
// verification and context-based falsification.  Also checks that both give
// the same answer.

#include <chrono>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "ndlr/diagram.hpp"
#include "ndlr/equiv.hpp"
#include "ndlr/parallel.hpp"
#include "ndlr/syntax.hpp"

using namespace ndlr;

namespace {

template <class F>
double timed(int reps, F&& f) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    auto start = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return best;
}

void row(const char* name, double serial, double parallel, bool same) {
  std::printf("%-28s serial %8.3fs  parallel %8.3fs  speedup %5.2fx  %s\n", name, serial, parallel,
              serial / parallel, same ? "same result" : "RESULTS DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs parallel kernels"};
  std::string diagrams = std::string(NDLR_SOURCE_DIR) + "/diagrams/ldel.commute";
  std::size_t size = 9, ctx_size = 7;
  int workers = 0, reps = 3;
  app.add_option("--diagrams", diagrams, "commuting set for ldel");
  app.add_option("--size", size, "Bool term size for the diagram kernel");
  app.add_option("--ctx-size", ctx_size, "context size for the equivalence kernel");
  app.add_option("--workers", workers, "OpenMP threads (0: default)");
  app.add_option("--reps", reps, "repetitions, best time kept");
  CLI11_PARSE(app, argc, argv);
  set_workers(workers);

  EnumParams p;
  p.sig = bool_signature();
  p.max_size = size;
  p.max_binders = 2;
  p.max_letrec_bindings = 2;
  auto terms = enumerate_terms(p);
  auto ds = load_diagram_file(diagrams);
  std::printf("threads %d, %zu terms, contexts up to size %zu\n", ndlr::workers(), terms.size(), ctx_size);

  CheckOptions ser, par;
  ser.exec = Execution::Serial;
  par.exec = Execution::Parallel;
  CheckReport a, b;
  double ts = timed(reps, [&] { a = verify_complete_set("ldel", DiagramKind::Commuting, ds, terms, ser); });
  double tp = timed(reps, [&] { b = verify_complete_set("ldel", DiagramKind::Commuting, ds, terms, par); });
  row("verify_complete_set", ts, tp,
      a.instances_checked == b.instances_checked && a.matches == b.matches &&
          a.counterexamples.size() == b.counterexamples.size());

  CtxSpec spec;
  spec.sig = bool_list_signature();
  spec.max_ctx_size = ctx_size;
  auto ctx = prepare_contexts(enumerate_contexts(spec));
  auto s = parse("letrec x=\\y.y in (x (x True))", spec.sig);
  auto t = parse("letrec x=\\y.y in ((\\z.z) (x True))", spec.sig);
  EquivOptions eser, epar;
  eser.exec = Execution::Serial;
  epar.exec = Execution::Parallel;
  EquivVerdict va, vb;
  ts = timed(reps, [&] { va = check_le_c(s, t, ctx, eser); });
  tp = timed(reps, [&] { vb = check_le_c(s, t, ctx, epar); });
  row("check_le_c", ts, tp, va.kind == vb.kind && va.exhausted == vb.exhausted);
  return 0;
}
