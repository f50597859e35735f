#include "ndlr/parallel.hpp"

namespace ndlr {

namespace {
int g_workers = 0;
}

void set_workers(int n) { g_workers = n < 0 ? 0 : n; }

int workers() {
#ifdef _OPENMP
  return g_workers > 0 ? g_workers : omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace ndlr
