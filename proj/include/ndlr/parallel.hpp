#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ndlr {

/// Serial runs are the reference; Parallel must produce identical results.
enum class Execution { Serial, Parallel };

/// Worker count for Parallel runs; 0 keeps the OpenMP default.
void set_workers(int n);
int workers();

/// Calls f(i) for i in [0, n).  Callers write results into slot i so the
/// merge order never depends on scheduling.
template <class F>
void parallel_for(std::size_t n, Execution exec, F&& f) {
  if (exec == Execution::Serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex guard;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 4) num_threads(workers())
  for (long long i = 0; i < count; ++i) {
    try {
      f(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace ndlr
