#pragma once

#include <exception>
#include <mutex>

namespace vecsim {

// Runs fn(i) for i in [0, n) across OpenMP threads. The first exception is
// rethrown on the calling thread once the loop has drained.
template <class Fn>
void parallel_for(long n, Fn&& fn) {
  std::exception_ptr error;
  std::mutex m;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
      std::lock_guard lock(m);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

} // namespace vecsim
