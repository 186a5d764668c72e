#pragma once

#include <omp.h>

#include <cstddef>
#include <exception>
#include <vector>

namespace knn {

/// Runs body(i) for i in [0, n) on the OpenMP team. An exception escaping an
/// iteration is captured; after the loop the one from the lowest index is
/// rethrown, so failures report the same way for any thread count.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Thread count for campaign loops; 0 keeps the OpenMP default.
inline void set_workers(int workers) {
  if (workers > 0) omp_set_num_threads(workers);
}

}  // namespace knn
