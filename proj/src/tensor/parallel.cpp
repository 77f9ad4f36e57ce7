#include "remaster/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace remaster {

namespace {

int initial_workers() {
  if (const char* env = std::getenv("REMASTER_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  return omp_get_num_procs();
}

int& worker_slot() {
  static int n = [] {
    const int w = initial_workers();
    omp_set_num_threads(w);
    return w;
  }();
  return n;
}

// Applies REMASTER_THREADS before the first parallel region runs.
[[maybe_unused]] const int g_init = worker_slot();

}  // namespace

int worker_count() { return worker_slot(); }

void set_worker_count(int n) {
  if (n < 1) n = 1;
  worker_slot() = n;
  omp_set_num_threads(n);
}

}  // namespace remaster
