#include "lipdiff/parallel.hpp"

#include <omp.h>

#include <atomic>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>

namespace lipdiff::par {

namespace {

int g_max_threads = 0;  // 0 = unresolved

int env_threads() {
  const char* v = std::getenv("LIPDIFF_THREADS");
  if (!v) return 0;
  const int n = std::atoi(v);
  return n > 0 ? n : 0;
}

// Keeps the exception thrown at the lowest index so error reporting does
// not depend on thread interleaving.
struct FirstError {
  std::mutex mu;
  std::exception_ptr err;
  std::size_t index = std::numeric_limits<std::size_t>::max();

  void capture(std::size_t i) {
    std::lock_guard<std::mutex> lock(mu);
    if (i < index) {
      index = i;
      err = std::current_exception();
    }
  }
  void rethrow_if_set() {
    if (err) std::rethrow_exception(err);
  }
};

}  // namespace

int max_threads() {
  if (g_max_threads > 0) return g_max_threads;
  const int e = env_threads();
  if (e > 0) return e;
  return omp_get_max_threads();
}

void set_max_threads(int n) { g_max_threads = n > 0 ? n : 0; }

void fill_indexed_serial(std::size_t n, const std::function<void(std::size_t)>& body) {
  for (std::size_t i = 0; i < n; ++i) body(i);
}

double max_indexed_serial(std::size_t n, const std::function<double(std::size_t)>& value) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double v = value(i);
    if (v > best) best = v;
  }
  return best;
}

void fill_indexed(std::size_t n, const std::function<void(std::size_t)>& body, Exec exec) {
  if (exec == Exec::Serial || n < 2) {
    fill_indexed_serial(n, body);
    return;
  }
  FirstError first;
  const int threads = max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      first.capture(static_cast<std::size_t>(i));
    }
  }
  first.rethrow_if_set();
}

double max_indexed(std::size_t n, const std::function<double(std::size_t)>& value, Exec exec) {
  if (exec == Exec::Serial || n < 2) {
    return max_indexed_serial(n, value);
  }
  FirstError first;
  double best = -std::numeric_limits<double>::infinity();
  const int threads = max_threads();
#pragma omp parallel for schedule(static) reduction(max : best) num_threads(threads)
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    try {
      const double v = value(static_cast<std::size_t>(i));
      if (v > best) best = v;
    } catch (...) {
      first.capture(static_cast<std::size_t>(i));
    }
  }
  first.rethrow_if_set();
  return best;
}

}  // namespace lipdiff::par
