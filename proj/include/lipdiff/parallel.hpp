#pragma once

#include <cstddef>
#include <functional>

namespace lipdiff::par {

enum class Exec { Serial, Parallel };

// Worker cap. Resolution order: explicit set_max_threads(), then the
// LIPDIFF_THREADS environment variable, then the OpenMP default.
int max_threads();
void set_max_threads(int n);

// Serial reference kernels. The parallel kernels below must match them
// bitwise on identical inputs; tests/test_parallel.cpp and the benchmark
// tool compare both paths on the toolkit's real workloads.
void fill_indexed_serial(std::size_t n, const std::function<void(std::size_t)>& body);
double max_indexed_serial(std::size_t n, const std::function<double(std::size_t)>& value);

// body(i) writes slot i of some preallocated output; results are assembled
// by index, never by completion order.
void fill_indexed(std::size_t n, const std::function<void(std::size_t)>& body,
                  Exec exec = Exec::Parallel);

// Max-reduction over value(i). Max is exact on doubles, so the parallel
// reduction is bit-identical to the serial scan. Returns -inf for n == 0.
double max_indexed(std::size_t n, const std::function<double(std::size_t)>& value,
                   Exec exec = Exec::Parallel);

}  // namespace lipdiff::par
