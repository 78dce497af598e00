#include "recsql/core/kernels.hpp"

#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace recsql::core::kernels {

namespace serial {

void matvec(std::span<const double> a, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = a.data() + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

void matvec_transposed(std::span<const double> a, std::size_t rows, std::size_t cols,
                       std::span<const double> x, std::span<double> y) {
  for (std::size_t c = 0; c < cols; ++c) {
    double acc = 0.0;
    for (std::size_t r = 0; r < rows; ++r) acc += a[r * cols + c] * x[r];
    y[c] = acc;
  }
}

void add_outer(std::span<double> a, std::size_t rows, std::size_t cols,
               std::span<const double> u, std::span<const double> v) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double ur = u[r];
    if (ur == 0.0) continue;
    double* row = a.data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) row[c] += ur * v[c];
  }
}

}  // namespace serial

namespace parallel {

void matvec(std::span<const double> a, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y) {
  const auto n = static_cast<long long>(rows);
#pragma omp parallel for schedule(static)
  for (long long r = 0; r < n; ++r) {
    const double* row = a.data() + static_cast<std::size_t>(r) * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[static_cast<std::size_t>(r)] = acc;
  }
}

void matvec_transposed(std::span<const double> a, std::size_t rows, std::size_t cols,
                       std::span<const double> x, std::span<double> y) {
  const auto n = static_cast<long long>(cols);
#pragma omp parallel for schedule(static)
  for (long long c = 0; c < n; ++c) {
    double acc = 0.0;
    for (std::size_t r = 0; r < rows; ++r)
      acc += a[r * cols + static_cast<std::size_t>(c)] * x[r];
    y[static_cast<std::size_t>(c)] = acc;
  }
}

void add_outer(std::span<double> a, std::size_t rows, std::size_t cols,
               std::span<const double> u, std::span<const double> v) {
  const auto n = static_cast<long long>(rows);
#pragma omp parallel for schedule(static)
  for (long long r = 0; r < n; ++r) {
    const double ur = u[static_cast<std::size_t>(r)];
    if (ur == 0.0) continue;
    double* row = a.data() + static_cast<std::size_t>(r) * cols;
    for (std::size_t c = 0; c < cols; ++c) row[c] += ur * v[c];
  }
}

}  // namespace parallel

namespace {
// Toy-scale models (d = 64) stay below this and run serially.
std::atomic<std::size_t> g_threshold{1u << 18};

bool use_parallel(std::size_t elements) {
#ifdef _OPENMP
  return elements >= g_threshold.load(std::memory_order_relaxed) && !omp_in_parallel() &&
         omp_get_max_threads() > 1;
#else
  (void)elements;
  return false;
#endif
}
}  // namespace

std::size_t parallel_threshold() { return g_threshold.load(std::memory_order_relaxed); }
void set_parallel_threshold(std::size_t elements) {
  g_threshold.store(elements, std::memory_order_relaxed);
}

void matvec(std::span<const double> a, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y) {
  if (use_parallel(rows * cols)) {
    parallel::matvec(a, rows, cols, x, y);
  } else {
    serial::matvec(a, rows, cols, x, y);
  }
}

void matvec_transposed(std::span<const double> a, std::size_t rows, std::size_t cols,
                       std::span<const double> x, std::span<double> y) {
  if (use_parallel(rows * cols)) {
    parallel::matvec_transposed(a, rows, cols, x, y);
  } else {
    serial::matvec_transposed(a, rows, cols, x, y);
  }
}

void add_outer(std::span<double> a, std::size_t rows, std::size_t cols,
               std::span<const double> u, std::span<const double> v) {
  if (use_parallel(rows * cols)) {
    parallel::add_outer(a, rows, cols, u, v);
  } else {
    serial::add_outer(a, rows, cols, u, v);
  }
}

}  // namespace recsql::core::kernels
