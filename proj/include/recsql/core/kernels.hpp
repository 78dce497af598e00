#pragma once

#include <cstddef>
#include <span>

// Dense inner loops used by the tape ops. Two implementations share one
// contract: `serial` is the reference kept for testing, `parallel` splits
// output rows (or columns) across OpenMP threads. Every output element is
// accumulated by exactly one thread in the same order as the serial loop,
// so both produce bit-identical results.

namespace recsql::core::kernels {

namespace serial {
/// y = A x, A is rows x cols row-major.
void matvec(std::span<const double> a, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y);
/// y = A^T x.
void matvec_transposed(std::span<const double> a, std::size_t rows, std::size_t cols,
                       std::span<const double> x, std::span<double> y);
/// A += u v^T.
void add_outer(std::span<double> a, std::size_t rows, std::size_t cols,
               std::span<const double> u, std::span<const double> v);
}  // namespace serial

namespace parallel {
void matvec(std::span<const double> a, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y);
void matvec_transposed(std::span<const double> a, std::size_t rows, std::size_t cols,
                       std::span<const double> x, std::span<double> y);
void add_outer(std::span<double> a, std::size_t rows, std::size_t cols,
               std::span<const double> u, std::span<const double> v);
}  // namespace parallel

/// Element count (rows * cols) at or above which the dispatching kernels use
/// the parallel path. Calls made from inside an enclosing parallel region
/// always run serially.
std::size_t parallel_threshold();
void set_parallel_threshold(std::size_t elements);

void matvec(std::span<const double> a, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y);
void matvec_transposed(std::span<const double> a, std::size_t rows, std::size_t cols,
                       std::span<const double> x, std::span<double> y);
void add_outer(std::span<double> a, std::size_t rows, std::size_t cols,
               std::span<const double> u, std::span<const double> v);

}  // namespace recsql::core::kernels
