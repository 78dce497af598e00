#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "recsql/core/tape.hpp"

// Differentiable primitives. Unless noted, vectors are n x 1 column matrices.

namespace recsql::core {

/// Max-subtracted softmax. Throws DimensionError on empty input.
std::vector<double> softmax(std::span<const double> logits);

/// Lowest index of the maximum entry.
std::size_t argmax(std::span<const double> values);

namespace ops {

/// A x for an r x c matrix A and a c-vector x.
Var matvec(Tape& t, Var a, Var x);
/// A^T x for an r x c matrix A and an r-vector x.
Var matvec_transposed(Tape& t, Var a, Var x);

Var add(Tape& t, Var a, Var b);
Var mul(Tape& t, Var a, Var b);
/// Elementwise product with a constant (non-differentiated) matrix.
Var mul_const(Tape& t, Var a, const Matrix& c);

Var sigmoid(Tape& t, Var a);
Var tanh(Tape& t, Var a);

/// Vertical concatenation of column vectors.
Var concat(Tape& t, const std::vector<Var>& parts);
/// Rows [begin, begin + length) of a column vector.
Var slice(Tape& t, Var a, std::size_t begin, std::size_t length);
/// Stacks equal-length column vectors side by side into a matrix.
Var hstack(Tape& t, const std::vector<Var>& columns);
/// Column `c` of a matrix, as a vector.
Var column(Tape& t, Var m, std::size_t c);
/// Row `r` of an embedding table, as a column vector.
Var lookup(Tape& t, Var table, std::size_t r);

Var softmax(Tape& t, Var logits);
/// -log(max(probs[gold], 1e-12)).
Var cross_entropy(Tape& t, Var probs, std::size_t gold);
/// Sum of 1 x 1 scalars.
Var sum(Tape& t, const std::vector<Var>& scalars);

}  // namespace ops
}  // namespace recsql::core
