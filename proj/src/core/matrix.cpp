#include "recsql/core/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "recsql/errors.hpp"

namespace recsql::core {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionError("matrix data length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(rows_) + "x" +
                         std::to_string(cols_));
  }
}

Matrix Matrix::vector(std::vector<double> values) {
  const auto n = values.size();
  return Matrix(n, 1, std::move(values));
}

Matrix Matrix::column(std::size_t c) const {
  if (c >= cols_) throw DimensionError("column index out of range");
  Matrix out(rows_, 1);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

void Matrix::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace recsql::core
