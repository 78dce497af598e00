#include "recsql/core/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "recsql/core/kernels.hpp"
#include "recsql/errors.hpp"

namespace recsql::core {

namespace {

constexpr double kProbabilityFloor = 1e-12;

void require(bool ok, const char* what) {
  if (!ok) throw DimensionError(what);
}

void require_vector(const Matrix& m, const char* what) { require(m.cols() == 1, what); }

}  // namespace

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) throw DimensionError("softmax of an empty vector");
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    total += out[i];
  }
  for (double& x : out) x /= total;
  return out;
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw DimensionError("argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

namespace ops {

Var matvec(Tape& t, Var a, Var x) {
  const Matrix& am = t.value(a);
  const Matrix& xm = t.value(x);
  require_vector(xm, "matvec: x must be a column vector");
  if (am.cols() != xm.rows()) {
    throw DimensionError("matvec: " + std::to_string(am.rows()) + "x" + std::to_string(am.cols()) +
                         " times " + std::to_string(xm.rows()) + "-vector");
  }
  Matrix y(am.rows(), 1);
  kernels::matvec(am.values(), am.rows(), am.cols(), xm.values(), y.values());
  return t.record(std::move(y), {a, x}, [a, x](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    const Matrix& av = tp.value(a);
    if (tp.requires_grad(a)) {
      kernels::add_outer(tp.grad(a).values(), av.rows(), av.cols(), g.values(),
                         tp.value(x).values());
    }
    if (tp.requires_grad(x)) {
      Matrix gx(av.cols(), 1);
      kernels::matvec_transposed(av.values(), av.rows(), av.cols(), g.values(), gx.values());
      Matrix& dst = tp.grad(x);
      for (std::size_t i = 0; i < gx.size(); ++i) dst[i] += gx[i];
    }
  });
}

Var matvec_transposed(Tape& t, Var a, Var x) {
  const Matrix& am = t.value(a);
  const Matrix& xm = t.value(x);
  require_vector(xm, "matvec_transposed: x must be a column vector");
  require(am.rows() == xm.rows(), "matvec_transposed: row count mismatch");
  Matrix y(am.cols(), 1);
  kernels::matvec_transposed(am.values(), am.rows(), am.cols(), xm.values(), y.values());
  return t.record(std::move(y), {a, x}, [a, x](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    const Matrix& av = tp.value(a);
    if (tp.requires_grad(a)) {
      // d(A^T x)/dA = x g^T
      kernels::add_outer(tp.grad(a).values(), av.rows(), av.cols(), tp.value(x).values(),
                         g.values());
    }
    if (tp.requires_grad(x)) {
      Matrix gx(av.rows(), 1);
      kernels::matvec(av.values(), av.rows(), av.cols(), g.values(), gx.values());
      Matrix& dst = tp.grad(x);
      for (std::size_t i = 0; i < gx.size(); ++i) dst[i] += gx[i];
    }
  });
}

Var add(Tape& t, Var a, Var b) {
  const Matrix& am = t.value(a);
  const Matrix& bm = t.value(b);
  require(am.same_shape(bm), "add: shape mismatch");
  Matrix y = am;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += bm[i];
  return t.record(std::move(y), {a, b}, [a, b](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    for (Var v : {a, b}) {
      if (!tp.requires_grad(v)) continue;
      Matrix& dst = tp.grad(v);
      for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
    }
  });
}

Var mul(Tape& t, Var a, Var b) {
  const Matrix& am = t.value(a);
  const Matrix& bm = t.value(b);
  require(am.same_shape(bm), "mul: shape mismatch");
  Matrix y = am;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= bm[i];
  return t.record(std::move(y), {a, b}, [a, b](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    if (tp.requires_grad(a)) {
      const Matrix& bv = tp.value(b);
      Matrix& dst = tp.grad(a);
      for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i] * bv[i];
    }
    if (tp.requires_grad(b)) {
      const Matrix& av = tp.value(a);
      Matrix& dst = tp.grad(b);
      for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i] * av[i];
    }
  });
}

Var mul_const(Tape& t, Var a, const Matrix& c) {
  const Matrix& am = t.value(a);
  require(am.same_shape(c), "mul_const: shape mismatch");
  Matrix y = am;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= c[i];
  return t.record(std::move(y), {a}, [a, c](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    Matrix& dst = tp.grad(a);
    for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i] * c[i];
  });
}

Var sigmoid(Tape& t, Var a) {
  Matrix y = t.value(a);
  for (double& v : y.storage()) v = 1.0 / (1.0 + std::exp(-v));
  return t.record(std::move(y), {a}, [a](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    const Matrix& s = tp.value(Var{self});
    Matrix& dst = tp.grad(a);
    for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i] * s[i] * (1.0 - s[i]);
  });
}

Var tanh(Tape& t, Var a) {
  Matrix y = t.value(a);
  for (double& v : y.storage()) v = std::tanh(v);
  return t.record(std::move(y), {a}, [a](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    const Matrix& s = tp.value(Var{self});
    Matrix& dst = tp.grad(a);
    for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i] * (1.0 - s[i] * s[i]);
  });
}

Var concat(Tape& t, const std::vector<Var>& parts) {
  std::size_t n = 0;
  for (Var p : parts) {
    require_vector(t.value(p), "concat: parts must be column vectors");
    n += t.value(p).rows();
  }
  Matrix y(n, 1);
  std::size_t offset = 0;
  for (Var p : parts) {
    const Matrix& pm = t.value(p);
    std::copy(pm.storage().begin(), pm.storage().end(), y.storage().begin() + offset);
    offset += pm.rows();
  }
  return t.record(std::move(y), parts, [parts](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    std::size_t off = 0;
    for (Var p : parts) {
      const std::size_t len = tp.value(p).rows();
      if (tp.requires_grad(p)) {
        Matrix& dst = tp.grad(p);
        for (std::size_t i = 0; i < len; ++i) dst[i] += g[off + i];
      }
      off += len;
    }
  });
}

Var slice(Tape& t, Var a, std::size_t begin, std::size_t length) {
  const Matrix& am = t.value(a);
  require_vector(am, "slice: input must be a column vector");
  require(begin + length <= am.rows(), "slice: range out of bounds");
  Matrix y(length, 1);
  for (std::size_t i = 0; i < length; ++i) y[i] = am[begin + i];
  return t.record(std::move(y), {a}, [a, begin, length](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    Matrix& dst = tp.grad(a);
    for (std::size_t i = 0; i < length; ++i) dst[begin + i] += g[i];
  });
}

Var hstack(Tape& t, const std::vector<Var>& columns) {
  require(!columns.empty(), "hstack: no columns");
  const std::size_t rows = t.value(columns.front()).rows();
  for (Var c : columns) {
    const Matrix& cm = t.value(c);
    require(cm.cols() == 1 && cm.rows() == rows, "hstack: columns must be equal-length vectors");
  }
  const std::size_t n = columns.size();
  Matrix y(rows, n);
  for (std::size_t j = 0; j < n; ++j) {
    const Matrix& cm = t.value(columns[j]);
    for (std::size_t r = 0; r < rows; ++r) y(r, j) = cm[r];
  }
  return t.record(std::move(y), columns, [columns, rows, n](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    for (std::size_t j = 0; j < n; ++j) {
      if (!tp.requires_grad(columns[j])) continue;
      Matrix& dst = tp.grad(columns[j]);
      for (std::size_t r = 0; r < rows; ++r) dst[r] += g(r, j);
    }
  });
}

Var column(Tape& t, Var m, std::size_t c) {
  const Matrix& mm = t.value(m);
  require(c < mm.cols(), "column: index out of range");
  Matrix y = mm.column(c);
  return t.record(std::move(y), {m}, [m, c](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    Matrix& dst = tp.grad(m);
    for (std::size_t r = 0; r < g.rows(); ++r) dst(r, c) += g[r];
  });
}

Var lookup(Tape& t, Var table, std::size_t r) {
  const Matrix& tm = t.value(table);
  require(r < tm.rows(), "lookup: row out of range");
  Matrix y(tm.cols(), 1);
  for (std::size_t c = 0; c < tm.cols(); ++c) y[c] = tm(r, c);
  return t.record(std::move(y), {table}, [table, r](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    Matrix& dst = tp.grad(table);
    for (std::size_t c = 0; c < g.rows(); ++c) dst(r, c) += g[c];
  });
}

Var softmax(Tape& t, Var logits) {
  const Matrix& lm = t.value(logits);
  require_vector(lm, "softmax: input must be a column vector");
  Matrix y = Matrix::vector(core::softmax(lm.values()));
  return t.record(std::move(y), {logits}, [logits](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    const Matrix& p = tp.value(Var{self});
    double dot = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) dot += g[i] * p[i];
    Matrix& dst = tp.grad(logits);
    for (std::size_t i = 0; i < p.size(); ++i) dst[i] += p[i] * (g[i] - dot);
  });
}

Var cross_entropy(Tape& t, Var probs, std::size_t gold) {
  const Matrix& pm = t.value(probs);
  require_vector(pm, "cross_entropy: probs must be a column vector");
  if (gold >= pm.rows()) {
    throw DimensionError("cross_entropy: gold index " + std::to_string(gold) +
                         " out of range for " + std::to_string(pm.rows()) + " classes");
  }
  const double p = pm[gold];
  const bool clamped = p < kProbabilityFloor;
  Matrix y(1, 1, -std::log(clamped ? kProbabilityFloor : p));
  return t.record(std::move(y), {probs}, [probs, gold, clamped](Tape& tp, std::size_t self) {
    if (clamped) return;
    const double g = tp.grad(self)[0];
    tp.grad(probs)[gold] -= g / tp.value(probs)[gold];
  });
}

Var sum(Tape& t, const std::vector<Var>& scalars) {
  double total = 0.0;
  for (Var s : scalars) {
    require(t.value(s).size() == 1, "sum: inputs must be scalars");
    total += t.value(s)[0];
  }
  return t.record(Matrix(1, 1, total), scalars, [scalars](Tape& tp, std::size_t self) {
    const double g = tp.grad(self)[0];
    for (Var s : scalars) {
      if (tp.requires_grad(s)) tp.grad(s)[0] += g;
    }
  });
}

}  // namespace ops
}  // namespace recsql::core
