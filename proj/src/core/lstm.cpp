#include "recsql/core/lstm.hpp"

#include <cmath>

#include "recsql/core/ops.hpp"
#include "recsql/errors.hpp"

namespace recsql::core {

LstmCell LstmCell::bind(Tape& t, const std::string& prefix) {
  LstmCell cell;
  cell.weights = t.param(prefix + ".W");
  cell.bias = t.param(prefix + ".b");
  const Matrix& w = t.value(cell.weights);
  const Matrix& b = t.value(cell.bias);
  if (w.rows() % 4 != 0 || b.rows() != w.rows() || b.cols() != 1) {
    throw DimensionError("lstm '" + prefix + "': malformed gate weights");
  }
  cell.hidden = w.rows() / 4;
  if (w.cols() <= cell.hidden) throw DimensionError("lstm '" + prefix + "': no input columns");
  cell.input = w.cols() - cell.hidden;
  return cell;
}

void init_lstm(ParamStore& store, const std::string& prefix, std::size_t input,
               std::size_t hidden, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(input + hidden));
  store.add_uniform(prefix + ".W", 4 * hidden, input + hidden, bound, rng);
  Matrix bias(4 * hidden, 1);
  for (std::size_t i = hidden; i < 2 * hidden; ++i) bias[i] = 1.0;
  store.add(prefix + ".b", std::move(bias));
}

LstmState lstm_zero_state(Tape& t, std::size_t hidden) {
  return {t.constant(Matrix(hidden, 1)), t.constant(Matrix(hidden, 1))};
}

LstmState lstm_step(Tape& t, const LstmCell& cell, const LstmState& state, Var x) {
  const std::size_t h = cell.hidden;
  if (t.value(x).rows() != cell.input || t.value(x).cols() != 1) {
    throw DimensionError("lstm_step: input has " + std::to_string(t.value(x).rows()) +
                         " rows, cell expects " + std::to_string(cell.input));
  }
  if (t.value(state.h).rows() != h || t.value(state.c).rows() != h) {
    throw DimensionError("lstm_step: state dimension does not match the cell");
  }
  Var z = ops::add(t, ops::matvec(t, cell.weights, ops::concat(t, {x, state.h})), cell.bias);
  Var in_gate = ops::sigmoid(t, ops::slice(t, z, 0, h));
  Var forget_gate = ops::sigmoid(t, ops::slice(t, z, h, h));
  Var out_gate = ops::sigmoid(t, ops::slice(t, z, 2 * h, h));
  Var candidate = ops::tanh(t, ops::slice(t, z, 3 * h, h));
  Var c = ops::add(t, ops::mul(t, forget_gate, state.c), ops::mul(t, in_gate, candidate));
  Var hidden = ops::mul(t, out_gate, ops::tanh(t, c));
  return {hidden, c};
}

std::vector<Var> lstm_run(Tape& t, const LstmCell& cell, const std::vector<Var>& inputs,
                          bool reverse) {
  std::vector<Var> out(inputs.size());
  LstmState state = lstm_zero_state(t, cell.hidden);
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const std::size_t i = reverse ? inputs.size() - 1 - k : k;
    state = lstm_step(t, cell, state, inputs[i]);
    out[i] = state.h;
  }
  return out;
}

Var bilstm_encode(Tape& t, const LstmCell& forward, const LstmCell& backward,
                  const std::vector<Var>& inputs) {
  if (inputs.empty()) throw DimensionError("bilstm_encode: empty sequence");
  const auto fwd = lstm_run(t, forward, inputs, false);
  const auto bwd = lstm_run(t, backward, inputs, true);
  std::vector<Var> columns;
  columns.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) columns.push_back(ops::concat(t, {fwd[i], bwd[i]}));
  return ops::hstack(t, columns);
}

}  // namespace recsql::core
