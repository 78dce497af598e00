#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "recsql/core/param_store.hpp"
#include "recsql/core/tape.hpp"

namespace recsql::core {

struct LstmState {
  Var h;
  Var c;
};

/// One LSTM cell's weights as bound on a tape.
///
/// `weights` is 4h x (input + h) with gate blocks in the order input, forget,
/// output, candidate; `bias` is 4h x 1.
struct LstmCell {
  Var weights;
  Var bias;
  std::size_t input = 0;
  std::size_t hidden = 0;

  /// Binds "<prefix>.W" and "<prefix>.b" from the tape's store.
  static LstmCell bind(Tape& t, const std::string& prefix);
};

/// Registers "<prefix>.W" (uniform +-1/sqrt(input + hidden)) and "<prefix>.b"
/// (zero, forget-gate block set to 1).
void init_lstm(ParamStore& store, const std::string& prefix, std::size_t input,
               std::size_t hidden, Rng& rng);

LstmState lstm_zero_state(Tape& t, std::size_t hidden);

/// c' = f*c + i*g, h' = o*tanh(c').
LstmState lstm_step(Tape& t, const LstmCell& cell, const LstmState& state, Var x);

/// Runs `cell` over `inputs` in order (or reversed) from a zero state and
/// returns the hidden state at every position, indexed by input position.
std::vector<Var> lstm_run(Tape& t, const LstmCell& cell, const std::vector<Var>& inputs,
                          bool reverse);

/// Column i is [forward h_i ; backward h_i], giving a (2h) x n matrix.
Var bilstm_encode(Tape& t, const LstmCell& forward, const LstmCell& backward,
                  const std::vector<Var>& inputs);

}  // namespace recsql::core
