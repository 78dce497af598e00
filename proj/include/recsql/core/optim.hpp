#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "recsql/core/param_store.hpp"

namespace recsql::core {

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Parameters for which this returns false are left untouched (value and moments).
using ParamFilter = std::function<bool(const std::string&)>;

/// One bias-corrected Adam update over every (selected) parameter in `store`.
/// A parameter with no entry in `grads` is updated with a zero gradient.
/// Increments the store's step counter exactly once. Returns the number of
/// selected parameters that had no gradient.
std::size_t adam_step(ParamStore& store, const Gradients& grads, double learning_rate,
                      const AdamOptions& options = {}, const ParamFilter& selected = {});

/// Scales all gradients so their joint L2 norm is at most `max_norm`.
/// Returns the norm before scaling.
double clip_global_norm(Gradients& grads, double max_norm);

/// Inverted-dropout mask: each entry is 0 with probability `rate`, otherwise
/// 1/(1 - rate). With `training` false the mask is all ones and `rng` is not
/// advanced. Throws ParameterError unless 0 <= rate < 1.
Matrix dropout_mask(std::size_t rows, std::size_t cols, double rate, Rng& rng,
                    bool training = true);

}  // namespace recsql::core
