#include "recsql/core/optim.hpp"

#include <cmath>

#include "recsql/errors.hpp"
#include "recsql/log.hpp"

namespace recsql::core {

std::size_t adam_step(ParamStore& store, const Gradients& grads, double learning_rate,
                      const AdamOptions& options, const ParamFilter& selected) {
  if (!(learning_rate > 0.0)) throw ParameterError("learning rate must be positive");
  store.advance_step();
  const auto t = static_cast<double>(store.step());
  const double correction1 = 1.0 - std::pow(options.beta1, t);
  const double correction2 = 1.0 - std::pow(options.beta2, t);
  std::size_t missing = 0;

  for (auto& [name, e] : store.entries()) {
    if (selected && !selected(name)) continue;
    auto it = grads.find(name);
    const Matrix* g = nullptr;
    if (it == grads.end()) {
      ++missing;
      log::debug("adam: no gradient for '", name, "', using zero");
    } else {
      g = &it->second;
      if (!g->same_shape(e.value)) {
        throw DimensionError("adam: gradient shape mismatch for '" + name + "'");
      }
    }
    auto& value = e.value.storage();
    auto& m = e.m.storage();
    auto& v = e.v.storage();
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double gi = g ? (*g)[i] : 0.0;
      m[i] = options.beta1 * m[i] + (1.0 - options.beta1) * gi;
      v[i] = options.beta2 * v[i] + (1.0 - options.beta2) * gi * gi;
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      value[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + options.epsilon);
    }
  }
  return missing;
}

double clip_global_norm(Gradients& grads, double max_norm) {
  double sq = 0.0;
  for (const auto& [_, g] : grads) {
    for (double x : g.storage()) sq += x * x;
  }
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (auto& [_, g] : grads) {
      for (double& x : g.storage()) x *= scale;
    }
  }
  return norm;
}

Matrix dropout_mask(std::size_t rows, std::size_t cols, double rate, Rng& rng, bool training) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ParameterError("dropout rate must be in [0, 1)");
  Matrix mask(rows, cols, 1.0);
  if (!training || rate == 0.0) return mask;
  std::bernoulli_distribution drop(rate);
  const double keep_scale = 1.0 / (1.0 - rate);
  for (double& x : mask.storage()) x = drop(rng) ? 0.0 : keep_scale;
  return mask;
}

}  // namespace recsql::core
