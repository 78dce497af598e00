#include "recsql/core/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "recsql/errors.hpp"

namespace recsql::core {

namespace {

double evaluate(const LossBuilder& loss, const ParamStore& store) {
  Tape tape(&store);
  const double value = tape.scalar(loss(tape));
  if (!std::isfinite(value)) throw NumericError("grad_check: loss is not finite");
  return value;
}

}  // namespace

GradCheckResult grad_check(const LossBuilder& loss, ParamStore& store,
                           const GradCheckOptions& options) {
  Gradients analytic;
  {
    Tape tape(&store);
    Var l = loss(tape);
    if (!std::isfinite(tape.scalar(l))) throw NumericError("grad_check: loss is not finite");
    tape.backward(l);
    analytic = tape.parameter_gradients();
  }

  std::vector<std::pair<std::string, std::size_t>> candidates;
  for (const auto& [name, e] : store.entries()) {
    if (options.parameters && !options.parameters(name)) continue;
    for (std::size_t i = 0; i < e.value.size(); ++i) candidates.emplace_back(name, i);
  }
  if (candidates.size() > options.max_entries) {
    Rng rng(options.seed);
    std::shuffle(candidates.begin(), candidates.end(), rng);
    candidates.resize(options.max_entries);
  }

  GradCheckResult result;
  for (const auto& [name, i] : candidates) {
    double& x = store.value(name)[i];
    const double saved = x;
    x = saved + options.eps;
    const double plus = evaluate(loss, store);
    x = saved - options.eps;
    const double minus = evaluate(loss, store);
    x = saved;

    const double numeric = (plus - minus) / (2.0 * options.eps);
    auto it = analytic.find(name);
    const double a = it == analytic.end() ? 0.0 : it->second[i];
    const double err =
        std::abs(a - numeric) / std::max(std::abs(a) + std::abs(numeric), options.floor);
    ++result.entries_checked;
    if (err > result.max_relative_error || result.worst_parameter.empty()) {
      if (err >= result.max_relative_error) {
        result.max_relative_error = err;
        result.worst_parameter = name;
        result.worst_index = i;
        result.worst_analytic = a;
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace recsql::core
