#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

#include "recsql/core/optim.hpp"
#include "recsql/core/param_store.hpp"
#include "recsql/core/tape.hpp"

namespace recsql::core {

/// Builds a scalar loss on the given tape. The tape is bound to the store
/// passed to grad_check; the function must be deterministic.
using LossBuilder = std::function<Var(Tape&)>;

struct GradCheckOptions {
  double eps = 1e-5;
  /// Above this many candidate entries, a seeded random subsample is checked.
  std::size_t max_entries = 10000;
  std::uint64_t seed = 0;
  /// Denominator floor: error = |a - n| / max(|a| + |n|, floor).
  double floor = 1e-6;
  /// Restricts the check to matching parameters (all when empty).
  ParamFilter parameters;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t entries_checked = 0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

/// Compares tape gradients against central finite differences. Throws
/// NumericError if the loss is not finite.
GradCheckResult grad_check(const LossBuilder& loss, ParamStore& store,
                           const GradCheckOptions& options = {});

}  // namespace recsql::core
