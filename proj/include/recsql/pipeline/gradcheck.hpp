#pragma once

#include <string>
#include <vector>

#include "recsql/core/grad_check.hpp"

namespace recsql::pipeline {

/// Every checkable module: "encoders", "sketch.<head>", "col.<clause>",
/// "op.<clause>.<kind>" (agg, cmp, dir) and "op.<clause>.sub".
std::vector<std::string> gradcheck_modules();

struct ModuleCheck {
  std::string module;
  core::GradCheckResult result;
  bool passed = false;
};

/// Finite-difference check of each module whose name equals `filter` or
/// starts with "<filter>." (all modules when empty), on a d = 8 model with a
/// gold query that populates every clause. Throws ParameterError when nothing
/// matches.
std::vector<ModuleCheck> run_gradcheck(const std::string& filter = {}, double tolerance = 1e-4);

}  // namespace recsql::pipeline
