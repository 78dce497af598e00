#pragma once

#include <cstdint>
#include <string>

#include "recsql/core/param_store.hpp"
#include "recsql/pipeline/dataset.hpp"
#include "recsql/schema.hpp"

namespace recsql::pipeline {

/// Plans cycle in this order; the last four produce nested queries.
inline constexpr int kToyPlanCount = 25;
bool toy_plan_is_nested(int plan);

/// 2 to 4 tables chained by foreign keys. Table k has "<name>_id", three
/// attributes (at least one text and one number) and, for k > 0, a
/// "<previous>_id" column referencing table k - 1. No attribute name repeats
/// within a schema.
Schema random_toy_schema(core::Rng& rng, const std::string& db_id);

/// Schemas "toy_0".."toy_<n-1>" and template questions with gold SQL carrying
/// concrete values. Example i uses plan i mod 25 on a random schema; set
/// operations rotate through INTERSECT, UNION, EXCEPT per cycle.
/// Deterministic per seed. Throws ParameterError for counts below 1.
Dataset generate_toy(std::uint64_t seed, int schemas, int examples);

}  // namespace recsql::pipeline
