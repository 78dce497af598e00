#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "recsql/pipeline/model.hpp"
#include "recsql/sketch/sketch.hpp"
#include "recsql/sql/assembler.hpp"
#include "recsql/sql/ast.hpp"

namespace recsql::pipeline {

/// One query level before FROM inference and sub-query expansion.
struct LevelPrediction {
  sketch::Sketch sketch;
  sql::ClausePredictions clauses;
  bool truncated = false;  // a clause asked for more columns than the schema has
};

/// Inference over an immutable bundle; safe to share across threads.
class Predictor {
 public:
  explicit Predictor(const ModelBundle& bundle) : bundle_(bundle) {}

  /// Sketch and clause contents. Without the sub-query module every flag is
  /// `value` and the set operator is none. Clause lengths always equal the
  /// returned sketch counts.
  LevelPrediction predict_level(const std::vector<std::string>& words, const Schema& schema) const;

  /// Full query: assemble, infer FROM, expand sub-queries up to `depth`.
  sql::SqlAst predict_ast(const std::vector<std::string>& words, const Schema& schema,
                          int depth) const;
  sql::SqlAst predict_ast(const std::vector<std::string>& words, const Schema& schema) const {
    return predict_ast(words, schema, bundle_.config.depth);
  }

  /// Throws DataError for an unknown database.
  std::string predict(std::string_view question, const std::string& db_id) const;

  const ModelBundle& bundle() const noexcept { return bundle_; }

 private:
  const ModelBundle& bundle_;
};

}  // namespace recsql::pipeline
