#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "recsql/decoders/clause_decoders.hpp"
#include "recsql/schema.hpp"
#include "recsql/sketch/sketch.hpp"
#include "recsql/sql/ast.hpp"

namespace recsql::sql {

/// One ClausePrediction per clause, indexed like decoders::kClauses.
using ClausePredictions = std::array<decoders::ClausePrediction, 5>;

ClausePredictions empty_predictions();

/// Builds the AST for one query level with an empty FROM. Condition
/// right-hand sides are [VAR] or a placeholder per flag; a set operator gets a
/// trailing placeholder. Throws AssemblyError when a clause's length differs
/// from the sketch count or a column index is outside the schema.
SqlAst assemble(const sketch::Sketch& sketch, const ClausePredictions& predictions,
                const Schema& schema);

/// Tables owning the columns used at this level, in first-appearance order
/// across SELECT, WHERE, GROUP BY, HAVING, ORDER BY. "*" contributes nothing.
std::vector<int> required_tables(const SqlAst& ast, const Schema& schema);

/// Table whose name and column words share the most distinct words with the
/// question; ties go to the lowest index.
int best_matching_table(const Schema& schema, const std::vector<std::string>& question_words);

/// Join tree over the required tables: each table not yet connected is
/// reached through a shortest foreign-key path from the tables already in the
/// tree, bridge tables included. Join conditions come from the foreign keys
/// on that path. Unreachable tables are cross-joined with a warning. A query
/// that only uses "*" gets best_matching_table.
JoinTree infer_from(const SqlAst& ast, const Schema& schema,
                    const std::vector<std::string>& question_words = {});

/// Predicts a complete AST (FROM included) for a nested position. Receives
/// the input words (question, [SEP], current SQL) and the remaining depth.
using InnerPredictor = std::function<SqlAst(const std::vector<std::string>& input, int depth)>;

/// Input words for the inner query at the first placeholder of `ast`.
std::vector<std::string> subquery_input(const std::vector<std::string>& question_words,
                                        const SqlAst& ast, const Schema& schema);

/// Replaces placeholders left to right. For each one the current AST is
/// serialized (earlier ones already filled), `predict` is called with
/// depth - 1, and its result is spliced in. At depth 0 a placeholder becomes
/// "SELECT * FROM <first table>" and a warning is logged.
SqlAst expand_subqueries(SqlAst ast, const Schema& schema,
                         const std::vector<std::string>& question_words, int depth,
                         const InnerPredictor& predict);

/// Gold supervision for one query level.
struct GoldLevel {
  sketch::Sketch sketch;
  ClausePredictions clauses;
};

/// Sketch and clause labels for the top level of `ast`. Throws AssemblyError
/// when a count exceeds `limits`.
GoldLevel extract_gold(const SqlAst& ast, const sketch::SketchLimits& limits = {});

/// A nested training target: the inner AST and the outer AST as it looks
/// when that position is being predicted (earlier positions filled with gold,
/// this and later ones as placeholders).
struct NestedTarget {
  SqlAst context;
  SqlAst target;
};

/// One entry per nested position at the top level, left to right.
std::vector<NestedTarget> nested_targets(const SqlAst& ast);

}  // namespace recsql::sql
