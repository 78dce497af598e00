#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "recsql/core/param_store.hpp"
#include "recsql/core/tape.hpp"
#include "recsql/encoders/encoders.hpp"
#include "recsql/sketch/sketch.hpp"
#include "recsql/sql/operators.hpp"

// Clause-specific attention LSTM decoders.
//
// Column decoder for clause c ("col.<c>.*"): d_t = LSTM(d_{t-1}, x_t) with x_1
// a learned start vector and x_t the encoding of the column chosen at t-1;
// alpha_t = softmax(H_Q^T d_t), r_t = H_Q alpha_t, a_t = tanh(W1 d_t + W2 r_t),
// P_t = softmax(H_col^T a_t).
//
// Operator head ("op.<c>.<kind>.*"): the same recurrence fed with the encoding
// of the t-th chosen column, followed by P_t = softmax(Wo a_t + bo).

namespace recsql::decoders {

enum class ClauseId { select, where, group_by, having, order_by };
inline constexpr std::array<ClauseId, 5> kClauses = {ClauseId::select, ClauseId::where,
                                                     ClauseId::group_by, ClauseId::having,
                                                     ClauseId::order_by};

enum class OperatorKind { aggregator, comparison, direction, subquery_flag };

std::string_view clause_name(ClauseId clause);
std::string_view kind_name(OperatorKind kind);  // "agg", "cmp", "dir", "sub"

/// Operator heads attached to a clause, sub-query flag head included.
std::vector<OperatorKind> operator_kinds(ClauseId clause);
std::size_t vocabulary_size(OperatorKind kind);

std::string column_prefix(ClauseId clause);
std::string operator_prefix(ClauseId clause, OperatorKind kind);

/// Number of decoding steps the sketch assigns to a clause.
int steps_for(const sketch::Sketch& sketch, ClauseId clause);

void init_decoder_params(core::ParamStore& store, std::size_t d, core::Rng& rng);

/// Decoded content of one clause. Every per-column list has one entry per
/// column; lists that do not apply to the clause hold defaults
/// (none / "=" / ASC / value).
struct ClausePrediction {
  ClauseId clause = ClauseId::select;
  std::vector<int> columns;
  std::vector<sql::Aggregator> aggregators;
  std::vector<sql::Comparison> comparisons;
  std::vector<sql::Direction> directions;
  std::vector<sql::SubqueryFlag> subquery_flags;

  std::size_t size() const noexcept { return columns.size(); }
  /// Appends one column with default operators.
  void push(int column);
  bool consistent() const noexcept;
  friend bool operator==(const ClausePrediction&, const ClausePrediction&) = default;
};

/// Greedy decoding of `steps` columns. Columns already chosen in this clause
/// are masked; ties go to the lowest index. If `steps` exceeds the number of
/// columns, decoding stops early, a warning is logged and `*truncated` is set.
std::vector<int> decode_columns(core::Tape& t, const encoders::QuestionEncoding& question,
                                const encoders::SchemaEncoding& schema, ClauseId clause,
                                std::size_t steps, bool* truncated = nullptr);

/// Teacher-forced column distributions P_1..P_n for the gold column sequence.
std::vector<core::Var> column_distributions(core::Tape& t,
                                            const encoders::QuestionEncoding& question,
                                            const encoders::SchemaEncoding& schema,
                                            ClauseId clause, const std::vector<int>& gold);

/// Operator distributions, one per column encoding, from head (clause, kind).
std::vector<core::Var> operator_distributions(core::Tape& t,
                                              const encoders::QuestionEncoding& question,
                                              const std::vector<core::Var>& column_encodings,
                                              ClauseId clause, OperatorKind kind);

/// Greedy class indices; output length equals input length.
std::vector<std::size_t> decode_operators(core::Tape& t,
                                          const encoders::QuestionEncoding& question,
                                          const std::vector<core::Var>& column_encodings,
                                          ClauseId clause, OperatorKind kind);

/// Value / sub-query decision per column (WHERE and HAVING only).
std::vector<sql::SubqueryFlag> predict_subquery_flags(
    core::Tape& t, const encoders::QuestionEncoding& question,
    const std::vector<core::Var>& column_encodings, ClauseId clause);

/// Columns for the sketch's step count, then the clause's operator heads.
/// With `subqueries` false every flag is `value`.
ClausePrediction decode_clause(core::Tape& t, const encoders::QuestionEncoding& question,
                               const encoders::SchemaEncoding& schema,
                               const sketch::Sketch& sketch, ClauseId clause,
                               bool subqueries = true);

/// Which parts of a clause contribute to its loss.
struct LossTerms {
  bool columns = true;
  bool operators = true;
  bool subquery_flags = true;
};

/// Teacher-forced sum of per-step cross-entropies. Returns a zero constant for
/// an empty clause. Throws DimensionError on an out-of-range gold column.
core::Var decoder_loss(core::Tape& t, const encoders::QuestionEncoding& question,
                       const encoders::SchemaEncoding& schema, const ClausePrediction& gold,
                       const LossTerms& terms = {});

}  // namespace recsql::decoders
