#include "recsql/decoders/clause_decoders.hpp"

#include <cmath>
#include <limits>

#include "recsql/core/lstm.hpp"
#include "recsql/core/ops.hpp"
#include "recsql/errors.hpp"
#include "recsql/log.hpp"

namespace recsql::decoders {

using core::Matrix;
using core::Tape;
using core::Var;
namespace ops = core::ops;

std::string_view clause_name(ClauseId clause) {
  switch (clause) {
    case ClauseId::select: return "select";
    case ClauseId::where: return "where";
    case ClauseId::group_by: return "group_by";
    case ClauseId::having: return "having";
    case ClauseId::order_by: return "order_by";
  }
  return "";
}

std::string_view kind_name(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::aggregator: return "agg";
    case OperatorKind::comparison: return "cmp";
    case OperatorKind::direction: return "dir";
    case OperatorKind::subquery_flag: return "sub";
  }
  return "";
}

std::vector<OperatorKind> operator_kinds(ClauseId clause) {
  switch (clause) {
    case ClauseId::select: return {OperatorKind::aggregator};
    case ClauseId::where: return {OperatorKind::comparison, OperatorKind::subquery_flag};
    case ClauseId::group_by: return {};
    case ClauseId::having:
      return {OperatorKind::aggregator, OperatorKind::comparison, OperatorKind::subquery_flag};
    case ClauseId::order_by: return {OperatorKind::aggregator, OperatorKind::direction};
  }
  return {};
}

std::size_t vocabulary_size(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::aggregator: return sql::kAggregatorCount;
    case OperatorKind::comparison: return sql::kComparisonCount;
    case OperatorKind::direction: return sql::kDirectionCount;
    case OperatorKind::subquery_flag: return sql::kSubqueryFlagCount;
  }
  return 0;
}

std::string column_prefix(ClauseId clause) { return "col." + std::string(clause_name(clause)); }

std::string operator_prefix(ClauseId clause, OperatorKind kind) {
  return "op." + std::string(clause_name(clause)) + "." + std::string(kind_name(kind));
}

int steps_for(const sketch::Sketch& sketch, ClauseId clause) {
  switch (clause) {
    case ClauseId::select: return sketch.num_select;
    case ClauseId::where: return sketch.num_where;
    case ClauseId::group_by: return sketch.num_group_by;
    case ClauseId::having: return sketch.num_having;
    case ClauseId::order_by: return sketch.num_order_by;
  }
  return 0;
}

namespace {

void init_attention_decoder(core::ParamStore& store, const std::string& prefix, std::size_t d,
                            core::Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(d));
  core::init_lstm(store, prefix + ".lstm", d, d, rng);
  store.add_uniform(prefix + ".W1", d, d, bound, rng);
  store.add_uniform(prefix + ".W2", d, d, bound, rng);
}

struct AttentionDecoder {
  core::LstmCell cell;
  Var w1;
  Var w2;

  static AttentionDecoder bind(Tape& t, const std::string& prefix) {
    return {core::LstmCell::bind(t, prefix + ".lstm"), t.param(prefix + ".W1"),
            t.param(prefix + ".W2")};
  }

  /// Advances the state with `input` and returns the attentional output.
  Var step(Tape& t, core::LstmState& state, Var input, Var question) const {
    state = core::lstm_step(t, cell, state, input);
    if (t.value(question).rows() != cell.hidden) {
      throw DimensionError("decoder width does not match the question encoding");
    }
    Var alpha = ops::softmax(t, ops::matvec_transposed(t, question, state.h));
    Var context = ops::matvec(t, question, alpha);
    return ops::tanh(t, ops::add(t, ops::matvec(t, w1, state.h), ops::matvec(t, w2, context)));
  }
};

Var column_distribution(Tape& t, Var attentional, const encoders::SchemaEncoding& schema) {
  return ops::softmax(t, ops::matvec_transposed(t, schema.matrix, attentional));
}

void check_column(int column, const encoders::SchemaEncoding& schema) {
  if (column < 0 || static_cast<std::size_t>(column) >= schema.size()) {
    throw DimensionError("gold column " + std::to_string(column) + " outside schema of " +
                         std::to_string(schema.size()) + " columns");
  }
}

}  // namespace

void init_decoder_params(core::ParamStore& store, std::size_t d, core::Rng& rng) {
  for (ClauseId clause : kClauses) {
    const std::string prefix = column_prefix(clause);
    init_attention_decoder(store, prefix, d, rng);
    store.add_uniform(prefix + ".start", d, 1, 0.1, rng);
    for (OperatorKind kind : operator_kinds(clause)) {
      const std::string op = operator_prefix(clause, kind);
      init_attention_decoder(store, op, d, rng);
      store.add_uniform(op + ".Wo", vocabulary_size(kind), d,
                        1.0 / std::sqrt(static_cast<double>(d)), rng);
      store.add(op + ".bo", Matrix(vocabulary_size(kind), 1));
    }
  }
}

void ClausePrediction::push(int column) {
  columns.push_back(column);
  aggregators.push_back(sql::Aggregator::none);
  comparisons.push_back(sql::Comparison::eq);
  directions.push_back(sql::Direction::asc);
  subquery_flags.push_back(sql::SubqueryFlag::value);
}

bool ClausePrediction::consistent() const noexcept {
  const auto n = columns.size();
  return aggregators.size() == n && comparisons.size() == n && directions.size() == n &&
         subquery_flags.size() == n;
}

std::vector<int> decode_columns(Tape& t, const encoders::QuestionEncoding& question,
                                const encoders::SchemaEncoding& schema, ClauseId clause,
                                std::size_t steps, bool* truncated) {
  if (truncated) *truncated = false;
  std::vector<int> chosen;
  if (steps == 0) return chosen;
  if (steps > schema.size()) {
    log::warn("decode_columns: ", steps, " steps requested for ", schema.size(),
              " columns; truncating");
    if (truncated) *truncated = true;
    steps = schema.size();
  }
  const std::string prefix = column_prefix(clause);
  const auto decoder = AttentionDecoder::bind(t, prefix);
  core::LstmState state = core::lstm_zero_state(t, decoder.cell.hidden);
  Var input = t.param(prefix + ".start");
  std::vector<bool> used(schema.size(), false);
  for (std::size_t step = 0; step < steps; ++step) {
    Var a = decoder.step(t, state, input, question.states);
    const auto& p = t.value(column_distribution(t, a, schema));
    std::size_t best = schema.size();
    for (std::size_t c = 0; c < p.size(); ++c) {
      if (used[c]) continue;
      if (best == schema.size() || p[c] > p[best]) best = c;
    }
    used[best] = true;
    chosen.push_back(static_cast<int>(best));
    input = schema.columns[best];
  }
  return chosen;
}

std::vector<Var> column_distributions(Tape& t, const encoders::QuestionEncoding& question,
                                      const encoders::SchemaEncoding& schema, ClauseId clause,
                                      const std::vector<int>& gold) {
  std::vector<Var> out;
  if (gold.empty()) return out;
  for (int c : gold) check_column(c, schema);
  const std::string prefix = column_prefix(clause);
  const auto decoder = AttentionDecoder::bind(t, prefix);
  core::LstmState state = core::lstm_zero_state(t, decoder.cell.hidden);
  Var input = t.param(prefix + ".start");
  for (int c : gold) {
    Var a = decoder.step(t, state, input, question.states);
    out.push_back(column_distribution(t, a, schema));
    input = schema.columns[static_cast<std::size_t>(c)];
  }
  return out;
}

std::vector<Var> operator_distributions(Tape& t, const encoders::QuestionEncoding& question,
                                        const std::vector<Var>& column_encodings,
                                        ClauseId clause, OperatorKind kind) {
  std::vector<Var> out;
  if (column_encodings.empty()) return out;
  const std::string prefix = operator_prefix(clause, kind);
  const auto decoder = AttentionDecoder::bind(t, prefix);
  Var wo = t.param(prefix + ".Wo");
  Var bo = t.param(prefix + ".bo");
  if (t.value(wo).rows() == 0) throw DimensionError("operator head has an empty vocabulary");
  core::LstmState state = core::lstm_zero_state(t, decoder.cell.hidden);
  for (Var column : column_encodings) {
    Var a = decoder.step(t, state, column, question.states);
    out.push_back(ops::softmax(t, ops::add(t, ops::matvec(t, wo, a), bo)));
  }
  return out;
}

std::vector<std::size_t> decode_operators(Tape& t, const encoders::QuestionEncoding& question,
                                          const std::vector<Var>& column_encodings,
                                          ClauseId clause, OperatorKind kind) {
  std::vector<std::size_t> out;
  for (Var p : operator_distributions(t, question, column_encodings, clause, kind)) {
    out.push_back(core::argmax(t.value(p).values()));
  }
  return out;
}

std::vector<sql::SubqueryFlag> predict_subquery_flags(Tape& t,
                                                      const encoders::QuestionEncoding& question,
                                                      const std::vector<Var>& column_encodings,
                                                      ClauseId clause) {
  std::vector<sql::SubqueryFlag> out;
  for (std::size_t k :
       decode_operators(t, question, column_encodings, clause, OperatorKind::subquery_flag)) {
    out.push_back(sql::from_index<sql::SubqueryFlag>(k));
  }
  return out;
}

ClausePrediction decode_clause(Tape& t, const encoders::QuestionEncoding& question,
                               const encoders::SchemaEncoding& schema,
                               const sketch::Sketch& sketch, ClauseId clause, bool subqueries) {
  ClausePrediction pred;
  pred.clause = clause;
  const int steps = steps_for(sketch, clause);
  for (int c : decode_columns(t, question, schema, clause, static_cast<std::size_t>(steps))) {
    pred.push(c);
  }
  if (pred.size() == 0) return pred;
  std::vector<Var> encodings;
  for (int c : pred.columns) encodings.push_back(schema.columns[static_cast<std::size_t>(c)]);

  for (OperatorKind kind : operator_kinds(clause)) {
    if (kind == OperatorKind::subquery_flag && !subqueries) continue;
    const auto classes = decode_operators(t, question, encodings, clause, kind);
    for (std::size_t i = 0; i < classes.size(); ++i) {
      switch (kind) {
        case OperatorKind::aggregator:
          pred.aggregators[i] = sql::from_index<sql::Aggregator>(classes[i]);
          break;
        case OperatorKind::comparison:
          pred.comparisons[i] = sql::from_index<sql::Comparison>(classes[i]);
          break;
        case OperatorKind::direction:
          pred.directions[i] = sql::from_index<sql::Direction>(classes[i]);
          break;
        case OperatorKind::subquery_flag:
          pred.subquery_flags[i] = sql::from_index<sql::SubqueryFlag>(classes[i]);
          break;
      }
    }
  }
  return pred;
}

Var decoder_loss(Tape& t, const encoders::QuestionEncoding& question,
                 const encoders::SchemaEncoding& schema, const ClausePrediction& gold,
                 const LossTerms& terms) {
  std::vector<Var> parts;
  if (!gold.consistent()) throw DimensionError("decoder_loss: inconsistent gold clause");
  if (gold.size() > 0) {
    if (terms.columns) {
      const auto dists = column_distributions(t, question, schema, gold.clause, gold.columns);
      for (std::size_t i = 0; i < dists.size(); ++i) {
        parts.push_back(ops::cross_entropy(t, dists[i], static_cast<std::size_t>(gold.columns[i])));
      }
    } else {
      for (int c : gold.columns) check_column(c, schema);
    }
    std::vector<Var> encodings;
    for (int c : gold.columns) encodings.push_back(schema.columns[static_cast<std::size_t>(c)]);
    for (OperatorKind kind : operator_kinds(gold.clause)) {
      const bool wanted =
          kind == OperatorKind::subquery_flag ? terms.subquery_flags : terms.operators;
      if (!wanted) continue;
      const auto dists = operator_distributions(t, question, encodings, gold.clause, kind);
      for (std::size_t i = 0; i < dists.size(); ++i) {
        std::size_t target = 0;
        switch (kind) {
          case OperatorKind::aggregator: target = sql::index_of(gold.aggregators[i]); break;
          case OperatorKind::comparison: target = sql::index_of(gold.comparisons[i]); break;
          case OperatorKind::direction: target = sql::index_of(gold.directions[i]); break;
          case OperatorKind::subquery_flag: target = sql::index_of(gold.subquery_flags[i]); break;
        }
        parts.push_back(ops::cross_entropy(t, dists[i], target));
      }
    }
  }
  if (parts.empty()) return t.constant(Matrix(1, 1));
  return ops::sum(t, parts);
}

}  // namespace recsql::decoders
