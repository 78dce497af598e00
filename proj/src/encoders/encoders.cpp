#include "recsql/encoders/encoders.hpp"

#include <cmath>

#include "recsql/core/lstm.hpp"
#include "recsql/core/ops.hpp"
#include "recsql/core/optim.hpp"
#include "recsql/errors.hpp"

namespace recsql::encoders {

using core::Matrix;
using core::Tape;
using core::Var;

namespace {

void check_dimension(std::size_t d) {
  if (d == 0 || d % 2 != 0) throw ParameterError("hidden size d must be even and positive");
}

std::vector<Var> embed(Tape& t, const std::vector<int>& ids, const DropoutSpec& dropout) {
  Var table = t.param("emb");
  const std::size_t rows = t.value(table).rows();
  std::vector<Var> out;
  out.reserve(ids.size());
  for (int id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= rows) {
      throw DimensionError("token id " + std::to_string(id) + " outside the embedding table");
    }
    Var e = core::ops::lookup(t, table, static_cast<std::size_t>(id));
    if (dropout.training && dropout.rate > 0.0) {
      const Matrix mask =
          core::dropout_mask(t.value(e).rows(), 1, dropout.rate, *dropout.rng, true);
      e = core::ops::mul_const(t, e, mask);
    }
    out.push_back(e);
  }
  return out;
}

std::vector<std::string> split_identifier(const std::string& name) { return split_words(name); }

}  // namespace

void init_embeddings(core::ParamStore& store, std::size_t d, std::size_t vocab_size,
                     core::Rng& rng) {
  check_dimension(d);
  // unit scale; at +-0.1 the first LSTM outputs are ~1e-2 and attention stays flat for epochs
  store.add_uniform("emb", vocab_size, d / 2, 1.0, rng);
}

void init_encoder_scope(core::ParamStore& store, const EncoderScope& scope, std::size_t d,
                        core::Rng& rng) {
  check_dimension(d);
  const std::size_t half = d / 2;
  core::init_lstm(store, scope.question + ".fwd", half, half, rng);
  core::init_lstm(store, scope.question + ".bwd", half, half, rng);
  core::init_lstm(store, scope.column + ".fwd", half, half, rng);
  core::init_lstm(store, scope.column + ".bwd", half, half, rng);
  store.add_uniform(scope.column + ".w", d, 1, 1.0 / std::sqrt(static_cast<double>(d)), rng);
}

QuestionEncoding encode_question(Tape& t, const std::vector<int>& token_ids,
                                 const EncoderScope& scope, const DropoutSpec& dropout) {
  if (token_ids.empty()) throw DimensionError("encode_question: empty token list");
  if (dropout.training && dropout.rate > 0.0 && dropout.rng == nullptr) {
    throw ParameterError("encode_question: dropout requires an rng");
  }
  const auto fwd = core::LstmCell::bind(t, scope.question + ".fwd");
  const auto bwd = core::LstmCell::bind(t, scope.question + ".bwd");
  QuestionEncoding q;
  q.states = core::bilstm_encode(t, fwd, bwd, embed(t, token_ids, dropout));
  q.tokens = token_ids;
  return q;
}

std::vector<ColumnDescriptor> describe_columns(const Schema& schema) {
  std::vector<ColumnDescriptor> out;
  out.reserve(schema.columns.size());
  for (const auto& c : schema.columns) {
    ColumnDescriptor d;
    d.table_index = c.table;
    d.is_star = c.is_star();
    d.type = c.type;
    if (d.is_star) {
      d.column_name = {"*"};
    } else {
      d.table_name = split_identifier(schema.tables[static_cast<std::size_t>(c.table)]);
      d.column_name = split_identifier(c.name);
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<int> column_token_ids(const ColumnDescriptor& column, const Vocabulary& vocab,
                                  bool type_token) {
  if (column.is_star) return {Vocabulary::kStar};
  std::vector<int> ids = vocab.ids(column.table_name);
  ids.push_back(Vocabulary::kSep);
  for (int id : vocab.ids(column.column_name)) ids.push_back(id);
  if (type_token) ids.push_back(Vocabulary::type_token(column.type));
  return ids;
}

ColumnEncoding encode_column(Tape& t, const std::vector<int>& token_ids,
                             const EncoderScope& scope) {
  if (token_ids.empty()) throw DimensionError("encode_column: empty token sequence");
  const auto fwd = core::LstmCell::bind(t, scope.column + ".fwd");
  const auto bwd = core::LstmCell::bind(t, scope.column + ".bwd");
  Var outputs = core::bilstm_encode(t, fwd, bwd, embed(t, token_ids, {}));
  Var w = t.param(scope.column + ".w");
  if (t.value(w).rows() != t.value(outputs).rows()) {
    throw DimensionError("encode_column: attention vector does not match the encoder width");
  }
  Var scores = core::ops::matvec_transposed(t, core::ops::tanh(t, outputs), w);
  Var alpha = core::ops::softmax(t, scores);
  ColumnEncoding enc;
  enc.vector = core::ops::matvec(t, outputs, alpha);
  const auto& a = t.value(alpha).storage();
  enc.attention.assign(a.begin(), a.end());
  return enc;
}

SchemaEncoding encode_schema(Tape& t, const Schema& schema, const Vocabulary& vocab,
                             const EncoderScope& scope, bool type_token) {
  schema.validate();
  SchemaEncoding enc;
  enc.descriptors = describe_columns(schema);
  enc.foreign_keys = schema.foreign_keys;
  for (const auto& d : enc.descriptors) {
    auto col = encode_column(t, column_token_ids(d, vocab, type_token), scope);
    enc.columns.push_back(col.vector);
    enc.attention.push_back(std::move(col.attention));
  }
  enc.matrix = core::ops::hstack(t, enc.columns);
  return enc;
}

}  // namespace recsql::encoders
