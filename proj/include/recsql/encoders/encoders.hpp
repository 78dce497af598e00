#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "recsql/core/param_store.hpp"
#include "recsql/core/tape.hpp"
#include "recsql/encoders/vocabulary.hpp"
#include "recsql/schema.hpp"

// Question encoding H_Q (d x |X|) via a bi-LSTM over word embeddings, and
// column encodings h_col via self-attention over a bi-LSTM run on
// "table words [SEP] column words [type]".
//
// Parameters:
//   emb                   vocabulary x d/2 lookup table (shared)
//   qenc<scope>.{fwd,bwd} question bi-LSTM, d/2 units per direction
//   cenc<scope>.{fwd,bwd} column bi-LSTM, d/2 units per direction
//   cenc<scope>.w         d x 1 self-attention scoring vector
// where <scope> is empty for the shared encoders or ".<owner>" when every
// head owns its own encoder pair.

namespace recsql::encoders {

/// Parameter-name prefixes for one encoder pair.
struct EncoderScope {
  std::string question = "qenc";
  std::string column = "cenc";

  static EncoderScope shared() { return {}; }
  static EncoderScope owned_by(const std::string& owner) {
    return {"qenc." + owner, "cenc." + owner};
  }
};

/// Embedding dimension is d/2, entries uniform in [-1, 1]; d must be even and positive.
void init_embeddings(core::ParamStore& store, std::size_t d, std::size_t vocab_size,
                     core::Rng& rng);
void init_encoder_scope(core::ParamStore& store, const EncoderScope& scope, std::size_t d,
                        core::Rng& rng);

/// Dropout on question embeddings. Disabled unless `training` is set.
struct DropoutSpec {
  double rate = 0.0;
  core::Rng* rng = nullptr;
  bool training = false;
};

struct QuestionEncoding {
  core::Var states;  // d x |X|
  std::vector<int> tokens;
  std::size_t length() const noexcept { return tokens.size(); }
};

QuestionEncoding encode_question(core::Tape& t, const std::vector<int>& token_ids,
                                 const EncoderScope& scope, const DropoutSpec& dropout = {});

struct ColumnDescriptor {
  int table_index = -1;
  std::vector<std::string> table_name;
  std::vector<std::string> column_name;
  bool is_star = false;
  ColumnType type = ColumnType::other;
};

std::vector<ColumnDescriptor> describe_columns(const Schema& schema);

/// ["*"] for the star column, otherwise table words, [SEP], column words and
/// (if `type_token`) the column-type token.
std::vector<int> column_token_ids(const ColumnDescriptor& column, const Vocabulary& vocab,
                                  bool type_token);

struct ColumnEncoding {
  core::Var vector;               // d x 1
  std::vector<double> attention;  // one weight per token, sums to 1
};

/// alpha = softmax(w^T tanh(o)), h = o alpha for o = bi-LSTM(tokens).
ColumnEncoding encode_column(core::Tape& t, const std::vector<int>& token_ids,
                             const EncoderScope& scope);

struct SchemaEncoding {
  core::Var matrix;  // d x |C|
  std::vector<core::Var> columns;
  std::vector<std::vector<double>> attention;
  std::vector<ColumnDescriptor> descriptors;
  std::vector<std::pair<int, int>> foreign_keys;
  std::size_t size() const noexcept { return columns.size(); }
};

/// Validates the schema (SchemaError on duplicates) and encodes every column
/// independently, in schema order, with "*" at index 0.
SchemaEncoding encode_schema(core::Tape& t, const Schema& schema, const Vocabulary& vocab,
                             const EncoderScope& scope, bool type_token = true);

}  // namespace recsql::encoders
