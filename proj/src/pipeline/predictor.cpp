#include "recsql/pipeline/predictor.hpp"

#include <map>

#include "recsql/core/tape.hpp"
#include "recsql/encoders/encoders.hpp"
#include "recsql/errors.hpp"
#include "recsql/sql/text.hpp"

namespace recsql::pipeline {

using decoders::ClauseId;

namespace {

// Lazily encodes the question and schema once per encoder scope.
class Encodings {
 public:
  Encodings(core::Tape& t, const ModelBundle& b, const std::vector<int>& ids, const Schema& schema)
      : t_(t), b_(b), ids_(ids), schema_(schema) {}

  const encoders::QuestionEncoding& question(const encoders::EncoderScope& scope) {
    auto it = questions_.find(scope.question);
    if (it == questions_.end()) {
      it = questions_.emplace(scope.question, encoders::encode_question(t_, ids_, scope)).first;
    }
    return it->second;
  }

  const encoders::SchemaEncoding& schema(const encoders::EncoderScope& scope) {
    auto it = schemas_.find(scope.column);
    if (it == schemas_.end()) {
      it = schemas_
               .emplace(scope.column, encoders::encode_schema(t_, schema_, b_.vocab, scope,
                                                              b_.config.type_token))
               .first;
    }
    return it->second;
  }

 private:
  core::Tape& t_;
  const ModelBundle& b_;
  const std::vector<int>& ids_;
  const Schema& schema_;
  std::map<std::string, encoders::QuestionEncoding> questions_;
  std::map<std::string, encoders::SchemaEncoding> schemas_;
};

int& count_for(sketch::Sketch& s, ClauseId clause) {
  switch (clause) {
    case ClauseId::select: return s.num_select;
    case ClauseId::where: return s.num_where;
    case ClauseId::group_by: return s.num_group_by;
    case ClauseId::having: return s.num_having;
    case ClauseId::order_by: return s.num_order_by;
  }
  return s.num_select;
}

}  // namespace

LevelPrediction Predictor::predict_level(const std::vector<std::string>& words,
                                         const Schema& schema) const {
  const auto& config = bundle_.config;
  std::vector<int> ids = bundle_.vocab.ids(words);
  if (ids.empty()) ids.push_back(encoders::Vocabulary::kPad);

  core::Tape t(&bundle_.params);
  t.set_grad_enabled(false);
  Encodings enc(t, bundle_, ids, schema);

  LevelPrediction out;
  out.sketch = sketch::predict_sketch(t, [&](sketch::HeadId head) -> const encoders::QuestionEncoding& {
    return enc.question(scope_for(config, head));
  });
  if (!config.modules.sub) out.sketch.iue = sql::SetOp::none;

  for (ClauseId clause : decoders::kClauses) {
    const auto scope = scope_for(config, clause);
    auto& pred = out.clauses[static_cast<std::size_t>(clause)];
    pred = decoders::decode_clause(t, enc.question(scope), enc.schema(scope), out.sketch, clause,
                                   config.modules.sub);
    int& count = count_for(out.sketch, clause);
    if (static_cast<int>(pred.size()) != count) {
      out.truncated = true;
      count = static_cast<int>(pred.size());
    }
  }
  if (out.sketch.num_select < 1) throw AssemblyError("no SELECT column could be decoded");
  return out;
}

sql::SqlAst Predictor::predict_ast(const std::vector<std::string>& words, const Schema& schema,
                                   int depth) const {
  const auto level = predict_level(words, schema);
  sql::SqlAst ast = sql::assemble(level.sketch, level.clauses, schema);
  ast.from = sql::infer_from(ast, schema, words);
  return sql::expand_subqueries(
      std::move(ast), schema, words, depth,
      [&](const std::vector<std::string>& input, int remaining) {
        return predict_ast(input, schema, remaining);
      });
}

std::string Predictor::predict(std::string_view question, const std::string& db_id) const {
  const auto it = bundle_.schemas.find(db_id);
  if (it == bundle_.schemas.end()) throw DataError("unknown db_id '" + db_id + "'");
  const auto words = encoders::split_words(question);
  return sql::serialize(predict_ast(words, it->second), it->second);
}

}  // namespace recsql::pipeline
