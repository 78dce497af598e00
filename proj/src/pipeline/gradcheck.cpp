#include "recsql/pipeline/gradcheck.hpp"

#include "recsql/core/ops.hpp"
#include "recsql/decoders/clause_decoders.hpp"
#include "recsql/errors.hpp"
#include "recsql/pipeline/model.hpp"
#include "recsql/sketch/sketch.hpp"
#include "recsql/sql/assembler.hpp"
#include "recsql/sql/text.hpp"

namespace recsql::pipeline {

using decoders::ClauseId;
using decoders::OperatorKind;

namespace {

Schema check_schema() {
  return make_schema("check", {"singer", "concert"},
                     {{-1, "*", ColumnType::text},
                      {0, "singer_id", ColumnType::number},
                      {0, "name", ColumnType::text},
                      {0, "age", ColumnType::number},
                      {1, "concert_id", ColumnType::number},
                      {1, "singer_id", ColumnType::number},
                      {1, "year", ColumnType::number}},
                     {{5, 1}});
}

// Touches every clause and both sub-query flag heads.
constexpr const char* kCheckQuery =
    "SELECT T1.name, max(T1.age) FROM singer AS T1 JOIN concert AS T2 ON T1.singer_id = "
    "T2.singer_id WHERE T2.year > 2000 AND T1.age < (SELECT avg(age) FROM singer) GROUP BY "
    "T1.name HAVING count(*) > (SELECT count(*) FROM concert) ORDER BY T1.name DESC LIMIT 3";

const std::vector<std::string> kQuestion = {"names", "of", "singers", "older", "than", "average"};

}  // namespace

std::vector<std::string> gradcheck_modules() {
  std::vector<std::string> out = {"encoders"};
  for (auto head : sketch::kHeads) out.push_back("sketch." + std::string(sketch::head_name(head)));
  for (auto clause : decoders::kClauses) out.push_back("col." + std::string(decoders::clause_name(clause)));
  for (auto clause : decoders::kClauses) {
    for (auto kind : decoders::operator_kinds(clause)) {
      out.push_back("op." + std::string(decoders::clause_name(clause)) + "." +
                    std::string(decoders::kind_name(kind)));
    }
  }
  return out;
}

std::vector<ModuleCheck> run_gradcheck(const std::string& filter, double tolerance) {
  std::vector<std::string> modules;
  for (const auto& m : gradcheck_modules()) {
    if (filter.empty() || m == filter || m.rfind(filter + ".", 0) == 0) modules.push_back(m);
  }
  if (modules.empty()) throw ParameterError("no gradcheck module matches '" + filter + "'");

  const Schema schema = check_schema();
  ModelConfig config;
  config.d = 8;
  encoders::Vocabulary vocab;
  for (const auto& w : kQuestion) vocab.add(w);
  for (const auto& c : schema.columns)
    for (const auto& w : encoders::split_words(c.name)) vocab.add(w);
  for (const auto& t : schema.tables)
    for (const auto& w : encoders::split_words(t)) vocab.add(w);
  ModelBundle bundle = make_bundle(config, vocab, {{schema.db_id, schema}}, 11);
  const auto ids = bundle.vocab.ids(kQuestion);
  const sql::GoldLevel gold = sql::extract_gold(sql::parse(kCheckQuery, schema), config.limits);

  std::vector<ModuleCheck> out;
  for (const auto& module : modules) {
    core::GradCheckOptions options;
    core::LossBuilder loss;
    const auto scope = encoders::EncoderScope::shared();
    if (module == "encoders") {
      options.parameters = [](const std::string& n) {
        return n == "emb" || n.rfind("qenc", 0) == 0 || n.rfind("cenc", 0) == 0;
      };
      // small loss through both encoders; summing every head drowns tiny
      // gradients in rounding noise
      loss = [&](core::Tape& t) {
        const auto q = encoders::encode_question(t, ids, scope);
        const auto s = encoders::encode_schema(t, schema, bundle.vocab, scope);
        const auto& select = gold.clauses[static_cast<std::size_t>(ClauseId::select)];
        return core::ops::sum(
            t, {core::ops::cross_entropy(t, sketch::head_forward(t, q, sketch::HeadId::where),
                                         gold.sketch.class_of(sketch::HeadId::where)),
                decoders::decoder_loss(t, q, s, select, {true, false, false})});
      };
    } else if (module.rfind("sketch.", 0) == 0) {
      sketch::HeadId head{};
      for (auto h : sketch::kHeads)
        if (module == "sketch." + std::string(sketch::head_name(h))) head = h;
      options.parameters = [module](const std::string& n) { return n.rfind(module + ".", 0) == 0; };
      loss = [&, head](core::Tape& t) {
        const auto q = encoders::encode_question(t, ids, scope);
        return core::ops::cross_entropy(t, sketch::head_forward(t, q, head), gold.sketch.class_of(head));
      };
    } else {
      // col.<clause> or op.<clause>.<kind>
      const bool is_col = module.rfind("col.", 0) == 0;
      const auto first = module.find('.');
      const auto second = module.find('.', first + 1);
      const std::string clause_part = module.substr(first + 1, second - first - 1);
      ClauseId clause{};
      for (auto c : decoders::kClauses)
        if (decoders::clause_name(c) == clause_part) clause = c;
      const bool is_sub = !is_col && module.substr(second + 1) == "sub";
      const decoders::LossTerms terms{is_col, !is_col && !is_sub, is_sub};
      options.parameters = [module](const std::string& n) { return n.rfind(module + ".", 0) == 0; };
      loss = [&, clause, terms](core::Tape& t) {
        const auto q = encoders::encode_question(t, ids, scope);
        const auto s = encoders::encode_schema(t, schema, bundle.vocab, scope);
        return decoders::decoder_loss(t, q, s, gold.clauses[static_cast<std::size_t>(clause)], terms);
      };
    }
    ModuleCheck check;
    check.module = module;
    check.result = core::grad_check(loss, bundle.params, options);
    check.passed = check.result.entries_checked > 0 && check.result.max_relative_error < tolerance;
    out.push_back(check);
  }
  return out;
}

}  // namespace recsql::pipeline
