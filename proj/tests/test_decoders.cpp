#include <cmath>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "oracle.hpp"
#include "recsql/core/ops.hpp"
#include "recsql/core/optim.hpp"
#include "recsql/decoders/clause_decoders.hpp"
#include "recsql/errors.hpp"
#include "recsql/sql/assembler.hpp"
#include "recsql/sql/text.hpp"

using namespace recsql;
using namespace recsql::decoders;
using core::Matrix;
using core::Tape;
using core::Var;
using encoders::EncoderScope;
using encoders::Vocabulary;
using testing_support::make_store;

namespace {

std::vector<oracle::Vec> columns(const Matrix& m) {
  std::vector<oracle::Vec> out;
  for (std::size_t c = 0; c < m.cols(); ++c) out.push_back(oracle::column(m, c));
  return out;
}

/// Schema encoding built from given column vectors.
encoders::SchemaEncoding constant_schema(Tape& t, const std::vector<oracle::Vec>& cols) {
  encoders::SchemaEncoding enc;
  for (const auto& c : cols) enc.columns.push_back(t.constant(Matrix::vector(c)));
  enc.matrix = core::ops::hstack(t, enc.columns);
  enc.attention.assign(cols.size(), {1.0});
  enc.descriptors.resize(cols.size());
  return enc;
}

Vocabulary school_vocab() {
  Vocabulary v;
  for (const char* w : {"student", "course", "id", "name", "age", "title", "list", "the"}) v.add(w);
  return v;
}

}  // namespace

TEST_CASE("zero steps decode nothing") {
  auto store = make_store(8, 30, 1);
  Tape t(&store);
  auto q = encode_question(t, {11, 12}, EncoderScope::shared());
  const auto vocab = school_vocab();
  auto s = encode_schema(t, testing_support::school_schema(), vocab, EncoderScope::shared());
  CHECK(decode_columns(t, q, s, ClauseId::select, 0).empty());
  CHECK(decode_operators(t, q, {}, ClauseId::select, OperatorKind::aggregator).empty());
  CHECK(predict_subquery_flags(t, q, {}, ClauseId::where).empty());
}

TEST_CASE("a column collinear with the attentional output wins") {
  auto store = make_store(4, 30, 2);
  Tape t(&store);
  auto q = encode_question(t, {11, 12, 13}, EncoderScope::shared());
  const auto hq = columns(t.value(q.states));
  oracle::Lstm st{oracle::Vec(4, 0.0), oracle::Vec(4, 0.0)};
  const auto a = oracle::decoder_step(store, "col.where", st,
                                      oracle::column(store.value("col.where.start"), 0), hq);
  // orthogonal complement vectors via Gram-Schmidt against a
  std::vector<oracle::Vec> cols;
  for (int k = 0; k < 3; ++k) {
    oracle::Vec e(4, 0.0);
    e[static_cast<std::size_t>(k)] = 1.0;
    const double proj = oracle::dot(e, a) / oracle::dot(a, a);
    for (std::size_t i = 0; i < 4; ++i) e[i] -= proj * a[i];
    cols.push_back(e);
  }
  oracle::Vec aligned = a;
  for (double& v : aligned) v *= 0.5;
  cols.insert(cols.begin() + 2, aligned);
  auto s = constant_schema(t, cols);
  CHECK(decode_columns(t, q, s, ClauseId::where, 1) == std::vector<int>{2});
}

TEST_CASE("column and operator decoding match the d = 4 oracle") {
  Vocabulary vocab;
  for (const char* w : {"pet", "name", "weight", "show", "heavy"}) vocab.add(w);
  const auto schema = make_schema("pets", {"pet"},
                                  {{0, "name", ColumnType::text}, {0, "weight", ColumnType::number}},
                                  {});
  const std::vector<int> qids = {vocab.id("show"), vocab.id("heavy"), vocab.id("pet")};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto store = make_store(4, static_cast<std::size_t>(vocab.size()), 100 + seed);
    Tape t(&store);
    auto q = encode_question(t, qids, EncoderScope::shared());
    auto s = encode_schema(t, schema, vocab, EncoderScope::shared());
    REQUIRE(s.size() == 3);

    const auto hq = oracle::bilstm(store, "qenc", oracle::embed(store, qids));
    std::vector<oracle::Vec> cols;
    for (const auto& d : s.descriptors) {
      const auto ids = encoders::column_token_ids(d, vocab, true);
      cols.push_back(oracle::attend(oracle::bilstm(store, "cenc", oracle::embed(store, ids)),
                                    oracle::column(store.value("cenc.w"), 0)));
    }
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t k = 0; k < 4; ++k)
        CHECK(t.value(s.columns[c])[k] == doctest::Approx(cols[c][k]).epsilon(1e-12));

    const auto got = decode_columns(t, q, s, ClauseId::order_by, 2);
    const auto want = oracle::decode_columns(store, "col.order_by", hq, cols, 2);
    CHECK(got == want);

    std::vector<Var> chosen;
    std::vector<oracle::Vec> chosen_ref;
    for (int c : got) {
      chosen.push_back(s.columns[static_cast<std::size_t>(c)]);
      chosen_ref.push_back(cols[static_cast<std::size_t>(c)]);
    }
    for (OperatorKind kind : operator_kinds(ClauseId::order_by)) {
      const auto ops = decode_operators(t, q, chosen, ClauseId::order_by, kind);
      CHECK(ops == oracle::decode_operators(store, operator_prefix(ClauseId::order_by, kind), hq,
                                            chosen_ref));
    }
    const auto flags = predict_subquery_flags(t, q, chosen, ClauseId::having);
    const auto flag_ref = oracle::decode_operators(store, "op.having.sub", hq, chosen_ref);
    for (std::size_t i = 0; i < flags.size(); ++i) CHECK(sql::index_of(flags[i]) == flag_ref[i]);
  }
}

TEST_CASE("teacher-forced distributions sum to one over the schema") {
  auto store = make_store(8, 30, 3);
  const auto vocab = school_vocab();
  Tape t(&store);
  auto q = encode_question(t, {11, 12, 13}, EncoderScope::shared());
  auto s = encode_schema(t, testing_support::school_schema(), vocab, EncoderScope::shared());
  for (Var p : column_distributions(t, q, s, ClauseId::select, {2, 5, 0})) {
    const auto& m = t.value(p);
    CHECK(m.size() == 7);
    double sum = 0.0;
    for (double v : m.storage()) sum += v;
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
  CHECK_THROWS_AS(column_distributions(t, q, s, ClauseId::select, {7}), DimensionError);
}

TEST_CASE("masking never repeats a column and truncates past the schema") {
  auto store = make_store(8, 30, 4);
  const auto vocab = school_vocab();
  Tape t(&store);
  auto q = encode_question(t, {11, 12, 13}, EncoderScope::shared());
  auto s = encode_schema(t, testing_support::school_schema(), vocab, EncoderScope::shared());
  bool truncated = true;
  const auto all = decode_columns(t, q, s, ClauseId::group_by, 7, &truncated);
  CHECK_FALSE(truncated);
  CHECK(std::set<int>(all.begin(), all.end()).size() == 7);
  const auto more = decode_columns(t, q, s, ClauseId::group_by, 9, &truncated);
  CHECK(truncated);
  CHECK(more.size() == 7);
}

TEST_CASE("permuting schema columns permutes the column distribution") {
  auto store = make_store(4, 30, 5);
  Tape t(&store);
  auto q = encode_question(t, {11, 12}, EncoderScope::shared());
  const std::vector<oracle::Vec> cols = {{0.1, 0.2, -0.3, 0.4}, {1, 0, 0, -1}, {0.5, 0.5, 0.5, 0.5},
                                         {-0.7, 0.2, 0.9, 0}};
  const std::vector<std::size_t> perm = {2, 0, 3, 1};
  std::vector<oracle::Vec> permuted;
  for (auto p : perm) permuted.push_back(cols[p]);
  auto s1 = constant_schema(t, cols);
  auto s2 = constant_schema(t, permuted);
  const auto p1 = t.value(column_distributions(t, q, s1, ClauseId::select, {0})[0]);
  const auto p2 = t.value(column_distributions(t, q, s2, ClauseId::select, {0})[0]);
  for (std::size_t i = 0; i < perm.size(); ++i) CHECK(p2[i] == doctest::Approx(p1[perm[i]]).epsilon(1e-12));
  const auto c1 = decode_columns(t, q, s1, ClauseId::select, 1);
  const auto c2 = decode_columns(t, q, s2, ClauseId::select, 1);
  CHECK(perm[static_cast<std::size_t>(c2[0])] == static_cast<std::size_t>(c1[0]));
}

TEST_CASE("a single-operator vocabulary always yields that operator") {
  auto store = make_store(4, 30, 6);
  store.value("op.select.agg.Wo") = Matrix(1, 4, 0.3);
  store.value("op.select.agg.bo") = Matrix(1, 1, -2.0);
  Tape t(&store);
  auto q = encode_question(t, {11, 12}, EncoderScope::shared());
  std::vector<Var> cols = {t.constant(Matrix::vector({1, 2, 3, 4})),
                           t.constant(Matrix::vector({-1, 0, 1, 0}))};
  CHECK(decode_operators(t, q, cols, ClauseId::select, OperatorKind::aggregator) ==
        std::vector<std::size_t>{0, 0});
}

TEST_CASE("operator outputs depend only on the chosen column encodings") {
  auto store = make_store(4, 30, 7);
  Tape t(&store);
  auto q = encode_question(t, {11, 12}, EncoderScope::shared());
  std::vector<Var> chosen = {t.constant(Matrix::vector({0.3, -0.2, 0.1, 0.9}))};
  const auto a = t.value(operator_distributions(t, q, chosen, ClauseId::where,
                                                OperatorKind::comparison)[0]);
  auto other = constant_schema(t, {{9, 9, 9, 9}, {-3, 1, 2, 0}});
  (void)other;
  const auto b = t.value(operator_distributions(t, q, chosen, ClauseId::where,
                                                OperatorKind::comparison)[0]);
  CHECK(a == b);
  CHECK(a.size() == sql::kComparisonCount);
}

TEST_CASE("gold clause labels from parsed queries") {
  const auto schemas = testing_support::appendix_schemas();
  {
    const auto& poker = schemas.at("poker_player");
    const auto ast = sql::parse(
        "SELECT T1.Name FROM people AS T1 JOIN poker_player AS T2 ON T1.People_ID = T2.People_ID "
        "ORDER BY T2.Final_Table_Made ASC",
        poker);
    const auto gold = sql::extract_gold(ast);
    const auto& ob = gold.clauses[sql::index_of(ClauseId::order_by)];
    const int col = *poker.find_column(*poker.find_table("poker_player"), "Final_Table_Made");
    CHECK(ob.columns == std::vector<int>{col});
    CHECK(ob.directions == std::vector<sql::Direction>{sql::Direction::asc});
  }
  {
    const auto& emp = schemas.at("employee_hire_evaluation");
    const auto ast = sql::parse(
        "SELECT city FROM employee WHERE age < 30 GROUP BY city HAVING count(*) > 1", emp);
    const auto gold = sql::extract_gold(ast);
    const auto& h = gold.clauses[sql::index_of(ClauseId::having)];
    CHECK(h.columns == std::vector<int>{Schema::kStar});
    CHECK(h.aggregators == std::vector<sql::Aggregator>{sql::Aggregator::count});
    CHECK(h.comparisons == std::vector<sql::Comparison>{sql::Comparison::gt});
  }
  {
    const auto school = testing_support::school_schema();
    auto value = sql::extract_gold(sql::parse("SELECT name FROM student WHERE age > 3", school));
    CHECK(value.clauses[sql::index_of(ClauseId::where)].subquery_flags ==
          std::vector<sql::SubqueryFlag>{sql::SubqueryFlag::value});
    auto nested = sql::extract_gold(
        sql::parse("SELECT name FROM student WHERE age > (SELECT avg(age) FROM student)", school));
    CHECK(nested.clauses[sql::index_of(ClauseId::where)].subquery_flags ==
          std::vector<sql::SubqueryFlag>{sql::SubqueryFlag::subquery});
  }
}

TEST_CASE("decode_clause follows the sketch counts") {
  auto store = make_store(8, 30, 8);
  const auto vocab = school_vocab();
  Tape t(&store);
  auto q = encode_question(t, {11, 12, 13}, EncoderScope::shared());
  auto s = encode_schema(t, testing_support::school_schema(), vocab, EncoderScope::shared());
  sketch::Sketch sk;
  sk.num_select = 2;
  sk.num_order_by = 3;
  for (ClauseId c : kClauses) {
    const auto p = decode_clause(t, q, s, sk, c);
    CHECK(p.clause == c);
    CHECK(p.consistent());
    CHECK(static_cast<int>(p.size()) == steps_for(sk, c));
  }
  CHECK(decode_clause(t, q, s, sk, ClauseId::where).columns.empty());
}

TEST_CASE("decoder loss: certain, uniform, and bad gold") {
  auto store = make_store(4, 30, 9);
  Tape t(&store);
  auto q = encode_question(t, {11, 12}, EncoderScope::shared());
  const auto hq = columns(t.value(q.states));
  oracle::Lstm st{oracle::Vec(4, 0.0), oracle::Vec(4, 0.0)};
  const auto a = oracle::decoder_step(store, "col.select", st,
                                      oracle::column(store.value("col.select.start"), 0), hq);
  // gold logit a.big = 50, every other logit 0
  oracle::Vec big = a;
  const double scale = 50.0 / oracle::dot(a, a);
  for (double& v : big) v *= scale;
  auto certain = constant_schema(t, {oracle::Vec(4, 0.0), big, oracle::Vec(4, 0.0)});
  ClausePrediction gold;
  gold.clause = ClauseId::select;
  gold.push(1);
  const LossTerms columns_only{true, false, false};
  CHECK(t.scalar(decoder_loss(t, q, certain, gold, columns_only)) < 1e-9);

  auto flat = constant_schema(t, std::vector<oracle::Vec>(5, oracle::Vec{0.2, -0.1, 0.4, 0.3}));
  CHECK(t.scalar(decoder_loss(t, q, flat, gold, columns_only)) ==
        doctest::Approx(std::log(5.0)).epsilon(1e-12));

  ClausePrediction empty;
  empty.clause = ClauseId::where;
  CHECK(t.scalar(decoder_loss(t, q, flat, empty)) == 0.0);

  ClausePrediction bad;
  bad.clause = ClauseId::select;
  bad.push(5);
  CHECK_THROWS_AS(decoder_loss(t, q, flat, bad), DimensionError);
}

TEST_CASE("decoder loss reaches below 0.05 after 300 steps on one example") {
  const auto vocab = school_vocab();
  const auto schema = testing_support::school_schema();
  auto store = make_store(8, static_cast<std::size_t>(vocab.size()), 10);
  ClausePrediction gold;
  gold.clause = ClauseId::having;
  gold.push(0);
  gold.push(3);
  gold.aggregators = {sql::Aggregator::count, sql::Aggregator::avg};
  gold.comparisons = {sql::Comparison::gt, sql::Comparison::le};
  gold.subquery_flags = {sql::SubqueryFlag::value, sql::SubqueryFlag::subquery};
  const std::vector<int> ids = {vocab.id("list"), vocab.id("the"), vocab.id("age")};
  double loss = 0.0;
  for (int step = 0; step < 300; ++step) {
    Tape t(&store);
    auto q = encode_question(t, ids, EncoderScope::shared());
    auto s = encode_schema(t, schema, vocab, EncoderScope::shared());
    Var l = decoder_loss(t, q, s, gold);
    loss = t.scalar(l);
    t.backward(l);
    core::adam_step(store, t.parameter_gradients(), 1e-2);
  }
  CHECK(loss < 0.05);
}
