#include <algorithm>

#include "doctest.h"
#include "helpers.hpp"
#include "oracle.hpp"
#include "recsql/core/tape.hpp"
#include "recsql/encoders/encoders.hpp"
#include "recsql/encoders/vocabulary.hpp"
#include "recsql/errors.hpp"

using namespace recsql;
using namespace recsql::encoders;
using core::Tape;
using testing_support::make_store;

namespace {

std::vector<std::string> surfaces(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) out.push_back(t.surface);
  return out;
}

std::vector<oracle::Vec> columns_of(const core::Matrix& m) {
  std::vector<oracle::Vec> out;
  for (std::size_t c = 0; c < m.cols(); ++c) out.push_back(oracle::column(m, c));
  return out;
}

}  // namespace

TEST_CASE("tokenize examples") {
  Vocabulary vocab;
  using V = std::vector<std::string>;
  CHECK(surfaces(tokenize("first_name", vocab)) == V{"first", "name"});
  CHECK(surfaces(tokenize("What is the document id", vocab)) ==
        V{"what", "is", "the", "document", "id"});
  CHECK(surfaces(tokenize("Final_Table_Made", vocab)) == V{"final", "table", "made"});
  CHECK(surfaces(tokenize("AirportName", vocab)) == V{"airport", "name"});
  CHECK(surfaces(tokenize("count(*) of [SEP] x", vocab)) == V{"count", "*", "of", "[SEP]", "x"});
  CHECK(tokenize("", vocab).empty());
  CHECK(tokenize("  ?! ", vocab).empty());
}

TEST_CASE("unknown words map to OOV and reserved ids are distinct") {
  Vocabulary vocab;
  const int name = vocab.add("name");
  CHECK(vocab.add("name") == name);
  const auto tokens = tokenize("Name zebra [SUB_QUERY] [var]", vocab);
  REQUIRE(tokens.size() == 4);
  CHECK(tokens[0].id == name);
  CHECK(tokens[1].id == Vocabulary::kOov);
  CHECK(tokens[2].id == Vocabulary::kSubQuery);
  CHECK(tokens[3].id == Vocabulary::kVar);
  CHECK(vocab.id("[SEP]") == Vocabulary::kSep);
  CHECK(vocab.id("*") == Vocabulary::kStar);
  std::vector<int> reserved = {Vocabulary::kPad, Vocabulary::kOov, Vocabulary::kSep,
                               Vocabulary::kSubQuery, Vocabulary::kVar, Vocabulary::kStar};
  for (int k = 0; k < 5; ++k) reserved.push_back(Vocabulary::type_token(static_cast<ColumnType>(k)));
  std::sort(reserved.begin(), reserved.end());
  CHECK(std::adjacent_find(reserved.begin(), reserved.end()) == reserved.end());
  CHECK(reserved.back() < Vocabulary::kReservedCount);
}

TEST_CASE("question encoding shapes and determinism") {
  auto store = make_store(8, 40, 1);
  Tape t(&store);
  auto q1 = encode_question(t, {12}, EncoderScope::shared());
  CHECK(t.value(q1.states).rows() == 8);
  CHECK(t.value(q1.states).cols() == 1);

  const std::vector<int> ids = {12, 13, 14, Vocabulary::kSep, 15, Vocabulary::kSubQuery};
  auto a = encode_question(t, ids, EncoderScope::shared());
  auto b = encode_question(t, ids, EncoderScope::shared());
  CHECK(t.value(a.states).cols() == ids.size());
  CHECK(a.length() == ids.size());
  CHECK(t.value(a.states) == t.value(b.states));

  CHECK_THROWS_AS(encode_question(t, {}, EncoderScope::shared()), DimensionError);
}

TEST_CASE("question encoding matches the bi-LSTM oracle") {
  auto store = make_store(8, 40, 2);
  const std::vector<int> ids = {20, 21, 22, 23};
  Tape t(&store);
  const auto& h = t.value(encode_question(t, ids, EncoderScope::shared()).states);
  const auto ref = oracle::bilstm(store, "qenc", oracle::embed(store, ids));
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t k = 0; k < 8; ++k) CHECK(h(k, i) == doctest::Approx(ref[i][k]).epsilon(1e-12));
}

TEST_CASE("dropout touches question embeddings only in training") {
  auto store = make_store(8, 40, 3);
  const std::vector<int> ids = {20, 21, 22};
  core::Rng rng(5);
  Tape t(&store);
  auto plain = encode_question(t, ids, EncoderScope::shared());
  auto off = encode_question(t, ids, EncoderScope::shared(), {0.5, &rng, false});
  auto on = encode_question(t, ids, EncoderScope::shared(), {0.5, &rng, true});
  CHECK(t.value(plain.states) == t.value(off.states));
  CHECK_FALSE(t.value(plain.states) == t.value(on.states));
}

TEST_CASE("star column attends to its single token") {
  auto store = make_store(8, 40, 4);
  Tape t(&store);
  auto enc = encode_column(t, {Vocabulary::kStar}, EncoderScope::shared());
  REQUIRE(enc.attention.size() == 1);
  CHECK(enc.attention[0] == 1.0);
  const auto o = oracle::bilstm(store, "cenc", oracle::embed(store, {Vocabulary::kStar}));
  for (std::size_t k = 0; k < 8; ++k)
    CHECK(t.value(enc.vector)[k] == doctest::Approx(o[0][k]).epsilon(1e-12));
}

TEST_CASE("column encoding equals the hand-computed weighted sum") {
  Vocabulary vocab;
  const int student = vocab.add("student");
  const int name = vocab.add("name");
  auto store = make_store(8, static_cast<std::size_t>(vocab.size()), 5);
  const std::vector<int> ids = {student, Vocabulary::kSep, name};

  Tape t(&store);
  auto enc = encode_column(t, ids, EncoderScope::shared());
  const auto o = oracle::bilstm(store, "cenc", oracle::embed(store, ids));
  oracle::Vec alpha;
  const auto h = oracle::attend(o, oracle::column(store.value("cenc.w"), 0), &alpha);

  REQUIRE(enc.attention.size() == 3);
  double sum = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(enc.attention[i] == doctest::Approx(alpha[i]).epsilon(1e-12));
    CHECK(enc.attention[i] >= 0.0);
    sum += enc.attention[i];
  }
  CHECK(std::abs(sum - 1.0) < 1e-9);
  for (std::size_t k = 0; k < 8; ++k) {
    const double v = t.value(enc.vector)[k];
    CHECK(v == doctest::Approx(h[k]).epsilon(1e-12));
    // convex hull of the bi-LSTM outputs, coordinate-wise
    double lo = o[0][k], hi = o[0][k];
    for (const auto& oi : o) {
      lo = std::min(lo, oi[k]);
      hi = std::max(hi, oi[k]);
    }
    CHECK(v >= lo - 1e-12);
    CHECK(v <= hi + 1e-12);
  }
}

TEST_CASE("schema encoding shape, star slot and identical columns") {
  Vocabulary vocab;
  for (const char* w : {"student", "course", "name", "age", "id", "title"}) vocab.add(w);
  const auto schema = testing_support::school_schema();
  auto store = make_store(8, static_cast<std::size_t>(vocab.size()), 6);
  Tape t(&store);
  auto enc = encode_schema(t, schema, vocab, EncoderScope::shared());
  CHECK(t.value(enc.matrix).rows() == 8);
  CHECK(t.value(enc.matrix).cols() == 7);
  CHECK(enc.size() == 7);
  CHECK(enc.descriptors[0].is_star);
  CHECK(enc.descriptors[0].column_name == std::vector<std::string>{"*"});
  for (const auto& a : enc.attention) {
    double s = 0.0;
    for (double v : a) s += v;
    CHECK(std::abs(s - 1.0) < 1e-9);
  }
  // two columns with the same words encode identically
  auto a = encode_column(t, column_token_ids(enc.descriptors[1], vocab, true), EncoderScope::shared());
  CHECK(t.value(a.vector) == t.value(enc.columns[1]));

  const auto small = make_schema("s", {"t"},
                                 {{0, "a", ColumnType::text}, {0, "b", ColumnType::text},
                                  {0, "c", ColumnType::number}},
                                 {});
  auto e3 = encode_schema(t, small, vocab, EncoderScope::shared());
  CHECK(t.value(e3.matrix).cols() == 4);
}

TEST_CASE("schema encoding is equivariant under column permutation") {
  Vocabulary vocab;
  for (const char* w : {"t", "u", "alpha", "beta", "gamma"}) vocab.add(w);
  const std::vector<SchemaColumn> cols = {{0, "alpha", ColumnType::text},
                                          {0, "beta", ColumnType::number},
                                          {1, "gamma", ColumnType::text},
                                          {1, "alpha", ColumnType::number}};
  const std::vector<int> perm = {2, 0, 3, 1};
  std::vector<SchemaColumn> permuted;
  for (int p : perm) permuted.push_back(cols[static_cast<std::size_t>(p)]);
  const auto s1 = make_schema("a", {"t", "u"}, cols, {});
  const auto s2 = make_schema("a", {"t", "u"}, permuted, {});

  auto store = make_store(8, static_cast<std::size_t>(vocab.size()), 7);
  Tape t(&store);
  const auto m1 = columns_of(t.value(encode_schema(t, s1, vocab, EncoderScope::shared()).matrix));
  auto e2 = encode_schema(t, s2, vocab, EncoderScope::shared());
  const auto m2 = columns_of(t.value(e2.matrix));
  CHECK(m1[0] == m2[0]);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    CHECK(m2[i + 1] == m1[static_cast<std::size_t>(perm[i]) + 1]);
    CHECK(e2.descriptors[i + 1].column_name ==
          split_words(cols[static_cast<std::size_t>(perm[i])].name));
  }
}

TEST_CASE("duplicate columns are rejected") {
  Schema s;
  s.db_id = "dup";
  s.tables = {"t"};
  s.columns = {{-1, "*", ColumnType::text}, {0, "a", ColumnType::text}, {0, "A", ColumnType::text}};
  Vocabulary vocab;
  auto store = make_store(8, 20, 8);
  Tape t(&store);
  CHECK_THROWS_AS(encode_schema(t, s, vocab, EncoderScope::shared()), SchemaError);
}

TEST_CASE("poker fixture descriptors carry their table index") {
  const auto schemas = testing_support::appendix_schemas();
  const auto& poker = schemas.at("poker_player");
  const auto people = poker.find_table("people");
  REQUIRE(people);
  const auto name = poker.find_column(*people, "Name");
  REQUIRE(name);
  const auto desc = describe_columns(poker);
  CHECK(desc[static_cast<std::size_t>(*name)].table_index == *people);
  CHECK(desc[static_cast<std::size_t>(*name)].table_name == std::vector<std::string>{"people"});
  CHECK(desc[static_cast<std::size_t>(*name)].column_name == std::vector<std::string>{"name"});
}
