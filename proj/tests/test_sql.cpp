#include <random>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "oracle.hpp"
#include "recsql/errors.hpp"
#include "recsql/pipeline/toy.hpp"
#include "recsql/sql/assembler.hpp"
#include "recsql/sql/text.hpp"

using namespace recsql;
using namespace recsql::sql;
using decoders::ClauseId;

namespace {

const Schema& appendix(const std::string& db) {
  static const auto schemas = testing_support::appendix_schemas();
  return schemas.at(db);
}

int col(const Schema& s, const std::string& table, const std::string& name) {
  return *s.find_column(*s.find_table(table), name);
}

decoders::ClausePrediction& clause(ClausePredictions& p, ClauseId c) { return p[index_of(c)]; }

/// a(a_id, x) <- b(b_id, a_id) <- c(c_id, b_id, y); d(d_id, a_id) -> a.
Schema bridge_schema() {
  return make_schema("bridge", {"a", "b", "c", "d"},
                     {{0, "a_id", ColumnType::number},
                      {0, "x", ColumnType::text},
                      {1, "b_id", ColumnType::number},
                      {1, "a_id", ColumnType::number},
                      {2, "c_id", ColumnType::number},
                      {2, "b_id", ColumnType::number},
                      {2, "y", ColumnType::text},
                      {3, "d_id", ColumnType::number},
                      {3, "a_id", ColumnType::number}},
                     {{3, 0}, {5, 2}, {8, 0}});
}

std::set<std::pair<int, int>> table_edges(const Schema& s) {
  std::set<std::pair<int, int>> e;
  for (auto [a, b] : s.foreign_keys) {
    e.insert({s.columns[static_cast<std::size_t>(a)].table, s.columns[static_cast<std::size_t>(b)].table});
  }
  return e;
}

bool is_fk(const Schema& s, const JoinCondition& c) {
  for (auto [a, b] : s.foreign_keys)
    if ((a == c.left && b == c.right) || (a == c.right && b == c.left)) return true;
  return false;
}

/// Tables touched by the join conditions form one connected component.
bool joins_connect(const Schema& s, const JoinTree& j) {
  if (j.tables.size() <= 1) return true;
  std::set<int> seen = {j.tables.front()};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& c : j.conditions) {
      const int a = s.columns[static_cast<std::size_t>(c.left)].table;
      const int b = s.columns[static_cast<std::size_t>(c.right)].table;
      if (seen.count(a) != seen.count(b)) {
        seen.insert(a);
        seen.insert(b);
        grew = true;
      }
    }
  }
  return seen.size() == j.tables.size();
}

}  // namespace

TEST_CASE("parse a one-column query") {
  const auto& s = appendix("course_teach");
  const auto ast = parse("SELECT Name FROM teacher", s);
  REQUIRE(ast.select.size() == 1);
  CHECK(ast.select[0].column == col(s, "teacher", "Name"));
  CHECK(ast.where.empty());
  CHECK(ast.group_by.empty());
  CHECK(ast.having.empty());
  CHECK(ast.order_by.empty());
  CHECK_FALSE(ast.limit);
  CHECK(ast.set_op == SetOp::none);
  CHECK(ast.from.tables == std::vector<int>{*s.find_table("teacher")});
}

TEST_CASE("parse errors name the offending token") {
  const auto& s = appendix("course_teach");
  try {
    parse("SELECT FROM x", s);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.token() == "FROM");
  }
  CHECK_THROWS_AS(parse("SELECT DISTINCT Name FROM teacher", s), ParseError);
  CHECK_THROWS_AS(parse("SELECT Name FROM teacher WHERE Age > 3 AND Age < 9 OR Age = 1", s),
                  ParseError);
  CHECK_THROWS_AS(parse("SELECT Name FROM nowhere", s), ParseError);
  CHECK_THROWS_AS(parse("SELECT Name FROM teacher WHERE", s), ParseError);
}

TEST_CASE("golden serializations") {
  const auto& teach = appendix("course_teach");
  CHECK(canonicalize("select name from TEACHER where teacher_id not in "
                     "(select teacher_id from course_arrange)",
                     teach) ==
        "SELECT Name FROM teacher WHERE Teacher_id NOT IN (SELECT Teacher_id FROM course_arrange)");
  const auto& net = appendix("network_1");
  CHECK(canonicalize("SELECT T2.name FROM Friend AS T1 JOIN Highschooler AS T2 ON T1.student_id = "
                     "T2.id GROUP BY T1.student_id ORDER BY count(*) DESC LIMIT 1",
                     net) ==
        "SELECT T2.name FROM Friend AS T1 JOIN Highschooler AS T2 ON T1.student_id = T2.ID "
        "GROUP BY T1.student_id ORDER BY count(*) DESC LIMIT \"[VAR]\"");
  const auto school = testing_support::school_schema();
  CHECK(canonicalize("SELECT name FROM student WHERE age BETWEEN 3 AND 9 "
                     "INTERSECT SELECT name FROM student WHERE name LIKE '%a%'",
                     school) ==
        "SELECT name FROM student WHERE age BETWEEN \"[VAR]\" AND \"[VAR]\" INTERSECT "
        "SELECT name FROM student WHERE name LIKE \"[VAR]\"");
}

TEST_CASE("every fixture query round-trips") {
  for (const auto& row : pipeline::load_fixture(testing_support::source_path(
           "data/appendix_a/appendix_a.tsv"))) {
    const auto& s = appendix(row.db_id);
    for (const auto& q : {row.truth, row.pred}) {
      const auto ast = parse(q, s);
      const auto text = serialize(ast, s);
      CHECK(parse(text, s) == ast);
      CHECK(serialize(parse(text, s), s) == text);
    }
  }
}

TEST_CASE("assemble a single select column") {
  const auto& s = appendix("course_teach");
  sketch::Sketch sk;
  auto p = empty_predictions();
  clause(p, ClauseId::select).push(col(s, "teacher", "Name"));
  auto ast = assemble(sk, p, s);
  CHECK(ast.from.tables.empty());
  ast.from = infer_from(ast, s);
  CHECK(serialize(ast, s) == "SELECT Name FROM teacher");
}

TEST_CASE("assemble a NOT IN sub-query slot and a set operation") {
  const auto& s = appendix("course_teach");
  sketch::Sketch sk;
  sk.num_where = 1;
  sk.iue = SetOp::intersect;
  auto p = empty_predictions();
  clause(p, ClauseId::select).push(col(s, "teacher", "Name"));
  auto& w = clause(p, ClauseId::where);
  w.push(col(s, "teacher", "Teacher_id"));
  w.comparisons[0] = Comparison::not_in;
  w.subquery_flags[0] = SubqueryFlag::subquery;
  auto ast = assemble(sk, p, s);
  REQUIRE(ast.where.size() == 1);
  CHECK(ast.where[0].column == col(s, "teacher", "Teacher_id"));
  CHECK(ast.where[0].cmp == Comparison::not_in);
  CHECK(ast.where[0].rhs.kind == Rhs::Kind::placeholder);
  CHECK(ast.set_op == SetOp::intersect);
  CHECK(ast.set_rhs.kind == Rhs::Kind::placeholder);
  CHECK(placeholder_count(ast) == 2);
  CHECK_FALSE(finalized(ast));
  ast.from = infer_from(ast, s);
  CHECK(serialize(ast, s) ==
        "SELECT Name FROM teacher WHERE Teacher_id NOT IN [SUB_QUERY] INTERSECT [SUB_QUERY]");
}

TEST_CASE("assemble rejects inconsistent predictions") {
  const auto& s = appendix("course_teach");
  sketch::Sketch sk;
  sk.num_select = 2;
  auto p = empty_predictions();
  clause(p, ClauseId::select).push(1);
  CHECK_THROWS_AS(assemble(sk, p, s), AssemblyError);
  clause(p, ClauseId::select).push(99);
  CHECK_THROWS_AS(assemble(sk, p, s), AssemblyError);
}

TEST_CASE("random assemblies always serialize to parseable text") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const Schema s = pipeline::random_toy_schema(rng, "fuzz");
    const int n = s.column_count();
    auto pick = [&](int lo, int hi) {
      return std::uniform_int_distribution<int>(lo, hi)(rng);
    };
    sketch::Sketch sk;
    sk.num_select = pick(1, 4);
    sk.num_where = pick(0, 4);
    sk.num_group_by = pick(0, 3);
    sk.num_having = sk.num_group_by ? pick(0, 2) : 0;
    sk.num_order_by = pick(0, 3);
    sk.has_limit = pick(0, 1);
    sk.iue = from_index<SetOp>(static_cast<std::size_t>(pick(0, 3)));
    sk.where_connective = from_index<Connective>(static_cast<std::size_t>(pick(0, 1)));
    auto p = empty_predictions();
    for (ClauseId c : decoders::kClauses) {
      auto& cp = clause(p, c);
      for (int i = 0; i < decoders::steps_for(sk, c); ++i) {
        cp.push(pick(0, n - 1));
        cp.aggregators.back() = from_index<Aggregator>(static_cast<std::size_t>(pick(0, 5)));
        cp.comparisons.back() = from_index<Comparison>(static_cast<std::size_t>(pick(0, 9)));
        cp.directions.back() = from_index<Direction>(static_cast<std::size_t>(pick(0, 1)));
        cp.subquery_flags.back() = from_index<SubqueryFlag>(static_cast<std::size_t>(pick(0, 1)));
      }
    }
    auto ast = assemble(sk, p, s);
    ast.from = infer_from(ast, s);
    ast = expand_subqueries(ast, s, {"q"}, 0, {});
    const auto text = serialize(ast, s);
    CHECK_NOTHROW(parse(text, s));
  }
}

TEST_CASE("FROM inference: single table and the poker foreign key") {
  const auto& teach = appendix("course_teach");
  auto one = parse("SELECT Name FROM teacher WHERE Age > 3", teach);
  const auto j1 = infer_from(one, teach);
  CHECK(j1.tables == std::vector<int>{*teach.find_table("teacher")});
  CHECK(j1.conditions.empty());

  const auto& poker = appendix("poker_player");
  SqlAst ast;
  ast.select = {{Aggregator::none, col(poker, "people", "Name")}};
  ast.order_by = {{Aggregator::none, col(poker, "poker_player", "Final_Table_Made"), Direction::asc}};
  const auto j = infer_from(ast, poker);
  CHECK(j.tables == std::vector<int>{*poker.find_table("people"), *poker.find_table("poker_player")});
  REQUIRE(j.conditions.size() == 1);
  CHECK(j.conditions[0].left == col(poker, "people", "People_ID"));
  CHECK(j.conditions[0].right == col(poker, "poker_player", "People_ID"));
  ast.from = j;
  CHECK(serialize(ast, poker) ==
        "SELECT T1.Name FROM people AS T1 JOIN poker_player AS T2 ON T1.People_ID = T2.People_ID "
        "ORDER BY T2.Final_Table_Made ASC");
}

TEST_CASE("FROM inference adds the bridge table") {
  const Schema s = bridge_schema();
  SqlAst ast;
  ast.select = {{Aggregator::none, col(s, "a", "x")}, {Aggregator::none, col(s, "c", "y")}};
  const auto j = infer_from(ast, s);
  const auto want = oracle::min_connected_cover(4, table_edges(s), {0, 2});
  CHECK(want == std::set<int>{0, 1, 2});
  CHECK(std::set<int>(j.tables.begin(), j.tables.end()) == want);
  CHECK(j.tables.size() == 3);
  CHECK(j.conditions.size() == 2);
  for (const auto& c : j.conditions) CHECK(is_fk(s, c));
  CHECK(joins_connect(s, j));
}

TEST_CASE("FROM inference matches the brute-force cover on random toy schemas") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const Schema s = pipeline::random_toy_schema(rng, "t");
    SqlAst ast;
    std::set<int> required;
    const int picks = std::uniform_int_distribution<int>(1, 3)(rng);
    for (int i = 0; i < picks; ++i) {
      const int c = std::uniform_int_distribution<int>(1, s.column_count() - 1)(rng);
      ast.select.push_back({Aggregator::none, c});
      required.insert(s.columns[static_cast<std::size_t>(c)].table);
    }
    const auto j = infer_from(ast, s);
    const auto want = oracle::min_connected_cover(s.table_count(), table_edges(s), required);
    CHECK(std::set<int>(j.tables.begin(), j.tables.end()) == want);
    CHECK(j.tables.size() == want.size());
    CHECK(joins_connect(s, j));
    for (const auto& c : j.conditions) CHECK(is_fk(s, c));
  }
}

TEST_CASE("FROM inference: disconnected tables and star-only queries") {
  const auto s = make_schema("islands", {"left_side", "right_side"},
                             {{0, "p", ColumnType::text}, {1, "q", ColumnType::text}}, {});
  SqlAst ast;
  ast.select = {{Aggregator::none, 1}, {Aggregator::none, 2}};
  const auto j = infer_from(ast, s);
  CHECK(j.tables.size() == 2);
  CHECK(j.conditions.empty());

  const auto& dogs = appendix("dog_kennels");
  SqlAst star;
  star.select = {{Aggregator::count, Schema::kStar}};
  const auto js = infer_from(star, dogs, {"how", "many", "treatments", "cost", "anything"});
  CHECK(js.tables == std::vector<int>{*dogs.find_table("Treatments")});
  CHECK(best_matching_table(dogs, {"how", "many", "dogs"}) == *dogs.find_table("Dogs"));
  CHECK(best_matching_table(dogs, {"zzz"}) == 0);
}

TEST_CASE("sub-query expansion") {
  const auto& s = appendix("course_teach");
  const auto gold = parse(
      "SELECT Name FROM teacher WHERE Teacher_id NOT IN (SELECT Teacher_id FROM course_arrange)", s);
  const std::vector<std::string> question = {"list", "teachers", "not", "arranged"};

  auto plain = parse("SELECT Name FROM teacher", s);
  CHECK(expand_subqueries(plain, s, question, 2, {}) == plain);

  SqlAst outer = gold;
  outer.where[0].rhs = Rhs::placeholder();
  std::vector<std::string> seen;
  int seen_depth = -1;
  auto inner = [&](const std::vector<std::string>& input, int depth) {
    seen = input;
    seen_depth = depth;
    return parse("SELECT Teacher_id FROM course_arrange", s);
  };
  const auto full = expand_subqueries(outer, s, question, 1, inner);
  CHECK(full == gold);
  CHECK(finalized(full));
  CHECK(seen_depth == 0);
  REQUIRE(seen.size() > question.size());
  CHECK(std::equal(question.begin(), question.end(), seen.begin()));
  CHECK(seen[question.size()] == "[SEP]");
  CHECK(std::find(seen.begin(), seen.end(), "[SUB_QUERY]") != seen.end());

  const auto fallback = expand_subqueries(outer, s, question, 0, inner);
  CHECK(finalized(fallback));
  CHECK(serialize(fallback, s) ==
        "SELECT Name FROM teacher WHERE Teacher_id NOT IN (SELECT * FROM teacher)");
  CHECK_NOTHROW(validate(fallback, s));
}

TEST_CASE("expansion fills placeholders left to right") {
  const auto school = testing_support::school_schema();
  auto ast = parse(
      "SELECT name FROM student WHERE age > (SELECT avg(age) FROM student) GROUP BY name "
      "HAVING count(*) > (SELECT count(*) FROM course) EXCEPT SELECT name FROM student",
      school);
  CHECK(nested_count(ast) == 3);
  ast.where[0].rhs = Rhs::placeholder();
  ast.having[0].rhs = Rhs::placeholder();
  ast.set_rhs = Rhs::placeholder();
  CHECK(placeholders(ast).size() == 3);
  CHECK(placeholder_count(ast) == 3);
  const std::vector<std::string> inner_sql = {"SELECT title FROM course", "SELECT age FROM student",
                                              "SELECT name FROM student WHERE age = \"[VAR]\""};
  std::vector<long> remaining;
  auto inner = [&](const std::vector<std::string>& input, int) {
    remaining.push_back(std::count(input.begin(), input.end(), "[SUB_QUERY]"));
    return parse(inner_sql[remaining.size() - 1], school);
  };
  const auto full = expand_subqueries(ast, school, {"q"}, 2, inner);
  CHECK(remaining == std::vector<long>{3, 2, 1});
  CHECK(serialize(*full.where[0].rhs.query, school) == inner_sql[0]);
  CHECK(serialize(*full.having[0].rhs.query, school) == inner_sql[1]);
  CHECK(serialize(*full.set_rhs.query, school) == inner_sql[2]);
  CHECK(finalized(full));
}

TEST_CASE("nested targets keep earlier gold and later placeholders") {
  const auto school = testing_support::school_schema();
  const auto ast = parse(
      "SELECT name FROM student WHERE age > (SELECT avg(age) FROM student) "
      "AND student_id IN (SELECT student_id FROM course)",
      school);
  const auto targets = nested_targets(ast);
  REQUIRE(targets.size() == 2);
  CHECK(serialize(targets[0].context, school) ==
        "SELECT name FROM student WHERE age > [SUB_QUERY] AND student_id IN [SUB_QUERY]");
  CHECK(serialize(targets[0].target, school) == "SELECT avg(age) FROM student");
  CHECK(serialize(targets[1].context, school) ==
        "SELECT name FROM student WHERE age > (SELECT avg(age) FROM student) AND student_id IN "
        "[SUB_QUERY]");
  CHECK(serialize(targets[1].target, school) == "SELECT student_id FROM course");
}

TEST_CASE("AST validation") {
  const auto school = testing_support::school_schema();
  SqlAst empty;
  CHECK_THROWS_AS(validate(empty, school), AssemblyError);
  auto having = parse("SELECT name FROM student GROUP BY name HAVING count(*) > 1", school);
  having.group_by.clear();
  CHECK_THROWS_AS(validate(having, school), AssemblyError);
}
