#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "recsql/errors.hpp"
#include "recsql/log.hpp"
#include "recsql/pipeline/config.hpp"
#include "recsql/pipeline/dataset.hpp"
#include "recsql/pipeline/model.hpp"
#include "recsql/pipeline/predictor.hpp"
#include "recsql/pipeline/toy.hpp"
#include "recsql/pipeline/trainer.hpp"
#include "recsql/sql/text.hpp"

using namespace recsql;
using namespace recsql::pipeline;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("recsql_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* kTeachTables = R"js([{
  "db_id": "course_teach",
  "table_names_original": ["teacher", "course_arrange"],
  "column_names_original": [[-1, "*"], [0, "Teacher_id"], [0, "Name"], [1, "Course_ID"], [1, "Teacher_id"]],
  "column_types": ["text", "number", "text", "number", "number"],
  "foreign_keys": [[4, 1]],
  "primary_keys": [1]
}])js";

TrainConfig tiny_config() {
  TrainConfig c;
  c.model.d = 8;
  c.max_epochs = 2;
  c.patience = 2;
  c.learning_rate = 1e-2;
  c.seed = 3;
  return c;
}

}  // namespace

TEST_CASE("key = value configuration") {
  const auto kv = parse_key_values("# comment\nlr = 0.001\n\n  epochs=7 # trailing\nmodules = sketch\n");
  CHECK(kv.at("lr") == "0.001");
  CHECK(kv.at("epochs") == "7");
  TrainConfig c;
  apply_settings(c, kv);
  CHECK(c.learning_rate == 1e-3);
  CHECK(c.max_epochs == 7);
  CHECK(c.model.modules == ModuleSelection::parse("sketch"));
  CHECK_THROWS_AS(parse_key_values("no equals sign"), ParameterError);
  CHECK_THROWS_AS(apply_settings(c, {{"bogus", "1"}}), ParameterError);
  CHECK_THROWS_AS(apply_settings(c, {{"lr", "fast"}}), ParameterError);
  TrainConfig odd;
  odd.model.d = 7;
  CHECK_THROWS_AS(validate(odd), ParameterError);
  CHECK_NOTHROW(validate(TrainConfig{}));
}

TEST_CASE("training defaults") {
  const TrainConfig c;
  CHECK(c.learning_rate == 1e-4);
  CHECK(c.dropout == 0.2);
  CHECK(c.patience == 50);
  CHECK(c.model.d == 64);
  CHECK(c.model.depth == 2);
}

TEST_CASE("module selection") {
  CHECK(ModuleSelection::parse("all") == ModuleSelection{});
  const auto s = ModuleSelection::parse("encoder,sketch,col,op");
  CHECK_FALSE(s.sub);
  CHECK(s.selects("op.where.cmp.Wo"));
  CHECK_FALSE(s.selects("op.where.sub.Wo"));
  CHECK(module_of("emb") == "encoder");
  CHECK(module_of("cenc.w") == "encoder");
  CHECK(module_of("sketch.iue.W") == "sketch");
  CHECK(module_of("col.having.start") == "col");
  CHECK(module_of("op.having.sub.bo") == "sub");
  CHECK(ModuleSelection::parse(s.to_string()) == s);
  CHECK_THROWS_AS(ModuleSelection::parse("sketch,magic"), ParameterError);
}

TEST_CASE("loading a Spider-format fixture") {
  auto schemas = parse_tables(kTeachTables);
  const char* examples = R"js([
    {"db_id": "course_teach", "question": "List the names of teachers who have not been arranged to teach courses.",
     "query": "SELECT Name FROM teacher WHERE Teacher_id NOT IN (SELECT Teacher_id FROM course_arrange)"},
    {"db_id": "course_teach", "question": "distinct names", "query": "SELECT DISTINCT Name FROM teacher"}
  ])js";
  const auto ds = parse_examples(examples, schemas);
  REQUIRE(ds.examples.size() == 1);
  CHECK(ds.skipped == 1);
  const auto& ex = ds.examples[0];
  const auto& schema = ds.schema("course_teach");
  CHECK(sql::parse(sql::serialize(ex.ast, schema), schema) == ex.ast);
  CHECK(is_nested(ex));
  const auto gold = sql::extract_gold(ex.ast);
  CHECK(gold.sketch.num_where == 1);
  CHECK(gold.clauses[sql::index_of(decoders::ClauseId::where)].subquery_flags ==
        std::vector<sql::SubqueryFlag>{sql::SubqueryFlag::subquery});

  CHECK_THROWS_AS(ds.schema("nope"), DataError);
  CHECK_THROWS_AS(parse_examples(R"js([{"db_id": "nope", "question": "q", "query": "SELECT 1"}])js",
                                 schemas),
                  DataError);
  CHECK_THROWS_AS(parse_tables("{not json"), DataError);
  CHECK_THROWS_AS(parse_tables(R"js([{"db_id": "x"}])js"), DataError);
}

TEST_CASE("appendix examples load with every query") {
  const auto ds = load_dataset_dir(testing_support::source_path("data/appendix_a"));
  CHECK(ds.examples.size() == 9);
  CHECK(ds.skipped == 0);
}

TEST_CASE("toy generator") {
  const auto a = generate_toy(7, 5, 200);
  const auto b = generate_toy(7, 5, 200);
  CHECK(a == b);
  CHECK_FALSE(a == generate_toy(8, 5, 200));
  CHECK(a.schemas.size() == 5);
  CHECK(a.examples.size() == 200);
  CHECK_THROWS_AS(generate_toy(1, 0, 10), ParameterError);
  CHECK_THROWS_AS(generate_toy(1, 2, 0), ParameterError);

  std::size_t nested = 0;
  std::set<sql::SetOp> set_ops;
  std::set<sql::Aggregator> aggs;
  std::set<sql::Comparison> cmps;
  std::set<sql::Direction> dirs;
  std::set<sql::Connective> connectives;
  std::set<std::size_t> tables_in_from;
  for (const auto& ex : a.examples) {
    const auto& s = a.schema(ex.db_id);
    CHECK(s.table_count() >= 2);
    CHECK(s.table_count() <= 4);
    if (is_nested(ex)) ++nested;
    const auto text = sql::serialize(ex.ast, s);
    CHECK(sql::canonicalize(ex.sql, s) == text);
    CHECK(sql::parse(text, s) == ex.ast);
    set_ops.insert(ex.ast.set_op);
    if (ex.ast.where.size() >= 2) connectives.insert(ex.ast.where_connective);
    tables_in_from.insert(ex.ast.from.tables.size());
    for (const auto& it : ex.ast.select) aggs.insert(it.agg);
    for (const auto& c : ex.ast.where) cmps.insert(c.cmp);
    for (const auto& c : ex.ast.having) {
      cmps.insert(c.cmp);
      aggs.insert(c.agg);
    }
    for (const auto& o : ex.ast.order_by) {
      dirs.insert(o.dir);
      aggs.insert(o.agg);
    }
  }
  CHECK(nested >= 20);
  CHECK(set_ops.size() == sql::kSetOpCount);
  CHECK(aggs.size() == sql::kAggregatorCount);
  CHECK(cmps.size() == sql::kComparisonCount);
  CHECK(dirs.size() == sql::kDirectionCount);
  CHECK(connectives.size() == sql::kConnectiveCount);
  CHECK(tables_in_from.count(2) == 1);
}

TEST_CASE("toy datasets survive a write and reload") {
  const auto ds = generate_toy(3, 3, 60);
  const auto dir = scratch_dir("roundtrip");
  write_dataset_dir(ds, dir.string());
  const auto back = load_dataset_dir(dir.string());
  CHECK(back == ds);
  CHECK(back.skipped == 0);
  fs::remove_all(dir);
}

TEST_CASE("bundles save and load exactly") {
  const auto ds = generate_toy(4, 2, 30);
  ModelConfig cfg;
  cfg.d = 8;
  auto bundle = make_bundle(cfg, build_vocabulary(ds, cfg), ds.schemas, 5);
  const auto dir = scratch_dir("bundle");
  const auto path = (dir / "model.bin").string();
  save_bundle(bundle, path);
  const auto back = load_bundle(path);
  CHECK(back.config == bundle.config);
  CHECK(back.vocab == bundle.vocab);
  CHECK(back.params.same_values(bundle.params));
  CHECK(back.schemas == bundle.schemas);

  {
    std::ofstream out(dir / "broken.bin", std::ios::binary);
    out << "not a model";
  }
  CHECK_THROWS_AS(load_bundle((dir / "broken.bin").string()), DataError);
  CHECK_THROWS_AS(load_bundle((dir / "missing.bin").string()), DataError);

  std::string bytes;
  {
    std::ifstream in(path, std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  {
    std::ofstream out(dir / "cut.bin", std::ios::binary);
    out << bytes.substr(0, bytes.size() / 2);
  }
  CHECK_THROWS_AS(load_bundle((dir / "cut.bin").string()), DataError);
  fs::remove_all(dir);
}

TEST_CASE("vocabulary without the sub-query module skips nested inputs") {
  const auto ds = generate_toy(7, 3, 100);
  ModelConfig full;
  ModelConfig flat;
  flat.modules = ModuleSelection::parse("encoder,sketch,col,op");
  CHECK(build_vocabulary(ds, flat).size() < build_vocabulary(ds, full).size());
  CHECK(build_vocabulary(ds, full).id("[SEP]") == encoders::Vocabulary::kSep);
}

TEST_CASE("training instances") {
  const auto ds = generate_toy(7, 3, 100);
  ModelConfig cfg;
  cfg.d = 8;
  const auto bundle = make_bundle(cfg, build_vocabulary(ds, cfg), ds.schemas, 1);
  ModelConfig flat_cfg = cfg;
  flat_cfg.modules.sub = false;
  const auto flat = make_bundle(flat_cfg, build_vocabulary(ds, flat_cfg), ds.schemas, 1);
  for (const auto& ex : ds.examples) {
    const auto& s = ds.schema(ex.db_id);
    const auto with = make_instances(ex, s, bundle);
    const auto without = make_instances(ex, s, flat);
    CHECK(with.size() == 1 + sql::nested_count(ex.ast));
    CHECK(without.size() == 1);
    CHECK_FALSE(with[0].nested);
    for (std::size_t i = 1; i < with.size(); ++i) {
      CHECK(with[i].nested);
      CHECK(std::count(with[i].ids.begin(), with[i].ids.end(), encoders::Vocabulary::kSep) >= 1);
    }
  }
}

TEST_CASE("schema split holds out whole databases") {
  const auto ds = generate_toy(2, 5, 100);
  const auto split = split_by_schema(ds, 0.2, 1);
  std::set<std::string> train_dbs, valid_dbs;
  for (auto i : split.train) train_dbs.insert(ds.examples[i].db_id);
  for (auto i : split.valid) valid_dbs.insert(ds.examples[i].db_id);
  CHECK(valid_dbs.size() == 1);
  for (const auto& db : valid_dbs) CHECK(train_dbs.count(db) == 0);
  CHECK(split.train.size() + split.valid.size() == ds.examples.size());
  const auto all = split_by_schema(ds, 0.0, 1);
  CHECK(all.train.size() == ds.examples.size());
  CHECK(all.valid == all.train);
}

TEST_CASE("sketch-only training leaves every other parameter bit-identical") {
  log::set_threshold(log::Level::warn);
  const auto ds = generate_toy(5, 2, 25);
  auto cfg = tiny_config();
  cfg.max_epochs = 1;
  cfg.holdout = 0.0;  // vocabulary then covers every example
  cfg.model.modules = ModuleSelection::parse("sketch");
  const auto result = train(ds, cfg);
  const auto initial = make_bundle(cfg.model, build_vocabulary(ds, cfg.model), ds.schemas, cfg.seed);
  std::size_t changed = 0;
  for (const auto& [name, entry] : result.bundle.params.entries()) {
    const bool same = entry.value == initial.params.value(name);
    if (module_of(name) == "sketch") {
      if (!same) ++changed;
    } else {
      CHECK_MESSAGE(same, name);
    }
  }
  CHECK(changed > 0);
}

TEST_CASE("training is deterministic for a seed") {
  log::set_threshold(log::Level::warn);
  const auto ds = generate_toy(6, 2, 25);
  auto cfg = tiny_config();
  cfg.dropout = 0.0;
  const auto a = train(ds, cfg);
  const auto b = train(ds, cfg);
  CHECK(a.bundle.params.same_values(b.bundle.params));
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i)
    CHECK(a.history[i].mean_loss == b.history[i].mean_loss);
  cfg.dropout = 0.2;
  const auto c = train(ds, cfg);
  const auto d = train(ds, cfg);
  CHECK(c.bundle.params.same_values(d.bundle.params));
}

TEST_CASE("random-weight predictions parse and score") {
  log::set_threshold(log::Level::error);
  const auto ds = generate_toy(9, 3, 50);
  ModelConfig cfg;
  cfg.d = 16;
  const auto bundle = make_bundle(cfg, build_vocabulary(ds, cfg), ds.schemas, 2);
  const Predictor predictor(bundle);
  for (const auto& ex : ds.examples) {
    const auto text = predictor.predict(ex.question, ex.db_id);
    CHECK_NOTHROW(sql::parse(text, ds.schema(ex.db_id)));
  }
  CHECK_THROWS_AS(predictor.predict("anything", "missing_db"), DataError);

  const auto report = evaluate_model(predictor, ds);
  CHECK(report.total == ds.examples.size());
  CHECK(report.exact_all >= 0.0);
  CHECK(report.exact_all <= 0.5);
  for (double f : report.component_f1) {
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
  }

  std::vector<eval::EvalItem> oracle_items;
  for (const auto& ex : ds.examples) oracle_items.push_back({ex.ast, ex.ast, {}});
  const auto perfect = eval::evaluate(oracle_items);
  CHECK(perfect.exact_all == 1.0);
  for (double f : perfect.component_f1) CHECK(f == 1.0);
  log::set_threshold(log::Level::info);
}
