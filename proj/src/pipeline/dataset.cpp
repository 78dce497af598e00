#include "recsql/pipeline/dataset.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "recsql/encoders/vocabulary.hpp"
#include "recsql/errors.hpp"
#include "recsql/log.hpp"
#include "recsql/sql/assembler.hpp"
#include "recsql/sql/text.hpp"

namespace recsql::pipeline {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << text;
}

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string(what) + ": " + e.what());
  }
}

Schema schema_from_json(const json& db, std::size_t index) {
  const std::string where = "tables entry " + std::to_string(index);
  try {
    std::vector<std::string> tables = db.at("table_names_original").get<std::vector<std::string>>();
    const auto& cols = db.at("column_names_original");
    const auto& types = db.at("column_types");
    if (!cols.is_array() || !types.is_array() || cols.size() != types.size()) {
      throw DataError(where + ": column_names_original and column_types differ in length");
    }
    std::vector<SchemaColumn> columns;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      SchemaColumn c;
      c.table = cols[i].at(0).get<int>();
      c.name = cols[i].at(1).get<std::string>();
      c.type = parse_column_type(types[i].get<std::string>());
      columns.push_back(std::move(c));
    }
    std::vector<std::pair<int, int>> fks;
    if (db.contains("foreign_keys")) {
      for (const auto& fk : db.at("foreign_keys")) fks.emplace_back(fk.at(0).get<int>(), fk.at(1).get<int>());
    }
    Schema s;
    s.db_id = db.at("db_id").get<std::string>();
    s.tables = std::move(tables);
    s.columns = std::move(columns);
    s.foreign_keys = std::move(fks);
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw DataError(where + ": " + e.what());
  } catch (const SchemaError& e) {
    throw DataError(where + ": " + e.what());
  }
}

}  // namespace

const Schema& Dataset::schema(const std::string& db_id) const {
  const auto it = schemas.find(db_id);
  if (it == schemas.end()) throw DataError("unknown db_id '" + db_id + "'");
  return it->second;
}

bool is_nested(const Example& example) { return sql::nested_count(example.ast) > 0; }

std::map<std::string, Schema> parse_tables(std::string_view text) {
  const json root = parse_json(text, "tables file");
  if (!root.is_array()) throw DataError("tables file: expected a list of databases");
  std::map<std::string, Schema> out;
  for (std::size_t i = 0; i < root.size(); ++i) {
    Schema s = schema_from_json(root[i], i);
    const std::string id = s.db_id;
    if (!out.emplace(id, std::move(s)).second) throw DataError("tables file: duplicate db_id '" + id + "'");
  }
  return out;
}

std::map<std::string, Schema> load_tables(const std::string& path) {
  try {
    return parse_tables(read_file(path));
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::string tables_to_json(const std::map<std::string, Schema>& schemas) {
  json root = json::array();
  for (const auto& [id, s] : schemas) {
    json db;
    db["db_id"] = id;
    db["table_names_original"] = s.tables;
    db["table_names"] = s.tables;
    json cols = json::array();
    json types = json::array();
    for (const auto& c : s.columns) {
      cols.push_back(json::array({c.table, c.name}));
      types.push_back(std::string(to_string(c.type)));
    }
    db["column_names_original"] = cols;
    db["column_names"] = cols;
    db["column_types"] = types;
    json fks = json::array();
    for (const auto& [a, b] : s.foreign_keys) fks.push_back(json::array({a, b}));
    db["foreign_keys"] = fks;
    db["primary_keys"] = json::array();
    root.push_back(std::move(db));
  }
  return root.dump(2);
}

Dataset parse_examples(std::string_view text, std::map<std::string, Schema> schemas) {
  const json root = parse_json(text, "examples file");
  if (!root.is_array()) throw DataError("examples file: expected a list of examples");
  Dataset ds;
  ds.schemas = std::move(schemas);
  for (std::size_t i = 0; i < root.size(); ++i) {
    Example ex;
    try {
      ex.question = root[i].at("question").get<std::string>();
      ex.db_id = root[i].at("db_id").get<std::string>();
      ex.sql = root[i].at("query").get<std::string>();
    } catch (const json::exception& e) {
      throw DataError("example " + std::to_string(i) + ": " + e.what());
    }
    const auto it = ds.schemas.find(ex.db_id);
    if (it == ds.schemas.end()) {
      throw DataError("example " + std::to_string(i) + ": unknown db_id '" + ex.db_id + "'");
    }
    try {
      ex.ast = sql::parse(ex.sql, it->second);
      sql::validate(ex.ast, it->second);
      sql::extract_gold(ex.ast);
    } catch (const ParseError& e) {
      log::info("skipping example ", i, ": ", e.what());
      ++ds.skipped;
      continue;
    } catch (const AssemblyError& e) {
      log::info("skipping example ", i, ": ", e.what());
      ++ds.skipped;
      continue;
    }
    ex.words = encoders::split_words(ex.question);
    ds.examples.push_back(std::move(ex));
  }
  if (ds.skipped > 0) log::warn("skipped ", ds.skipped, " examples outside the supported SQL subset");
  return ds;
}

Dataset load_spider(const std::string& tables_path, const std::string& examples_path) {
  auto schemas = load_tables(tables_path);
  try {
    return parse_examples(read_file(examples_path), std::move(schemas));
  } catch (const DataError& e) {
    throw DataError(examples_path + ": " + e.what());
  }
}

Dataset load_dataset_dir(const std::string& dir) {
  const std::filesystem::path root(dir);
  return load_spider((root / "tables.json").string(), (root / "examples.json").string());
}

std::string examples_to_json(const Dataset& dataset) {
  json root = json::array();
  for (const auto& ex : dataset.examples) {
    root.push_back({{"db_id", ex.db_id}, {"question", ex.question}, {"query", ex.sql}});
  }
  return root.dump(2);
}

void write_dataset_dir(const Dataset& dataset, const std::string& dir) {
  const std::filesystem::path root(dir);
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) throw DataError("cannot create " + dir + ": " + ec.message());
  write_file((root / "tables.json").string(), tables_to_json(dataset.schemas));
  write_file((root / "examples.json").string(), examples_to_json(dataset));
}

std::vector<FixtureRow> load_fixture(const std::string& path) {
  std::stringstream ss(read_file(path));
  std::vector<FixtureRow> rows;
  std::string line;
  int n = 0;
  while (std::getline(ss, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string field;
    while (std::getline(ls, field, '\t')) fields.push_back(field);
    if (fields.size() != 4) {
      throw DataError(path + ":" + std::to_string(n) + ": expected 4 tab-separated fields");
    }
    rows.push_back({fields[0], fields[1], fields[2], fields[3]});
  }
  return rows;
}

}  // namespace recsql::pipeline
