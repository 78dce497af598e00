#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "recsql/schema.hpp"
#include "recsql/sql/ast.hpp"

namespace recsql::pipeline {

struct Example {
  std::string question;
  std::string db_id;
  std::string sql;  // as read from the file
  std::vector<std::string> words;
  sql::SqlAst ast;
  friend bool operator==(const Example&, const Example&) = default;
};

struct Dataset {
  std::map<std::string, Schema> schemas;
  std::vector<Example> examples;
  std::size_t skipped = 0;  // out-of-subset gold queries

  /// Throws DataError for an unknown id.
  const Schema& schema(const std::string& db_id) const;
  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.schemas == b.schemas && a.examples == b.examples;
  }
};

/// Whether the query contains a nested query or a set operation.
bool is_nested(const Example& example);

/// Parses a Spider tables file. Throws DataError with the offending entry.
std::map<std::string, Schema> parse_tables(std::string_view json_text);
std::map<std::string, Schema> load_tables(const std::string& path);
std::string tables_to_json(const std::map<std::string, Schema>& schemas);

/// Parses examples against known schemas. Gold queries outside the supported
/// subset, or beyond the sketch limits, are skipped and counted.
Dataset parse_examples(std::string_view json_text, std::map<std::string, Schema> schemas);

Dataset load_spider(const std::string& tables_path, const std::string& examples_path);
/// `dir`/tables.json and `dir`/examples.json.
Dataset load_dataset_dir(const std::string& dir);
/// Writes tables.json and examples.json (creating `dir`).
void write_dataset_dir(const Dataset& dataset, const std::string& dir);
std::string examples_to_json(const Dataset& dataset);

/// Rows of a stored-predictions fixture: db_id, hardness label, gold and
/// predicted SQL, tab separated; '#' lines are comments.
struct FixtureRow {
  std::string db_id;
  std::string hardness;
  std::string truth;
  std::string pred;
};
std::vector<FixtureRow> load_fixture(const std::string& path);

}  // namespace recsql::pipeline
