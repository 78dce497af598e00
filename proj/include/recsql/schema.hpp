#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace recsql {

enum class ColumnType { text, number, time, boolean, other };

std::string_view to_string(ColumnType type);
/// Spider type names ("text", "number", "time", "boolean", "others").
ColumnType parse_column_type(std::string_view name);

struct SchemaColumn {
  int table = -1;  // -1 for the star pseudo-column
  std::string name;
  ColumnType type = ColumnType::other;

  bool is_star() const noexcept { return table < 0; }
  friend bool operator==(const SchemaColumn&, const SchemaColumn&) = default;
};

/// One database: tables, columns (index 0 is always "*"), and foreign keys
/// as (column, referenced column) index pairs.
struct Schema {
  std::string db_id;
  std::vector<std::string> tables;
  std::vector<SchemaColumn> columns;
  std::vector<std::pair<int, int>> foreign_keys;

  static constexpr int kStar = 0;

  /// Throws SchemaError on a missing star column, bad table or foreign-key
  /// indices, or duplicate (table, column) names.
  void validate() const;

  /// Case-insensitive lookups.
  std::optional<int> find_table(std::string_view name) const;
  std::optional<int> find_column(int table, std::string_view name) const;

  std::vector<int> columns_of(int table) const;
  int column_count() const noexcept { return static_cast<int>(columns.size()); }
  int table_count() const noexcept { return static_cast<int>(tables.size()); }

  friend bool operator==(const Schema&, const Schema&) = default;
};

/// Builds a schema from Spider-style column lists, prepending "*" if absent.
Schema make_schema(std::string db_id, std::vector<std::string> tables,
                   std::vector<SchemaColumn> columns,
                   std::vector<std::pair<int, int>> foreign_keys);

bool iequals(std::string_view a, std::string_view b);

}  // namespace recsql
