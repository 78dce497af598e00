#include "recsql/schema.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "recsql/errors.hpp"

namespace recsql {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

std::string_view to_string(ColumnType type) {
  switch (type) {
    case ColumnType::text: return "text";
    case ColumnType::number: return "number";
    case ColumnType::time: return "time";
    case ColumnType::boolean: return "boolean";
    case ColumnType::other: return "others";
  }
  return "others";
}

ColumnType parse_column_type(std::string_view name) {
  if (iequals(name, "text")) return ColumnType::text;
  if (iequals(name, "number")) return ColumnType::number;
  if (iequals(name, "time")) return ColumnType::time;
  if (iequals(name, "boolean")) return ColumnType::boolean;
  return ColumnType::other;
}

void Schema::validate() const {
  if (columns.empty() || !columns.front().is_star() || columns.front().name != "*") {
    throw SchemaError(db_id + ": column 0 must be the '*' pseudo-column");
  }
  if (columns.size() < 2) throw SchemaError(db_id + ": schema has no columns");
  std::set<std::pair<int, std::string>> seen;
  for (std::size_t i = 1; i < columns.size(); ++i) {
    const auto& c = columns[i];
    if (c.table < 0 || c.table >= table_count()) {
      throw SchemaError(db_id + ": column '" + c.name + "' has invalid table index");
    }
    std::string lowered = c.name;
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (!seen.emplace(c.table, lowered).second) {
      throw SchemaError(db_id + ": duplicate column " + tables[static_cast<std::size_t>(c.table)] +
                        "." + c.name);
    }
  }
  for (const auto& [a, b] : foreign_keys) {
    if (a <= 0 || b <= 0 || a >= column_count() || b >= column_count()) {
      throw SchemaError(db_id + ": foreign key references an invalid column");
    }
  }
}

std::optional<int> Schema::find_table(std::string_view name) const {
  for (int t = 0; t < table_count(); ++t) {
    if (iequals(tables[static_cast<std::size_t>(t)], name)) return t;
  }
  return std::nullopt;
}

std::optional<int> Schema::find_column(int table, std::string_view name) const {
  for (int c = 1; c < column_count(); ++c) {
    const auto& col = columns[static_cast<std::size_t>(c)];
    if (col.table == table && iequals(col.name, name)) return c;
  }
  return std::nullopt;
}

std::vector<int> Schema::columns_of(int table) const {
  std::vector<int> out;
  for (int c = 1; c < column_count(); ++c) {
    if (columns[static_cast<std::size_t>(c)].table == table) out.push_back(c);
  }
  return out;
}

Schema make_schema(std::string db_id, std::vector<std::string> tables,
                   std::vector<SchemaColumn> columns,
                   std::vector<std::pair<int, int>> foreign_keys) {
  Schema s;
  s.db_id = std::move(db_id);
  s.tables = std::move(tables);
  if (columns.empty() || !columns.front().is_star()) {
    columns.insert(columns.begin(), SchemaColumn{-1, "*", ColumnType::text});
    for (auto& [a, b] : foreign_keys) {
      ++a;
      ++b;
    }
  }
  s.columns = std::move(columns);
  s.foreign_keys = std::move(foreign_keys);
  s.validate();
  return s;
}

}  // namespace recsql
