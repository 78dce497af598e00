#include "recsql/sql/ast.hpp"

#include <algorithm>
#include <string>

#include "recsql/errors.hpp"

namespace recsql::sql {

Rhs Rhs::value() { return {}; }

Rhs Rhs::placeholder() {
  Rhs r;
  r.kind = Kind::placeholder;
  return r;
}

Rhs Rhs::nested(SqlAst ast) {
  Rhs r;
  r.kind = Kind::query;
  r.query = Boxed<SqlAst>(std::move(ast));
  return r;
}

std::vector<Rhs*> placeholders(SqlAst& ast) {
  std::vector<Rhs*> out;
  for (auto& c : ast.where)
    if (c.rhs.kind == Rhs::Kind::placeholder) out.push_back(&c.rhs);
  for (auto& c : ast.having)
    if (c.rhs.kind == Rhs::Kind::placeholder) out.push_back(&c.rhs);
  if (ast.set_rhs.kind == Rhs::Kind::placeholder) out.push_back(&ast.set_rhs);
  return out;
}

namespace {

template <typename F>
void for_each_rhs(const SqlAst& ast, F&& f) {
  for (const auto& c : ast.where) f(c.rhs);
  for (const auto& c : ast.having) f(c.rhs);
  if (ast.set_op != SetOp::none) f(ast.set_rhs);
}

void check_column(int column, const Schema& schema, const char* where) {
  if (column < 0 || column >= schema.column_count()) {
    throw AssemblyError(std::string(where) + ": column index " + std::to_string(column) +
                        " outside the schema");
  }
}

}  // namespace

std::size_t placeholder_count(const SqlAst& ast) {
  std::size_t n = 0;
  for_each_rhs(ast, [&](const Rhs& r) {
    if (r.kind == Rhs::Kind::placeholder) ++n;
    if (r.kind == Rhs::Kind::query && r.query) n += placeholder_count(*r.query);
  });
  return n;
}

std::size_t nested_count(const SqlAst& ast) {
  std::size_t n = 0;
  for_each_rhs(ast, [&](const Rhs& r) {
    if (r.kind != Rhs::Kind::value) ++n;
    if (r.kind == Rhs::Kind::query && r.query) n += nested_count(*r.query);
  });
  return n;
}

bool finalized(const SqlAst& ast) { return placeholder_count(ast) == 0; }

void validate(const SqlAst& ast, const Schema& schema) {
  if (ast.select.empty()) throw AssemblyError("SELECT list is empty");
  for (const auto& s : ast.select) check_column(s.column, schema, "SELECT");
  for (const auto& c : ast.where) check_column(c.column, schema, "WHERE");
  for (int c : ast.group_by) check_column(c, schema, "GROUP BY");
  for (const auto& c : ast.having) check_column(c.column, schema, "HAVING");
  for (const auto& o : ast.order_by) check_column(o.column, schema, "ORDER BY");
  if (!ast.having.empty() && ast.group_by.empty()) {
    throw AssemblyError("HAVING without GROUP BY");
  }
  if (ast.set_op == SetOp::none && ast.set_rhs.kind != Rhs::Kind::value) {
    throw AssemblyError("set operand without a set operator");
  }
  if (ast.set_op != SetOp::none && ast.set_rhs.kind == Rhs::Kind::value) {
    throw AssemblyError("set operator without an operand");
  }
  for (const auto& t : ast.from.tables) {
    if (t < 0 || t >= schema.table_count()) throw AssemblyError("FROM table outside the schema");
  }
  for (const auto& j : ast.from.conditions) {
    check_column(j.left, schema, "JOIN");
    check_column(j.right, schema, "JOIN");
  }
  if (!ast.from.tables.empty()) {
    auto in_from = [&](int column) {
      const int table = schema.columns[static_cast<std::size_t>(column)].table;
      return table < 0 || std::find(ast.from.tables.begin(), ast.from.tables.end(), table) !=
                              ast.from.tables.end();
    };
    auto require = [&](int column) {
      if (!in_from(column)) {
        throw AssemblyError("column '" + schema.columns[static_cast<std::size_t>(column)].name +
                            "' belongs to a table missing from FROM");
      }
    };
    for (const auto& s : ast.select) require(s.column);
    for (const auto& c : ast.where) require(c.column);
    for (int c : ast.group_by) require(c);
    for (const auto& c : ast.having) require(c.column);
    for (const auto& o : ast.order_by) require(o.column);
  }
  for_each_rhs(ast, [&](const Rhs& r) {
    if (r.kind == Rhs::Kind::query) {
      if (!r.query) throw AssemblyError("nested query missing");
      validate(*r.query, schema);
    }
  });
}

}  // namespace recsql::sql
