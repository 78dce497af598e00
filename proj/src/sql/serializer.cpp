#include <algorithm>
#include <string>

#include "recsql/sql/text.hpp"

namespace recsql::sql {

namespace {

class Writer {
 public:
  Writer(const SqlAst& ast, const Schema& schema) : ast_(ast), schema_(schema) {}

  std::string run() {
    out_ = "SELECT ";
    for (std::size_t i = 0; i < ast_.select.size(); ++i) {
      if (i) out_ += ", ";
      expr(ast_.select[i].agg, ast_.select[i].column);
    }
    from();
    if (!ast_.where.empty()) {
      out_ += " WHERE ";
      conditions(ast_.where, ast_.where_connective);
    }
    if (!ast_.group_by.empty()) {
      out_ += " GROUP BY ";
      for (std::size_t i = 0; i < ast_.group_by.size(); ++i) {
        if (i) out_ += ", ";
        out_ += column(ast_.group_by[i]);
      }
    }
    if (!ast_.having.empty()) {
      out_ += " HAVING ";
      conditions(ast_.having, Connective::and_);
    }
    if (!ast_.order_by.empty()) {
      out_ += " ORDER BY ";
      for (std::size_t i = 0; i < ast_.order_by.size(); ++i) {
        if (i) out_ += ", ";
        expr(ast_.order_by[i].agg, ast_.order_by[i].column);
        out_ += ' ';
        out_ += to_string(ast_.order_by[i].dir);
      }
    }
    if (ast_.limit) out_ += " LIMIT \"[VAR]\"";
    if (ast_.set_op != SetOp::none) {
      out_ += ' ';
      out_ += to_string(ast_.set_op);
      out_ += ' ';
      if (ast_.set_rhs.kind == Rhs::Kind::query && ast_.set_rhs.query) {
        out_ += serialize(*ast_.set_rhs.query, schema_);
      } else {
        out_ += "[SUB_QUERY]";
      }
    }
    return out_;
  }

 private:
  bool qualified() const { return ast_.from.tables.size() > 1; }

  int alias_of(int table) const {
    const auto& t = ast_.from.tables;
    const auto it = std::find(t.begin(), t.end(), table);
    return it == t.end() ? -1 : static_cast<int>(it - t.begin()) + 1;
  }

  std::string column(int index) const {
    const auto& c = schema_.columns[static_cast<std::size_t>(index)];
    if (c.is_star()) return "*";
    if (qualified()) {
      const int alias = alias_of(c.table);
      if (alias > 0) return "T" + std::to_string(alias) + "." + c.name;
    }
    return c.name;
  }

  void expr(Aggregator agg, int index) {
    if (agg == Aggregator::none) {
      out_ += column(index);
      return;
    }
    out_ += to_string(agg);
    out_ += '(';
    out_ += column(index);
    out_ += ')';
  }

  void from() {
    const auto& tables = ast_.from.tables;
    if (tables.empty()) return;
    out_ += " FROM ";
    if (tables.size() == 1) {
      out_ += schema_.tables[static_cast<std::size_t>(tables[0])];
      return;
    }
    for (std::size_t i = 0; i < tables.size(); ++i) {
      if (i) out_ += " JOIN ";
      out_ += schema_.tables[static_cast<std::size_t>(tables[i])];
      out_ += " AS T" + std::to_string(i + 1);
      bool first = true;
      for (const auto& j : ast_.from.conditions) {
        if (later_position(j) != static_cast<int>(i)) continue;
        out_ += first ? " ON " : " AND ";
        first = false;
        out_ += column(j.left) + " = " + column(j.right);
      }
    }
  }

  int later_position(const JoinCondition& j) const {
    auto pos = [&](int col) {
      return alias_of(schema_.columns[static_cast<std::size_t>(col)].table) - 1;
    };
    return std::max(pos(j.left), pos(j.right));
  }

  void rhs(const Rhs& r, Comparison cmp) {
    switch (r.kind) {
      case Rhs::Kind::value:
        out_ += cmp == Comparison::between ? "\"[VAR]\" AND \"[VAR]\"" : "\"[VAR]\"";
        break;
      case Rhs::Kind::placeholder: out_ += "[SUB_QUERY]"; break;
      case Rhs::Kind::query:
        out_ += '(';
        out_ += serialize(*r.query, schema_);
        out_ += ')';
        break;
    }
  }

  void conditions(const std::vector<Condition>& conds, Connective connective) {
    for (std::size_t i = 0; i < conds.size(); ++i) {
      if (i) {
        out_ += ' ';
        out_ += to_string(connective);
        out_ += ' ';
      }
      expr(conds[i].agg, conds[i].column);
      out_ += ' ';
      out_ += to_string(conds[i].cmp);
      out_ += ' ';
      rhs(conds[i].rhs, conds[i].cmp);
    }
  }

  const SqlAst& ast_;
  const Schema& schema_;
  std::string out_;
};

}  // namespace

std::string serialize(const SqlAst& ast, const Schema& schema) { return Writer(ast, schema).run(); }

std::string canonicalize(std::string_view sql, const Schema& schema) {
  return serialize(parse(sql, schema), schema);
}

}  // namespace recsql::sql
