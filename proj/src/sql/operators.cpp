#include "recsql/sql/operators.hpp"

#include "recsql/schema.hpp"

namespace recsql::sql {

std::string_view to_string(Aggregator a) {
  switch (a) {
    case Aggregator::none: return "";
    case Aggregator::max: return "max";
    case Aggregator::min: return "min";
    case Aggregator::count: return "count";
    case Aggregator::sum: return "sum";
    case Aggregator::avg: return "avg";
  }
  return "";
}

std::string_view to_string(Comparison c) {
  switch (c) {
    case Comparison::eq: return "=";
    case Comparison::ne: return "!=";
    case Comparison::gt: return ">";
    case Comparison::lt: return "<";
    case Comparison::ge: return ">=";
    case Comparison::le: return "<=";
    case Comparison::like: return "LIKE";
    case Comparison::in: return "IN";
    case Comparison::not_in: return "NOT IN";
    case Comparison::between: return "BETWEEN";
  }
  return "=";
}

std::string_view to_string(Direction d) { return d == Direction::asc ? "ASC" : "DESC"; }

std::string_view to_string(SetOp s) {
  switch (s) {
    case SetOp::none: return "";
    case SetOp::intersect: return "INTERSECT";
    case SetOp::union_: return "UNION";
    case SetOp::except: return "EXCEPT";
  }
  return "";
}

std::string_view to_string(Connective c) { return c == Connective::and_ ? "AND" : "OR"; }

std::optional<Aggregator> parse_aggregator(std::string_view word) {
  for (std::size_t i = 1; i < kAggregatorCount; ++i) {
    const auto a = from_index<Aggregator>(i);
    if (iequals(word, to_string(a))) return a;
  }
  return std::nullopt;
}

}  // namespace recsql::sql
