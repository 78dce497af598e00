#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

// Operator vocabularies shared by the decoders, the AST and the evaluator.
// Enumerator order is the class order of the corresponding softmax heads.

namespace recsql::sql {

enum class Aggregator { none, max, min, count, sum, avg };
enum class Comparison { eq, ne, gt, lt, ge, le, like, in, not_in, between };
enum class Direction { asc, desc };
enum class SetOp { none, intersect, union_, except };
enum class Connective { and_, or_ };
enum class SubqueryFlag { value, subquery };

inline constexpr std::size_t kAggregatorCount = 6;
inline constexpr std::size_t kComparisonCount = 10;
inline constexpr std::size_t kDirectionCount = 2;
inline constexpr std::size_t kSetOpCount = 4;
inline constexpr std::size_t kConnectiveCount = 2;
inline constexpr std::size_t kSubqueryFlagCount = 2;

std::string_view to_string(Aggregator a);   // "", "max", ..., "avg"
std::string_view to_string(Comparison c);   // "=", "!=", ..., "NOT IN", "BETWEEN"
std::string_view to_string(Direction d);    // "ASC" / "DESC"
std::string_view to_string(SetOp s);        // "", "INTERSECT", "UNION", "EXCEPT"
std::string_view to_string(Connective c);   // "AND" / "OR"

std::optional<Aggregator> parse_aggregator(std::string_view word);

template <typename Enum>
constexpr std::size_t index_of(Enum e) {
  return static_cast<std::size_t>(e);
}

template <typename Enum>
constexpr Enum from_index(std::size_t i) {
  return static_cast<Enum>(i);
}

}  // namespace recsql::sql
