#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "recsql/sql/ast.hpp"

namespace recsql::eval {

enum class Hardness { easy, medium, hard, extra };
inline constexpr std::array<Hardness, 4> kHardness = {Hardness::easy, Hardness::medium,
                                                      Hardness::hard, Hardness::extra};
std::string_view to_string(Hardness h);
std::optional<Hardness> parse_hardness(std::string_view name);  // accepts "extra hard"

enum class Component { select, where, group_by, order_by, keywords };
inline constexpr std::array<Component, 5> kComponents = {Component::select, Component::where,
                                                         Component::group_by, Component::order_by,
                                                         Component::keywords};
std::string_view to_string(Component c);  // "SELECT", ..., "KEYWORDS"

/// Set-based comparison with literal values and aliases ignored. FROM is
/// compared as a set of tables. Throws DataError on a negative column index.
bool exact_match(const sql::SqlAst& pred, const sql::SqlAst& gold);

/// F1 of one component for one pair, or nullopt when both sides are empty.
std::optional<double> component_f1(const sql::SqlAst& pred, const sql::SqlAst& gold,
                                   Component component);

struct PairRef {
  const sql::SqlAst* pred;
  const sql::SqlAst* gold;
};

/// Macro average over pairs that contribute to a component; a component with
/// no contributing pair scores 1.
std::array<double, 5> component_f1(const std::vector<PairRef>& pairs);

struct HardnessConfig {
  /// Aggregators needed before they count towards "others".
  int agg_threshold = 1;
  /// Whether HAVING counts as a first-order component.
  bool having_is_component = true;
};

struct HardnessCounts {
  int component1 = 0;
  int component2 = 0;
  int others = 0;
};

HardnessCounts hardness_counts(const sql::SqlAst& gold, const HardnessConfig& config = {});
Hardness hardness(const sql::SqlAst& gold, const HardnessConfig& config = {});

struct EvalItem {
  sql::SqlAst pred;
  sql::SqlAst gold;
  std::optional<Hardness> label;  // computed from gold when absent
};

struct EvalReport {
  std::size_t total = 0;
  std::size_t correct = 0;
  double exact_all = 0.0;
  std::array<std::size_t, 4> count{};
  std::array<std::size_t, 4> correct_by_hardness{};
  std::array<double, 4> exact_by_hardness{};  // 0 for empty buckets
  std::array<double, 5> component_f1{};
  std::vector<bool> matches;  // per item
};

/// Scores items in parallel and reduces serially. Throws ParameterError on an
/// empty list.
EvalReport evaluate(const std::vector<EvalItem>& items, const HardnessConfig& config = {});

/// Aligned text table: exact match by hardness, then component F1.
std::string format_report(const EvalReport& report);
/// One "key=value" line per metric.
std::string format_key_values(const EvalReport& report);

}  // namespace recsql::eval
